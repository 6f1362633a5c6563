#pragma once

#include "covham/expr.hpp"

namespace covham {

struct IndexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RewriteFuelError : std::runtime_error {
  RewriteFuelError() : std::runtime_error("generator rewrite fuel exhausted") {}
};

// Rewrites an expression into its unique canonical form: fully distributed,
// like monomials merged, metric/delta contractions absorbed, generator
// products reduced and normal-ordered, dummy indices renamed by first
// appearance, declared (anti)symmetries applied. Idempotent.
Expr normalize(const Expr& e, const Context& ctx);

// Divides by a product of constants and parameters (negative powers allowed
// for parameters only).
Expr divideByParams(const Expr& a, const Expr& divisor, const Context& ctx);

// True if `name` occurs as a free (single-occurrence) index of the monomial.
bool hasFreeIndex(const Expr& e, Sym name);

// Collects the free symbolic indices of each monomial and checks that all
// monomials agree; throws IndexError otherwise. Returns the common free set
// sorted by name.
std::vector<Index> freeIndices(const Expr& e, const Context& ctx);

}  // namespace covham
