#pragma once

#include <memory>
#include <vector>

#include "covham/rational.hpp"
#include "covham/symbols.hpp"

namespace covham {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// One tensor-indexed atom. Derivative atoms are the base atom plus a sorted
// multiset of derivative indices. ExpPhase atoms carry their exponent as a
// nested expression.
struct Atom {
  AtomKind kind = AtomKind::Param;
  Sym symbol = kNoSym;
  bool conj = false;    // complex-conjugated scalar field/momentum/function
  bool primed = false;  // canonically transformed variable
  std::vector<Index> idx;     // slot indices
  std::vector<Index> der;     // partial-derivative indices (kept sorted)
  std::vector<Sym> fnder;     // ParamFn: field symbols differentiated by (sorted)
  ExprPtr exponent;           // ExpPhase only

  bool isDerivative() const { return !der.empty() || !fnder.empty(); }
};

int cmpAtom(const Atom& a, const Atom& b);
bool operator==(const Atom& a, const Atom& b);
inline bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
inline bool operator<(const Atom& a, const Atom& b) { return cmpAtom(a, b) < 0; }

// coefficient * product of commutative factors (with integer powers) * one
// ordered chain of non-commutative factors.
struct Monomial {
  Q coef = Q(1);
  std::vector<std::pair<Atom, int>> fac;  // sorted, powers != 0
  std::vector<Atom> chain;                // order-preserving
};

int cmpMonomialBody(const Monomial& a, const Monomial& b);  // ignores coef

// A fully-distributed sum of monomials. Canonical once normalize() has run:
// equal expressions have byte-identical canonical forms.
struct Expr {
  std::vector<Monomial> mono;

  bool isZero() const { return mono.empty(); }
};

int cmpExpr(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

// ---- raw constructors (pre-normal forms; run normalize before comparing) ----

inline Expr zero() { return Expr{}; }

inline Expr constant(Q c) {
  if (c.isZero()) return zero();
  Monomial m;
  m.coef = c;
  return Expr{{m}};
}
inline Expr one() { return constant(Q(1)); }
inline Expr imag() { return constant(Q::I()); }
inline Expr rational(long long n, long long d = 1) { return constant(Q(Rat(n, d))); }

inline Expr fromAtom(Atom a) {
  Monomial m;
  m.fac.push_back({std::move(a), 1});
  return Expr{{m}};
}
inline Expr fromChainAtom(Atom a) {
  Monomial m;
  m.chain.push_back(std::move(a));
  return Expr{{m}};
}

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator*(Q c, const Expr& a);
inline Expr operator*(const Expr& a, Q c) { return c * a; }
Expr powi(const Expr& a, int n);  // non-negative exponent; expands

// ---- atom builder helpers ----

Atom paramAtom(Sym s);
Atom coordAtom(Index mu);                         // x^mu
Atom fieldAtom(Sym s, std::vector<Index> slots = {}, bool conj = false, bool primed = false);
Atom momentumAtom(Sym field, std::vector<Index> slotsAndDir, bool conj = false,
                  bool primed = false);
Atom paramFnAtom(Sym s, std::vector<Index> slots = {});
Atom deltaAtom(Index a, Index b);
Atom metricAtom(Index a, Index b);
Atom epsilonAtom(Index a, Index b, Index c);
Atom gammaAtom(Index mu);
Atom sigmaAtom(Index mu, Index nu);
Atom tauMatAtom(Index mu, Index nu);
Atom pauliAtom(Index a);
Atom unitMatAtom();
Atom derivedAtom(Atom base, std::vector<Index> derivIdx);  // appends derivative indices

Expr expPhase(const Expr& exponentExpr);

// Conjugates a commutative expression: coefficients, exp phases, and atoms of
// complex symbols (conj flag). Errors on non-commutative content.
Expr conjugate(const Expr& e, const Context& ctx);

// Swaps every occurrence of symbolic index name `from` to `to` (both free
// occurrences and, if present, dummies named `from`).
Expr renameIndexName(const Expr& e, Sym from, Sym to);

// Replaces symbolic index `name` by concrete component `value` everywhere.
Expr instantiateIndex(const Expr& e, Sym name, int value);

// Matrix dimensions of a chain atom (momenta of row/column fields transpose).
inline void atomShapeDims(const Context& ctx, const Atom& a, int& rows, int& cols) {
  switch (a.kind) {
    case AtomKind::Gamma:
    case AtomKind::SigmaMat:
    case AtomKind::TauMat:
      rows = cols = 4;
      return;
    case AtomKind::Pauli:
      rows = cols = 2;
      return;
    case AtomKind::UnitMat:
      rows = cols = 0;  // adapts to neighbours
      return;
    default: {
      const SymbolInfo& si = ctx.info(a.symbol);
      rows = si.ncRows;
      cols = si.ncCols;
      if (a.kind == AtomKind::Momentum) std::swap(rows, cols);
      if (a.kind == AtomKind::ParamFn && !a.fnder.empty()) {
        const SymbolInfo& di = ctx.info(a.fnder.back());
        rows = di.ncCols;
        cols = di.ncRows;
      }
      return;
    }
  }
}

// True if any atom of the monomial/expression satisfies pred.
template <typename Pred>
bool anyAtom(const Monomial& m, Pred pred) {
  for (auto& [a, p] : m.fac)
    if (pred(a)) return true;
  for (auto& a : m.chain)
    if (pred(a)) return true;
  return false;
}
template <typename Pred>
bool anyAtom(const Expr& e, Pred pred) {
  for (auto& m : e.mono)
    if (anyAtom(m, pred)) return true;
  return false;
}

}  // namespace covham
