#pragma once

#include <complex>
#include <functional>
#include <map>

#include <Eigen/Dense>

#include "covham/normalize.hpp"

namespace covham {

struct DerivError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// d e / d wrt, treating every distinct atom (field, momentum, derivative
// atom, conjugate) as an independent variable. Index slots that differ only
// in variance contribute metric factors; matching slots contribute deltas.
// Non-commutative atoms may be differentiated only at the ends of a chain.
Expr differentiate(const Expr& e, const Atom& wrt, const Context& ctx);

// Total derivative d/dx^mu along field trajectories: fields, momenta and
// their derivative atoms gain a derivative index; declared x-dependent
// functions and coordinates differentiate; parameters are constant.
Expr totalDerivative(const Expr& e, Index mu, const Context& ctx);

// Explicit derivative d/dx^mu|expl: only coordinates, x-dependent parameter
// functions and exp-phases contribute; fields and momenta are held fixed.
Expr explicitDerivative(const Expr& e, Index mu, const Context& ctx);

// ---- substitution ----

struct Substitution {
  // Pattern atom (with symbolic or concrete indices) -> replacement whose
  // free indices must match the pattern's symbolic slots by name.
  std::vector<std::pair<Atom, Expr>> rules;

  void add(Atom pattern, Expr replacement) {
    rules.push_back({std::move(pattern), std::move(replacement)});
  }
};

// Simultaneous substitution followed by normalize. Derivative atoms of a
// bound base atom are replaced by total derivatives of the replacement.
Expr substitute(const Expr& e, const Substitution& subst, const Context& ctx);

// ---- numeric evaluation ----

using Cx = std::complex<double>;
using MatX = Eigen::MatrixXcd;

struct EvalValue {
  bool scalar = true;
  Cx s{0.0, 0.0};
  MatX m;

  static EvalValue of(Cx v) { return EvalValue{true, v, {}}; }
  static EvalValue of(MatX v) { return EvalValue{false, {}, std::move(v)}; }
};

// Numeric bindings: caller provides values for parameters, coordinates,
// parameter functions (per derivative variant) and field/momentum components
// at their natural variance; the evaluator applies metric signs for lowered
// spacetime slots.
struct Bindings {
  std::map<Sym, Cx> params;
  Cx coord[4] = {};
  // key: rendered atom identity with concrete natural-variance indices
  std::map<std::string, Cx> scalars;
  std::map<std::string, MatX> matrices;
};

// Stable identity key for an atom with all-concrete indices at natural
// variance (used as the binding key).
std::string bindingKey(const Atom& a, const Context& ctx);

// Evaluates a normalized expression with no free symbolic indexes to a
// complex number (or matrix for non-scalar chains). Dummy indices are summed
// in canonical order.
EvalValue evaluateValue(const Expr& e, const Bindings& b, const Context& ctx);
Cx evaluate(const Expr& e, const Bindings& b, const Context& ctx);

}  // namespace covham
