#pragma once

#include <random>

#include "covham/calculus.hpp"
#include "covham/normalize.hpp"
#include "covham/render.hpp"

namespace covham::testing {

// Shorthand builders used across the test suites.
inline Expr P(Sym s) { return fromAtom(paramAtom(s)); }
inline Expr F(Sym s, std::vector<Index> idx = {}) { return fromAtom(fieldAtom(s, idx)); }
inline Expr Fc(Sym s, std::vector<Index> idx = {}) {
  return fromAtom(fieldAtom(s, idx, true));
}
inline Expr Mom(Sym s, std::vector<Index> idx) { return fromAtom(momentumAtom(s, idx)); }
inline Expr Momc(Sym s, std::vector<Index> idx) {
  return fromAtom(momentumAtom(s, idx, true));
}
inline Expr D(Index mu, Sym field, std::vector<Index> idx = {}) {
  return fromAtom(derivedAtom(fieldAtom(field, idx), {mu}));
}
inline Expr D2(Index mu, Index nu, Sym field, std::vector<Index> idx = {}) {
  return fromAtom(derivedAtom(fieldAtom(field, idx), {mu, nu}));
}
inline Expr G(Index a, Index b) { return fromAtom(metricAtom(a, b)); }
inline Expr Del(Index a, Index b) { return fromAtom(deltaAtom(a, b)); }
inline Expr Gam(Index mu) { return fromChainAtom(gammaAtom(mu)); }
inline Expr Sig(Index mu, Index nu) { return fromChainAtom(sigmaAtom(mu, nu)); }
inline Expr TauM(Index mu, Index nu) { return fromChainAtom(tauMatAtom(mu, nu)); }
inline Expr Pau(Index a) { return fromChainAtom(pauliAtom(a)); }
inline Expr Unit() { return fromChainAtom(unitMatAtom()); }
inline Expr half() { return rational(1, 2); }

inline Context scalarCtx() {
  Context ctx;
  ctx.declareField("phi", FieldRank::Scalar, Complexity::Real);
  ctx.declareField("psi", FieldRank::Scalar, Complexity::Real);
  ctx.declareParam("v");
  ctx.declareParam("lambda");
  ctx.declareParam("m");
  ctx.declareParamFn("chi");
  return ctx;
}

}  // namespace covham::testing
