#include "covham/expr.hpp"

#include <algorithm>

namespace covham {

namespace {

int cmpNameStr(Sym a, Sym b) {
  if (a == b) return 0;
  if (a == kNoSym) return -1;
  if (b == kNoSym) return 1;
  const std::string& sa = Names::str(a);
  const std::string& sb = Names::str(b);
  return sa.compare(sb);
}

int cmpIndex(const Index& a, const Index& b) {
  if (a.space != b.space) return int(a.space) - int(b.space);
  if (a.concrete() != b.concrete()) return a.concrete() ? -1 : 1;
  if (a.concrete()) {
    if (a.value != b.value) return a.value < b.value ? -1 : 1;
  } else {
    if (int c = cmpNameStr(a.name, b.name)) return c;
  }
  if (a.up != b.up) return a.up ? -1 : 1;
  return 0;
}

int cmpIndexVec(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i)
    if (int c = cmpIndex(a[i], b[i])) return c;
  return 0;
}

}  // namespace

int cmpAtom(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return int(a.kind) - int(b.kind);
  if (int c = cmpNameStr(a.symbol, b.symbol)) return c;
  if (a.conj != b.conj) return a.conj ? 1 : -1;
  if (a.primed != b.primed) return a.primed ? 1 : -1;
  if (a.fnder.size() != b.fnder.size()) return a.fnder.size() < b.fnder.size() ? -1 : 1;
  for (size_t i = 0; i < a.fnder.size(); ++i)
    if (int c = cmpNameStr(a.fnder[i], b.fnder[i])) return c;
  if (a.der.size() != b.der.size()) return a.der.size() < b.der.size() ? -1 : 1;
  if (int c = cmpIndexVec(a.der, b.der)) return c;
  if (int c = cmpIndexVec(a.idx, b.idx)) return c;
  bool ea = a.exponent != nullptr, eb = b.exponent != nullptr;
  if (ea != eb) return ea ? 1 : -1;
  if (ea)
    if (int c = cmpExpr(*a.exponent, *b.exponent)) return c;
  return 0;
}

bool operator==(const Atom& a, const Atom& b) { return cmpAtom(a, b) == 0; }

int cmpMonomialBody(const Monomial& a, const Monomial& b) {
  if (a.chain.size() != b.chain.size()) return a.chain.size() < b.chain.size() ? -1 : 1;
  for (size_t i = 0; i < a.chain.size(); ++i)
    if (int c = cmpAtom(a.chain[i], b.chain[i])) return c;
  if (a.fac.size() != b.fac.size()) return a.fac.size() < b.fac.size() ? -1 : 1;
  for (size_t i = 0; i < a.fac.size(); ++i) {
    if (int c = cmpAtom(a.fac[i].first, b.fac[i].first)) return c;
    if (a.fac[i].second != b.fac[i].second) return a.fac[i].second < b.fac[i].second ? -1 : 1;
  }
  return 0;
}

int cmpExpr(const Expr& a, const Expr& b) {
  if (a.mono.size() != b.mono.size()) return a.mono.size() < b.mono.size() ? -1 : 1;
  for (size_t i = 0; i < a.mono.size(); ++i) {
    if (int c = cmpMonomialBody(a.mono[i], b.mono[i])) return c;
    const Q &ca = a.mono[i].coef, &cb = b.mono[i].coef;
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) { return cmpExpr(a, b) == 0; }

Expr operator+(const Expr& a, const Expr& b) {
  Expr out = a;
  out.mono.insert(out.mono.end(), b.mono.begin(), b.mono.end());
  return out;
}

Expr operator-(const Expr& a) {
  Expr out = a;
  for (auto& m : out.mono) m.coef = -m.coef;
  return out;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  out.mono.reserve(a.mono.size() * b.mono.size());
  for (const auto& ma : a.mono)
    for (const auto& mb : b.mono) {
      Monomial m;
      m.coef = ma.coef * mb.coef;
      m.fac = ma.fac;
      m.fac.insert(m.fac.end(), mb.fac.begin(), mb.fac.end());
      m.chain = ma.chain;
      m.chain.insert(m.chain.end(), mb.chain.begin(), mb.chain.end());
      out.mono.push_back(std::move(m));
    }
  return out;
}

Expr operator*(Q c, const Expr& a) {
  if (c.isZero()) return zero();
  Expr out = a;
  for (auto& m : out.mono) m.coef = c * m.coef;
  return out;
}

Expr powi(const Expr& a, int n) {
  if (n < 0) throw std::runtime_error("negative power of a compound expression");
  Expr out = one();
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

Atom paramAtom(Sym s) {
  Atom a;
  a.kind = AtomKind::Param;
  a.symbol = s;
  return a;
}

Atom coordAtom(Index mu) {
  Atom a;
  a.kind = AtomKind::Coord;
  a.symbol = sym("x");
  a.idx = {mu};
  return a;
}

Atom fieldAtom(Sym s, std::vector<Index> slots, bool conj, bool primed) {
  Atom a;
  a.kind = AtomKind::Field;
  a.symbol = s;
  a.idx = std::move(slots);
  a.conj = conj;
  a.primed = primed;
  return a;
}

Atom momentumAtom(Sym field, std::vector<Index> slotsAndDir, bool conj, bool primed) {
  Atom a;
  a.kind = AtomKind::Momentum;
  a.symbol = field;
  a.idx = std::move(slotsAndDir);
  a.conj = conj;
  a.primed = primed;
  return a;
}

Atom paramFnAtom(Sym s, std::vector<Index> slots) {
  Atom a;
  a.kind = AtomKind::ParamFn;
  a.symbol = s;
  a.idx = std::move(slots);
  return a;
}

Atom deltaAtom(Index a_, Index b_) {
  Atom a;
  a.kind = AtomKind::Delta;
  a.symbol = sym("delta");
  a.idx = {a_, b_};
  return a;
}

Atom metricAtom(Index a_, Index b_) {
  if (a_.space == IndexSpace::Spacetime && a_.up != b_.up) return deltaAtom(a_, b_);
  Atom a;
  a.kind = AtomKind::Metric;
  a.symbol = sym("g");
  a.idx = {a_, b_};
  return a;
}

Atom epsilonAtom(Index a_, Index b_, Index c_) {
  Atom a;
  a.kind = AtomKind::Epsilon;
  a.symbol = sym("eps");
  a.idx = {a_, b_, c_};
  return a;
}

Atom gammaAtom(Index mu) {
  Atom a;
  a.kind = AtomKind::Gamma;
  a.symbol = sym("gamma");
  a.idx = {mu};
  return a;
}

Atom sigmaAtom(Index mu, Index nu) {
  Atom a;
  a.kind = AtomKind::SigmaMat;
  a.symbol = sym("sigma");
  a.idx = {mu, nu};
  return a;
}

Atom tauMatAtom(Index mu, Index nu) {
  Atom a;
  a.kind = AtomKind::TauMat;
  a.symbol = sym("taumat");
  a.idx = {mu, nu};
  return a;
}

Atom pauliAtom(Index a_) {
  Atom a;
  a.kind = AtomKind::Pauli;
  a.symbol = sym("pauli");
  a.idx = {a_};
  return a;
}

Atom unitMatAtom() {
  Atom a;
  a.kind = AtomKind::UnitMat;
  a.symbol = sym("one");
  return a;
}

Atom derivedAtom(Atom base, std::vector<Index> derivIdx) {
  base.der.insert(base.der.end(), derivIdx.begin(), derivIdx.end());
  return base;
}

Expr expPhase(const Expr& exponentExpr) {
  Atom a;
  a.kind = AtomKind::ExpPhase;
  a.symbol = sym("exp");
  a.exponent = std::make_shared<Expr>(exponentExpr);
  return fromAtom(a);
}

Expr conjugate(const Expr& e, const Context& ctx) {
  Expr out;
  for (const auto& m : e.mono) {
    if (!m.chain.empty())
      throw std::runtime_error("conjugate: non-commutative expressions unsupported");
    Monomial nm;
    nm.coef = m.coef.conj();
    for (auto [a, p] : m.fac) {
      switch (a.kind) {
        case AtomKind::Param:
        case AtomKind::Coord:
        case AtomKind::Delta:
        case AtomKind::Metric:
        case AtomKind::Epsilon:
          break;
        case AtomKind::ParamFn:
          if (!ctx.info(a.symbol).realValued) a.conj = !a.conj;
          break;
        case AtomKind::Field:
        case AtomKind::Momentum:
          if (ctx.info(a.symbol).cx == Complexity::Complex) a.conj = !a.conj;
          break;
        case AtomKind::ExpPhase:
          a.exponent = std::make_shared<Expr>(conjugate(*a.exponent, ctx));
          break;
        default:
          throw std::runtime_error("conjugate: unsupported atom");
      }
      nm.fac.push_back({std::move(a), p});
    }
    out.mono.push_back(std::move(nm));
  }
  return out;
}

namespace {
template <typename Fn>
void mapIndices(Atom& a, Fn fn) {
  for (auto& i : a.idx) fn(i);
  for (auto& i : a.der) fn(i);
  if (a.exponent) {
    Expr e = *a.exponent;
    for (auto& m : e.mono) {
      for (auto& [fa, p] : m.fac) mapIndices(fa, fn);
      for (auto& ca : m.chain) mapIndices(ca, fn);
    }
    a.exponent = std::make_shared<Expr>(std::move(e));
  }
}

template <typename Fn>
Expr mapExprIndices(const Expr& e, Fn fn) {
  Expr out = e;
  for (auto& m : out.mono) {
    for (auto& [a, p] : m.fac) mapIndices(a, fn);
    for (auto& a : m.chain) mapIndices(a, fn);
  }
  return out;
}
}  // namespace

Expr renameIndexName(const Expr& e, Sym from, Sym to) {
  return mapExprIndices(e, [&](Index& i) {
    if (!i.concrete() && i.name == from) i.name = to;
  });
}

Expr instantiateIndex(const Expr& e, Sym name, int value) {
  return mapExprIndices(e, [&](Index& i) {
    if (!i.concrete() && i.name == name) {
      i.name = kNoSym;
      i.value = int8_t(value);
    }
  });
}

}  // namespace covham
