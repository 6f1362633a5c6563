#include "covham/calculus.hpp"

#include <algorithm>
#include <sstream>

namespace covham {

namespace {

// Match factor atoms that denote the same variable family as `wrt`.
bool familyMatch(const Atom& a, const Atom& wrt) {
  return a.kind == wrt.kind && a.symbol == wrt.symbol && a.conj == wrt.conj &&
         a.primed == wrt.primed && a.der.size() == wrt.der.size() &&
         a.fnder == wrt.fnder && a.idx.size() == wrt.idx.size();
}

// Derivative of one slot pairing: d(atom index ia) / d(wrt index iw).
// Returns nullopt for "term vanishes" (mismatched concretes).
std::optional<Atom> slotFactor(const Index& ia, const Index& iw, bool& trivial) {
  if (ia.concrete() && iw.concrete()) {
    if (ia.space == IndexSpace::Spacetime && ia.up != iw.up) {
      // d x_a / d x^b for concrete a,b: metric entry
      if (ia.value != iw.value) return std::nullopt;
      trivial = true;
      Atom g = metricAtom(ia, flip(iw));
      return g;  // evaluates to +-1 in normalize
    }
    if (ia.value != iw.value) return std::nullopt;
    trivial = true;
    return std::nullopt;  // factor 1
  }
  if (ia.space != IndexSpace::Spacetime)
    return deltaAtom(ia, iw);
  return metricAtom(ia, flip(iw));  // becomes a delta when variances match
}

}  // namespace

Expr differentiate(const Expr& e, const Atom& wrt, const Context& ctx) {
  // reject differentiation by an index name bound inside e
  for (auto& m : e.mono) {
    for (auto& wi : wrt.idx)
      if (!wi.concrete()) {
        int count = 0;
        auto scan = [&](const Atom& a) {
          for (auto& i : a.idx) count += (!i.concrete() && i.name == wi.name);
          for (auto& i : a.der) count += (!i.concrete() && i.name == wi.name);
        };
        for (auto& [a, p] : m.fac) scan(a);
        for (auto& a : m.chain) scan(a);
        if (count >= 2)
          throw DerivError("derivative index '" + Names::str(wi.name) +
                           "' is bound inside the expression");
      }
  }

  Expr out = zero();
  for (const auto& m : e.mono) {
    // commutative factors
    for (size_t k = 0; k < m.fac.size(); ++k) {
      const auto& [a, p] = m.fac[k];
      if (!familyMatch(a, wrt)) continue;
      Monomial term;
      term.coef = m.coef * Q(p);
      bool dead = false;
      auto pushSlots = [&](const std::vector<Index>& ai, const std::vector<Index>& wi) {
        for (size_t j = 0; j < ai.size() && !dead; ++j) {
          bool trivial = false;
          auto f = slotFactor(ai[j], wi[j], trivial);
          if (!f && !trivial) { dead = true; return; }
          if (f) term.fac.push_back({*f, 1});
        }
      };
      pushSlots(a.idx, wrt.idx);
      pushSlots(a.der, wrt.der);
      if (dead) continue;
      for (size_t j = 0; j < m.fac.size(); ++j) {
        if (j == k) {
          if (p > 1) term.fac.push_back({a, p - 1});
          continue;
        }
        term.fac.push_back(m.fac[j]);
      }
      term.chain = m.chain;
      out.mono.push_back(std::move(term));
    }
    // chain occurrences: row atoms open a run, column atoms close one
    for (size_t k = 0; k < m.chain.size(); ++k) {
      const Atom& a = m.chain[k];
      if (!familyMatch(a, wrt)) continue;
      int r, c;
      atomShapeDims(ctx, a, r, c);
      if (!(r == 1 || c == 1))
        throw DerivError("cannot differentiate by an interior non-commutative factor");
      Monomial term;
      term.coef = m.coef;
      bool dead = false;
      auto pushSlots = [&](const std::vector<Index>& ai, const std::vector<Index>& wi) {
        for (size_t j = 0; j < ai.size() && !dead; ++j) {
          bool trivial = false;
          auto f = slotFactor(ai[j], wi[j], trivial);
          if (!f && !trivial) { dead = true; return; }
          if (f) term.fac.push_back({*f, 1});
        }
      };
      pushSlots(a.idx, wrt.idx);
      pushSlots(a.der, wrt.der);
      if (dead) continue;
      term.fac.insert(term.fac.end(), m.fac.begin(), m.fac.end());
      term.chain = m.chain;
      term.chain.erase(term.chain.begin() + k);
      out.mono.push_back(std::move(term));
    }
  }
  return normalize(out, ctx);
}

namespace {

enum class DerivMode { Total, Explicit };

Expr derivativeImpl(const Expr& e, Index mu, const Context& ctx, DerivMode mode) {
  Expr out = zero();
  for (const auto& m : e.mono) {
    // factor positions
    for (size_t k = 0; k < m.fac.size(); ++k) {
      const auto& [a, p] = m.fac[k];
      std::vector<Monomial> pieces;
      auto baseTerm = [&]() {
        Monomial t;
        t.coef = m.coef * Q(p);
        for (size_t j = 0; j < m.fac.size(); ++j) {
          if (j == k) {
            if (p > 1) t.fac.push_back({a, p - 1});
            continue;
          }
          t.fac.push_back(m.fac[j]);
        }
        t.chain = m.chain;
        return t;
      };
      switch (a.kind) {
        case AtomKind::Param:
        case AtomKind::Delta:
        case AtomKind::Metric:
        case AtomKind::Epsilon:
          break;
        case AtomKind::Coord: {
          Monomial t = baseTerm();
          t.fac.push_back({metricAtom(a.idx[0], mu), 1});
          pieces.push_back(std::move(t));
          break;
        }
        case AtomKind::Field:
        case AtomKind::Momentum: {
          if (mode == DerivMode::Explicit) break;
          Monomial t = baseTerm();
          Atom da = a;
          da.der.push_back(mu);
          t.fac.push_back({da, 1});
          pieces.push_back(std::move(t));
          break;
        }
        case AtomKind::ParamFn: {
          const SymbolInfo& si = ctx.info(a.symbol);
          if (si.xdep) {
            Monomial t = baseTerm();
            Atom da = a;
            da.der.push_back(mu);
            t.fac.push_back({da, 1});
            pieces.push_back(std::move(t));
          }
          if (mode == DerivMode::Total) {
            for (Sym dep : si.fndeps) {
              const SymbolInfo& di = ctx.info(dep);
              Monomial t = baseTerm();
              Atom fd = a;
              fd.fnder.push_back(dep);
              std::sort(fd.fnder.begin(), fd.fnder.end());
              Atom dfield = fieldAtom(dep);
              dfield.der.push_back(mu);
              if (di.shape == NcShape::Scalar) {
                t.fac.push_back({fd, 1});
                t.fac.push_back({dfield, 1});
              } else if (di.shape == NcShape::Col) {
                t.chain.push_back(fd);      // row-shaped formal derivative
                t.chain.push_back(dfield);  // column
              } else {
                t.chain.push_back(dfield);  // row
                t.chain.push_back(fd);      // column-shaped formal derivative
              }
              pieces.push_back(std::move(t));
            }
          }
          break;
        }
        case AtomKind::ExpPhase: {
          Expr de = derivativeImpl(*a.exponent, mu, ctx, mode);
          for (const auto& dm : de.mono) {
            Monomial t;
            t.coef = m.coef * Q(p) * dm.coef;
            t.fac = m.fac;  // keep the phase itself (power unchanged)
            t.fac.insert(t.fac.end(), dm.fac.begin(), dm.fac.end());
            t.chain = m.chain;
            t.chain.insert(t.chain.end(), dm.chain.begin(), dm.chain.end());
            pieces.push_back(std::move(t));
          }
          break;
        }
        default:
          break;
      }
      for (auto& t : pieces) out.mono.push_back(std::move(t));
    }
    // chain positions
    for (size_t k = 0; k < m.chain.size(); ++k) {
      const Atom& a = m.chain[k];
      if (a.kind == AtomKind::Gamma || a.kind == AtomKind::Pauli ||
          a.kind == AtomKind::SigmaMat || a.kind == AtomKind::TauMat ||
          a.kind == AtomKind::UnitMat)
        continue;
      if (mode == DerivMode::Explicit &&
          !(a.kind == AtomKind::ParamFn && ctx.info(a.symbol).xdep))
        continue;
      if (a.kind == AtomKind::ParamFn && !ctx.info(a.symbol).xdep &&
          mode == DerivMode::Total && !ctx.info(a.symbol).fndeps.empty())
        throw DerivError("total derivative through a field-dependent chain function");
      Monomial t;
      t.coef = m.coef;
      t.fac = m.fac;
      t.chain = m.chain;
      t.chain[k].der.push_back(mu);
      out.mono.push_back(std::move(t));
    }
  }
  return normalize(out, ctx);
}

}  // namespace

Expr totalDerivative(const Expr& e, Index mu, const Context& ctx) {
  return derivativeImpl(e, mu, ctx, DerivMode::Total);
}

Expr explicitDerivative(const Expr& e, Index mu, const Context& ctx) {
  return derivativeImpl(e, mu, ctx, DerivMode::Explicit);
}

// ---------------- substitution ----------------

namespace {

struct MatchResult {
  bool matched = false;
  int extraDer = 0;                       // derivative orders to apply on top
  std::vector<Index> extraDerIdx;
  std::vector<std::pair<Sym, Index>> map; // pattern name -> target index
};

MatchResult matchAtom(const Atom& a, const Atom& pat) {
  MatchResult r;
  if (a.kind != pat.kind || a.symbol != pat.symbol || a.conj != pat.conj ||
      a.primed != pat.primed || a.fnder != pat.fnder)
    return r;
  if (a.idx.size() != pat.idx.size()) return r;
  if (pat.der.empty()) {
    r.extraDer = int(a.der.size());
    r.extraDerIdx = a.der;
  } else if (a.der.size() == pat.der.size()) {
    for (size_t i = 0; i < a.der.size(); ++i) {
      const Index &ia = a.der[i], &ip = pat.der[i];
      if (ip.concrete()) {
        if (!ia.concrete() || ia.value != ip.value || ia.up != ip.up) return r;
      } else {
        r.map.push_back({ip.name, ia});
      }
    }
  } else {
    return r;
  }
  for (size_t i = 0; i < a.idx.size(); ++i) {
    const Index &ia = a.idx[i], &ip = pat.idx[i];
    if (ip.concrete()) {
      if (!ia.concrete() || ia.value != ip.value ||
          (ia.space == IndexSpace::Spacetime && ia.up != ip.up))
        return r;
    } else {
      r.map.push_back({ip.name, ia});
    }
  }
  r.matched = true;
  return r;
}

// Remaps the replacement's free indices onto the matched occurrence, renames
// its dummies away from everything else, applies pending derivative indices.
Expr instantiateReplacement(const Expr& replacement, const MatchResult& mr,
                            const Context& ctx, int& freshCounter) {
  Expr r = replacement;
  // fresh-rename dummy (repeated) names to avoid capture
  std::map<Sym, int> counts;
  for (auto& m : r.mono) {
    std::map<Sym, int> local;
    auto scan = [&](const Atom& a) {
      for (auto& i : a.idx)
        if (!i.concrete()) local[i.name]++;
      for (auto& i : a.der)
        if (!i.concrete()) local[i.name]++;
    };
    for (auto& [a, p] : m.fac) scan(a);
    for (auto& a : m.chain) scan(a);
    for (auto& [n, c] : local) counts[n] = std::max(counts[n], c);
  }
  for (auto& [n, c] : counts)
    if (c >= 2) r = renameIndexName(r, n, sym("#s" + std::to_string(freshCounter++)));
  // map pattern names to the occurrence's indices
  for (auto& [name, target] : mr.map) {
    if (target.concrete()) {
      Expr next;
      for (auto& m : r.mono) {
        Monomial nm = m;
        bool bad = false;
        auto apply = [&](Atom& a) {
          for (auto& i : a.idx)
            if (!i.concrete() && i.name == name) {
              if (i.space == IndexSpace::Spacetime && i.up != target.up) {
                // occurrence lowered relative to pattern: apply metric sign
                nm.coef = nm.coef * Q(metricSign(target.value));
              }
              i = target;
            }
          for (auto& i : a.der)
            if (!i.concrete() && i.name == name) {
              if (i.space == IndexSpace::Spacetime && i.up != target.up)
                nm.coef = nm.coef * Q(metricSign(target.value));
              i = target;
            }
        };
        for (auto& [a, p] : nm.fac) apply(a);
        for (auto& a : nm.chain) apply(a);
        if (!bad) next.mono.push_back(std::move(nm));
      }
      r = next;
    } else {
      // symbolic: rename, adopting the occurrence's variance
      Expr next;
      for (auto& m : r.mono) {
        Monomial nm = m;
        auto apply = [&](Atom& a) {
          for (auto& i : a.idx)
            if (!i.concrete() && i.name == name) i = target;
          for (auto& i : a.der)
            if (!i.concrete() && i.name == name) i = target;
        };
        for (auto& [a, p] : nm.fac) apply(a);
        for (auto& a : nm.chain) apply(a);
        next.mono.push_back(std::move(nm));
      }
      r = next;
    }
  }
  for (int d = 0; d < mr.extraDer; ++d) r = totalDerivative(r, mr.extraDerIdx[d], ctx);
  return r;
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& subst, const Context& ctx) {
  int freshCounter = 0;
  Expr out = zero();
  for (const auto& m : e.mono) {
    // pieces: scalar Expr product with ordered chain handling
    Expr acc = constant(m.coef);
    bool dead = false;
    for (const auto& [a, p] : m.fac) {
      Expr piece = zero();
      bool replaced = false;
      for (const auto& [pat, rep] : subst.rules) {
        MatchResult mr = matchAtom(a, pat);
        if (!mr.matched) continue;
        Expr inst = instantiateReplacement(rep, mr, ctx, freshCounter);
        piece = powi(inst, p);
        replaced = true;
        break;
      }
      if (!replaced) {
        Monomial mm;
        mm.fac.push_back({a, p});
        piece = Expr{{mm}};
      }
      if (piece.isZero()) { dead = true; break; }
      acc = acc * piece;
    }
    if (dead) continue;
    // chain: substitute atom-by-atom, splicing replacement chains in place
    Expr chainAcc = one();
    for (const auto& a : m.chain) {
      Expr piece = zero();
      bool replaced = false;
      for (const auto& [pat, rep] : subst.rules) {
        MatchResult mr = matchAtom(a, pat);
        if (!mr.matched) continue;
        piece = instantiateReplacement(rep, mr, ctx, freshCounter);
        replaced = true;
        break;
      }
      if (!replaced) piece = fromChainAtom(a);
      chainAcc = chainAcc * piece;  // multiplication preserves chain order
    }
    acc = acc * chainAcc;
    out = out + acc;
  }
  return normalize(out, ctx);
}

// ---------------- numeric evaluation ----------------

std::string bindingKey(const Atom& a, const Context& ctx) {
  (void)ctx;
  std::ostringstream os;
  os << int(a.kind) << ":" << (a.symbol == kNoSym ? "" : Names::str(a.symbol));
  if (a.conj) os << "*";
  if (a.primed) os << "'";
  for (auto s : a.fnder) os << ";" << Names::str(s);
  os << "[";
  for (auto& i : a.der) os << "d" << int(i.value) << ",";
  for (auto& i : a.idx) os << int(i.value) << ",";
  os << "]";
  return os.str();
}

namespace {

MatX pauliMatrix(int a) {
  MatX m(2, 2);
  using namespace std::complex_literals;
  switch (a) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, Cx(0, -1), Cx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

MatX diracGamma(int mu, bool upVariance) {
  MatX m = MatX::Zero(4, 4);
  if (mu == 0) {
    m(0, 0) = 1; m(1, 1) = 1; m(2, 2) = -1; m(3, 3) = -1;
  } else {
    MatX s = pauliMatrix(mu - 1);
    m.block(0, 2, 2, 2) = s;
    m.block(2, 0, 2, 2) = -s;
  }
  if (!upVariance && mu != 0) m = -m;
  return m;
}

struct Evaluator {
  const Bindings& b;
  const Context& ctx;

  Cx signAdjustedScalar(const Atom& a) const {
    Atom nat = a;
    double sign = 1.0;
    auto naturalize = [&](Index& i, bool naturalUp) {
      if (i.space == IndexSpace::Spacetime && i.up != naturalUp) {
        sign *= metricSign(i.value);
        i.up = naturalUp;
      }
    };
    if (a.kind == AtomKind::Field || a.kind == AtomKind::Momentum) {
      const SymbolInfo& si = ctx.info(a.symbol);
      for (size_t k = 0; k < nat.idx.size(); ++k) {
        bool natUp = false;
        if (a.kind == AtomKind::Momentum && k == nat.idx.size() - 1)
          natUp = true;  // direction slot
        else if (k < si.slots.size())
          natUp = si.slots[k].second;
        naturalize(nat.idx[k], natUp);
      }
    } else if (a.kind == AtomKind::ParamFn) {
      const SymbolInfo& si = ctx.info(a.symbol);
      for (size_t k = 0; k < nat.idx.size() && k < si.slots.size(); ++k)
        naturalize(nat.idx[k], si.slots[k].second);
    }
    for (auto& i : nat.der) naturalize(i, false);
    auto it = b.scalars.find(bindingKey(nat, ctx));
    if (it == b.scalars.end())
      throw EvalError("unbound atom: " + bindingKey(nat, ctx));
    return sign * it->second;
  }

  EvalValue atomValue(const Atom& a) const {
    switch (a.kind) {
      case AtomKind::Param: {
        auto it = b.params.find(a.symbol);
        if (it == b.params.end())
          throw EvalError("unbound parameter: " + Names::str(a.symbol));
        return EvalValue::of(it->second);
      }
      case AtomKind::Coord: {
        Cx v = b.coord[a.idx[0].value];
        if (!a.idx[0].up) v *= double(metricSign(a.idx[0].value));
        return EvalValue::of(v);
      }
      case AtomKind::Delta:
        return EvalValue::of(Cx(a.idx[0].value == a.idx[1].value ? 1.0 : 0.0));
      case AtomKind::Metric: {
        double v = 0;
        if (a.idx[0].value == a.idx[1].value)
          v = a.idx[0].space == IndexSpace::Spacetime ? metricSign(a.idx[0].value) : 1;
        return EvalValue::of(Cx(v));
      }
      case AtomKind::Epsilon: {
        int x = a.idx[0].value, y = a.idx[1].value, z = a.idx[2].value;
        int s = (y - x) * (z - x) * (z - y);
        return EvalValue::of(Cx(s > 0 ? 1.0 : s < 0 ? -1.0 : 0.0));
      }
      case AtomKind::ExpPhase: {
        EvalValue inner = evalExpr(*a.exponent);
        if (!inner.scalar) throw EvalError("matrix exponent");
        return EvalValue::of(std::exp(inner.s));
      }
      case AtomKind::Gamma:
        if (!a.der.empty()) throw EvalError("derivative of a constant matrix");
        return EvalValue::of(diracGamma(a.idx[0].value, a.idx[0].up));
      case AtomKind::Pauli:
        return EvalValue::of(pauliMatrix(a.idx[0].value));
      case AtomKind::UnitMat:
        return EvalValue::of(Cx(1.0));  // dropped by normalize anyway
      case AtomKind::SigmaMat: {
        MatX g1 = diracGamma(a.idx[0].value, a.idx[0].up);
        MatX g2 = diracGamma(a.idx[1].value, a.idx[1].up);
        return EvalValue::of(MatX(Cx(0, 0.5) * (g1 * g2 - g2 * g1)));
      }
      case AtomKind::TauMat: {
        // tau_{ab} = (2/3) i g_{ab} - (1/3) sigma_{ab}
        MatX g1 = diracGamma(a.idx[0].value, a.idx[0].up);
        MatX g2 = diracGamma(a.idx[1].value, a.idx[1].up);
        MatX sig = Cx(0, 0.5) * (g1 * g2 - g2 * g1);
        double gv = 0;
        if (a.idx[0].value == a.idx[1].value) {
          gv = metricSign(a.idx[0].value);
          if (a.idx[0].up != a.idx[1].up) gv = 1;
        }
        MatX out = Cx(0, 2.0 / 3.0) * gv * MatX::Identity(4, 4) - (1.0 / 3.0) * sig;
        return EvalValue::of(out);
      }
      case AtomKind::Field:
      case AtomKind::Momentum:
      case AtomKind::ParamFn: {
        const SymbolInfo& si = ctx.info(a.symbol);
        if (si.shape != NcShape::Scalar) {
          Atom nat = a;
          for (auto& i : nat.der)
            if (i.space == IndexSpace::Spacetime && !i.up) {
            }
          double sign = 1.0;
          for (auto& i : nat.der)
            if (i.space == IndexSpace::Spacetime && i.up) {
              sign *= metricSign(i.value);
              i.up = false;
            }
          for (size_t k = 0; k < nat.idx.size(); ++k) {
            bool natUp = a.kind == AtomKind::Momentum && k + 1 == nat.idx.size();
            if (nat.idx[k].space == IndexSpace::Spacetime && nat.idx[k].up != natUp) {
              sign *= metricSign(nat.idx[k].value);
              nat.idx[k].up = natUp;
            }
          }
          auto it = b.matrices.find(bindingKey(nat, ctx));
          if (it == b.matrices.end())
            throw EvalError("unbound atom: " + bindingKey(nat, ctx));
          return EvalValue::of(MatX(sign * it->second));
        }
        return EvalValue::of(signAdjustedScalar(a));
      }
    }
    throw EvalError("unsupported atom in evaluation");
  }

  EvalValue evalMonomial(const Monomial& m) const {
    Cx scalar(m.coef.re.toDouble(), m.coef.im.toDouble());
    for (auto& [a, p] : m.fac) {
      EvalValue v = atomValue(a);
      if (!v.scalar) throw EvalError("matrix value in commutative factor");
      Cx val = v.s;
      if (p < 0) {
        if (val == Cx(0.0)) throw EvalError("division by zero parameter");
        val = 1.0 / val;
        for (int i = 1; i < -p; ++i) val *= 1.0 / v.s;
      } else {
        Cx acc = 1.0;
        for (int i = 0; i < p; ++i) acc *= val;
        val = acc;
      }
      scalar *= val;
    }
    if (m.chain.empty()) return EvalValue::of(scalar);
    bool haveMat = false;
    MatX acc;
    for (auto& a : m.chain) {
      EvalValue v = atomValue(a);
      MatX mv;
      if (v.scalar)
        mv = v.s * MatX::Identity(acc.rows() ? acc.cols() : 1, acc.rows() ? acc.cols() : 1);
      else
        mv = v.m;
      if (!haveMat) {
        acc = mv;
        haveMat = true;
      } else {
        if (acc.cols() != mv.rows()) {
          if (acc.cols() == 1 && acc.rows() == 1) {
            scalar *= acc(0, 0);
            acc = mv;
            continue;
          }
          throw EvalError("chain shape mismatch");
        }
        acc = acc * mv;
      }
    }
    if (acc.rows() == 1 && acc.cols() == 1) return EvalValue::of(scalar * acc(0, 0));
    return EvalValue::of(MatX(scalar * acc));
  }

  EvalValue evalExpr(const Expr& e) const {
    // expand the first symbolic (dummy) index found, summing over its range
    for (size_t mi = 0; mi < e.mono.size(); ++mi) {
      const Monomial& m = e.mono[mi];
      Sym found = kNoSym;
      IndexSpace sp = IndexSpace::Spacetime;
      auto scan = [&](const Atom& a) {
        for (auto& i : a.idx)
          if (!i.concrete() && found == kNoSym) { found = i.name; sp = i.space; }
        for (auto& i : a.der)
          if (!i.concrete() && found == kNoSym) { found = i.name; sp = i.space; }
      };
      for (auto& [a, p] : m.fac) scan(a);
      for (auto& a : m.chain) scan(a);
      if (found != kNoSym) {
        Expr self{{m}};
        EvalValue total = EvalValue::of(Cx(0.0));
        bool first = true;
        for (int v = 0; v < spaceDim(sp); ++v) {
          EvalValue part = evalExpr(instantiateIndex(self, found, v));
          if (first) { total = part; first = false; }
          else if (total.scalar && part.scalar) total.s += part.s;
          else if (!total.scalar && !part.scalar) total.m += part.m;
          else throw EvalError("mixed scalar/matrix sum");
        }
        Expr rest;
        for (size_t k = 0; k < e.mono.size(); ++k)
          if (k != mi) rest.mono.push_back(e.mono[k]);
        EvalValue rv = evalExpr(rest);
        if (total.scalar && rv.scalar) return EvalValue::of(total.s + rv.s);
        if (!total.scalar && !rv.scalar) return EvalValue::of(MatX(total.m + rv.m));
        if (!total.scalar && rv.scalar && rv.s == Cx(0.0)) return total;
        if (total.scalar && !rv.scalar && total.s == Cx(0.0)) return rv;
        throw EvalError("mixed scalar/matrix sum");
      }
    }
    EvalValue acc = EvalValue::of(Cx(0.0));
    bool first = true;
    for (auto& m : e.mono) {
      EvalValue v = evalMonomial(m);
      if (first) { acc = v; first = false; }
      else if (acc.scalar && v.scalar) acc.s += v.s;
      else if (!acc.scalar && !v.scalar) acc.m += v.m;
      else if (!acc.scalar && v.scalar && v.s == Cx(0.0)) {}
      else if (acc.scalar && !v.scalar && acc.s == Cx(0.0)) acc = v;
      else throw EvalError("mixed scalar/matrix sum");
    }
    return acc;
  }
};

}  // namespace

EvalValue evaluateValue(const Expr& e, const Bindings& b, const Context& ctx) {
  Evaluator ev{b, ctx};
  return ev.evalExpr(e);
}

Cx evaluate(const Expr& e, const Bindings& b, const Context& ctx) {
  EvalValue v = evaluateValue(e, b, ctx);
  if (!v.scalar) throw EvalError("expression evaluates to a matrix");
  return v.s;
}

}  // namespace covham
