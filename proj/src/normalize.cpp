#include "covham/normalize.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace covham {

namespace {

constexpr int kMaxRewriteSteps = 20000;
constexpr int kMaxDummyPasses = 10;

std::string idxStr(const Index& i) {
  if (i.concrete()) return std::to_string(int(i.value));
  return Names::str(i.name);
}

// ---------- occurrence scanning ----------

struct Occurrence {
  int atomPos;   // position in a flattened atom list
  int slot;      // slot index; der slots offset by 100
  bool up;
};

// Flattened view of a monomial's atoms: chain atoms first, then factors
// (each power counted once for index purposes; powers >1 with symbolic
// indices are rejected by validation).
struct AtomRef {
  Atom* atom;
  bool inChain;
  int pow;
};

std::vector<AtomRef> flatten(Monomial& m) {
  std::vector<AtomRef> out;
  for (auto& a : m.chain) out.push_back({&a, true, 1});
  for (auto& [a, p] : m.fac) out.push_back({&a, false, p});
  return out;
}

std::map<Sym, std::vector<Occurrence>> occurrences(std::vector<AtomRef>& atoms) {
  std::map<Sym, std::vector<Occurrence>> occ;
  for (int ai = 0; ai < (int)atoms.size(); ++ai) {
    Atom& a = *atoms[ai].atom;
    for (int k = 0; k < (int)a.idx.size(); ++k)
      if (!a.idx[k].concrete())
        for (int rep = 0; rep < atoms[ai].pow; ++rep)
          occ[a.idx[k].name].push_back({ai, k, a.idx[k].up});
    for (int k = 0; k < (int)a.der.size(); ++k)
      if (!a.der[k].concrete())
        for (int rep = 0; rep < atoms[ai].pow; ++rep)
          occ[a.der[k].name].push_back({ai, 100 + k, a.der[k].up});
  }
  return occ;
}

Index& slotOf(Atom& a, int slot) {
  return slot >= 100 ? a.der[slot - 100] : a.idx[slot];
}

IndexSpace spaceOfName(std::vector<AtomRef>& atoms, const Occurrence& o) {
  return slotOf(*atoms[o.atomPos].atom, o.slot).space;
}

void validateMonomial(Monomial& m) {
  auto atoms = flatten(m);
  auto occ = occurrences(atoms);
  for (auto& [name, os] : occ) {
    if (os.size() > 2)
      throw IndexError("index '" + Names::str(name) + "' appears " +
                       std::to_string(os.size()) + " times in one term");
    IndexSpace sp = spaceOfName(atoms, os[0]);
    if (os.size() == 2 && sp == IndexSpace::Spacetime && os[0].up == os[1].up)
      throw IndexError("repeated index '" + Names::str(name) +
                       "' must appear once raised and once lowered");
  }
}

// ---------- structural simplification of factors ----------

struct WorkItem {
  Monomial m;
};

class Normalizer {
public:
  Normalizer(const Context& ctx) : ctx_(ctx) {}

  Expr run(const Expr& e) {
    for (const auto& m : e.mono) queue_.push_back({m});
    while (!queue_.empty()) {
      if (++steps_ > kMaxRewriteSteps) throw RewriteFuelError();
      Monomial m = std::move(queue_.front().m);
      queue_.pop_front();
      process(std::move(m));
    }
    return assemble();
  }

private:
  const Context& ctx_;
  std::deque<WorkItem> queue_;
  std::vector<Monomial> done_;
  int steps_ = 0;

  void emitSplit(std::vector<Monomial> ms) {
    for (auto& m : ms) queue_.push_back({std::move(m)});
  }

  void process(Monomial m) {
    if (m.coef.isZero()) return;
    validateMonomial(m);
    normalizeInternalVariance(m);

    // Structural pass: repeats until no rule fires or the monomial splits.
    bool splitHappened = false;
    for (;;) {
      if (++steps_ > kMaxRewriteSteps) throw RewriteFuelError();
      if (m.coef.isZero()) return;
      if (expandPowerAtoms(m)) continue;
      if (evalConcreteTensors(m)) continue;
      if (expandPartialEpsilon(m)) continue;
      if (sortSymmetrySlots(m)) continue;
      if (absorbContractions(m)) continue;
      if (mergeExpPhases(m)) continue;
      if (dropUnitMatrices(m)) continue;
      if (expandSigmaTau(m, splitHappened)) break;
      if (reduceGammaChain(m, splitHappened)) break;
      if (reducePauliChain(m, splitHappened)) break;
      break;
    }
    if (splitHappened) return;  // children queued
    if (m.coef.isZero()) return;
    if (nilpotentVanishes(m)) return;
    canonicalizeNames(m);
    mergeEqualFactors(m);
    done_.push_back(std::move(m));
  }

  // Internal (e.g. SU(2)) indices carry no variance: normalize to lowered.
  void normalizeInternalVariance(Monomial& m) {
    auto atoms = flatten(m);
    for (auto& ar : atoms) {
      for (auto& i : ar.atom->idx)
        if (i.space == IndexSpace::Internal) i.up = false;
      for (auto& i : ar.atom->der)
        if (i.space == IndexSpace::Internal) i.up = false;
    }
  }

  // (atom with compound exponent handling is done in builders; here only
  // negative/zero powers) -- merge duplicate factor entries.
  bool expandPowerAtoms(Monomial& m) {
    bool changed = false;
    std::vector<std::pair<Atom, int>> out;
    for (auto& [a, p] : m.fac) {
      if (p == 0) { changed = true; continue; }
      bool merged = false;
      for (auto& [oa, op] : out)
        if (oa == a) {
          op += p;
          merged = true;
          changed = true;
          break;
        }
      if (!merged) out.push_back({a, p});
    }
    std::vector<std::pair<Atom, int>> out2;
    for (auto& e : out) {
      if (e.second == 0) { changed = true; continue; }
      out2.push_back(e);
    }
    if (changed) m.fac = std::move(out2);
    return changed;
  }

  bool evalConcreteTensors(Monomial& m) {
    for (size_t i = 0; i < m.fac.size(); ++i) {
      Atom& a = m.fac[i].first;
      if (a.kind == AtomKind::Delta && a.idx[0].concrete() && a.idx[1].concrete()) {
        m.coef = m.coef * Q(a.idx[0].value == a.idx[1].value ? 1 : 0);
        m.fac.erase(m.fac.begin() + i);
        return true;
      }
      if (a.kind == AtomKind::Metric && a.idx[0].concrete() && a.idx[1].concrete()) {
        int v = 0;
        if (a.idx[0].value == a.idx[1].value)
          v = a.idx[0].space == IndexSpace::Spacetime ? metricSign(a.idx[0].value) : 1;
        m.coef = m.coef * Q(v);
        m.fac.erase(m.fac.begin() + i);
        return true;
      }
      if (a.kind == AtomKind::Epsilon && a.idx[0].concrete() && a.idx[1].concrete() &&
          a.idx[2].concrete()) {
        int x = a.idx[0].value, y = a.idx[1].value, z = a.idx[2].value;
        int s = (y - x) * (z - x) * (z - y);
        m.coef = m.coef * Q(s > 0 ? 1 : s < 0 ? -1 : 0);
        m.fac.erase(m.fac.begin() + i);
        return true;
      }
      // Trace delta / metric on itself.
      if ((a.kind == AtomKind::Delta || a.kind == AtomKind::Metric) &&
          !a.idx[0].concrete() && !a.idx[1].concrete() && a.idx[0].name == a.idx[1].name) {
        m.coef = m.coef * Q(spaceDim(a.idx[0].space));
        m.fac.erase(m.fac.begin() + i);
        return true;
      }
    }
    return false;
  }

  // Sorts slots of symmetric/antisymmetric atoms; kills eps/antisym repeats.
  bool sortSymmetrySlots(Monomial& m) {
    bool changed = false;
    auto atoms = flatten(m);
    for (auto& ar : atoms) {
      Atom& a = *ar.atom;
      // derivative index multiset is always symmetric
      if (a.der.size() > 1) {
        auto sorted = a.der;
        std::stable_sort(sorted.begin(), sorted.end(), [&](const Index& x, const Index& y) {
          return idxKeyLess(x, y);
        });
        if (sorted != a.der) { a.der = sorted; changed = true; }
      }
      if (a.kind == AtomKind::Metric || a.kind == AtomKind::Delta) {
        if (idxKeyLess(a.idx[1], a.idx[0])) { std::swap(a.idx[0], a.idx[1]); changed = true; }
      }
      if (a.kind == AtomKind::Epsilon) {
        for (int i = 0; i < 3; ++i)
          for (int j = i + 1; j < 3; ++j)
            if (sameName(a.idx[i], a.idx[j]) ||
                (a.idx[i].concrete() && a.idx[j].concrete() &&
                 a.idx[i].value == a.idx[j].value)) {
              m.coef = Q(0);
              return true;
            }
        for (int pass = 0; pass < 3; ++pass)
          for (int i = 0; i + 1 < 3; ++i)
            if (idxKeyLess(a.idx[i + 1], a.idx[i])) {
              std::swap(a.idx[i], a.idx[i + 1]);
              m.coef = -m.coef;
              changed = true;
            }
      }
      auto applyPair = [&](int s0, int s1, bool antisym) {
        if (s0 >= (int)a.idx.size() || s1 >= (int)a.idx.size()) return;
        Index &x = a.idx[s0], &y = a.idx[s1];
        if (antisym && x.concrete() && y.concrete() && x.value == y.value && x.up == y.up) {
          m.coef = Q(0);
          return;
        }
        if (idxKeyLess(y, x)) {
          std::swap(x, y);
          if (antisym) m.coef = -m.coef;
          changed = true;
        }
      };
      if (a.kind == AtomKind::Field || a.kind == AtomKind::Momentum) {
        const SymbolInfo& si = ctx_.info(a.symbol);
        if (a.kind == AtomKind::Momentum && si.momentumAntisym) {
          int s0 = int(a.idx.size()) - 2, s1 = int(a.idx.size()) - 1;
          // antisymmetric in (component slot, direction slot), spacetime pair
          if (s0 >= 0 && a.idx[s0].space == IndexSpace::Spacetime)
            applyPair(s0, s1, true);
        }
        if (si.antisymPair) applyPair(si.antisymPair->first, si.antisymPair->second, true);
        if (si.symPair) applyPair(si.symPair->first, si.symPair->second, false);
      }
      if (m.coef.isZero()) return true;
    }
    return changed;
  }

  static bool sameName(const Index& a, const Index& b) {
    return !a.concrete() && !b.concrete() && a.name == b.name;
  }

  // eps with two concrete slots fixes the value of a contracted third slot.
  bool expandPartialEpsilon(Monomial& m) {
    for (size_t fi = 0; fi < m.fac.size(); ++fi) {
      Atom& e = m.fac[fi].first;
      if (e.kind != AtomKind::Epsilon) continue;
      int symSlot = -1, nConcrete = 0;
      for (int s = 0; s < 3; ++s) {
        if (e.idx[s].concrete()) ++nConcrete;
        else symSlot = s;
      }
      if (nConcrete != 2) continue;
      Sym name = e.idx[symSlot].name;
      // only when the symbolic slot is a dummy (has a partner elsewhere)
      auto atoms = flatten(m);
      auto occ = occurrences(atoms);
      auto it = occ.find(name);
      if (it == occ.end() || it->second.size() != 2) continue;
      int a = e.idx[(symSlot + 1) % 3].value, b = e.idx[(symSlot + 2) % 3].value;
      int c = 3 - a - b;
      if (a == b || c < 0 || c > 2) { m.coef = Q(0); return true; }
      Index conc = e.idx[symSlot];
      conc.name = kNoSym;
      conc.value = int8_t(c);
      e.idx[symSlot] = conc;
      // instantiate the partner occurrence
      for (auto& ar : atoms) {
        Atom& pa = *ar.atom;
        if (&pa == &e) continue;
        for (auto& i : pa.idx)
          if (!i.concrete() && i.name == name) { i.name = kNoSym; i.value = int8_t(c); }
        for (auto& i : pa.der)
          if (!i.concrete() && i.name == name) { i.name = kNoSym; i.value = int8_t(c); }
      }
      return true;
    }
    return false;
  }

  // Deterministic index ordering used inside symmetric slots.
  static bool idxKeyLess(const Index& a, const Index& b) {
    if (a.concrete() != b.concrete()) return a.concrete();
    if (a.concrete()) {
      if (a.value != b.value) return a.value < b.value;
      return a.up && !b.up;
    }
    const std::string &sa = Names::str(a.name), &sb = Names::str(b.name);
    if (int c = sa.compare(sb)) return c < 0;
    return a.up && !b.up;
  }

  // Absorbs delta and metric factors contracted with any other slot.
  bool absorbContractions(Monomial& m) {
    for (size_t fi = 0; fi < m.fac.size(); ++fi) {
      Atom& d = m.fac[fi].first;
      if (d.kind != AtomKind::Delta && d.kind != AtomKind::Metric) continue;
      for (int side = 0; side < 2; ++side) {
        const Index& di = d.idx[side];
        if (di.concrete()) continue;
        // find the partner occurrence of di.name outside this delta factor
        auto atoms = flatten(m);
        for (auto& ar : atoms) {
          Atom& a = *ar.atom;
          if (&a == &d) continue;
          bool isDeltaLike = a.kind == AtomKind::Delta || a.kind == AtomKind::Metric;
          // prefer absorbing into non-delta atoms; but delta-delta also fine
          (void)isDeltaLike;
          auto tryAbsorb = [&](Index& slot) -> bool {
            if (slot.concrete() || slot.name != di.name) return false;
            bool contracted = slot.space != IndexSpace::Spacetime || slot.up != di.up;
            if (!contracted) return false;
            slot = d.idx[1 - side];
            return true;
          };
          bool hit = false;
          for (auto& s : a.idx)
            if (tryAbsorb(s)) { hit = true; break; }
          if (!hit)
            for (auto& s : a.der)
              if (tryAbsorb(s)) { hit = true; break; }
          if (hit) {
            m.fac.erase(m.fac.begin() + fi);
            return true;
          }
        }
      }
    }
    return false;
  }

  bool mergeExpPhases(Monomial& m) {
    int count = 0;
    for (auto& [a, p] : m.fac)
      if (a.kind == AtomKind::ExpPhase) ++count;
    if (count == 0) return false;
    Expr expo = zero();
    std::vector<std::pair<Atom, int>> rest;
    bool nontrivialPow = false;
    for (auto& [a, p] : m.fac) {
      if (a.kind == AtomKind::ExpPhase) {
        expo = expo + Q(p) * (*a.exponent);
        if (p != 1) nontrivialPow = true;
      } else {
        rest.push_back({a, p});
      }
    }
    Expr normExpo = normalize(expo, ctx_);
    if (count == 1 && !nontrivialPow) {
      // already merged; only re-normalize exponent if it changed
      for (auto& [a, p] : m.fac)
        if (a.kind == AtomKind::ExpPhase) {
          if (*a.exponent == normExpo) return false;
          a.exponent = std::make_shared<Expr>(normExpo);
          return true;
        }
    }
    m.fac = std::move(rest);
    if (!normExpo.isZero()) {
      Atom e;
      e.kind = AtomKind::ExpPhase;
      e.symbol = sym("exp");
      e.exponent = std::make_shared<Expr>(normExpo);
      m.fac.push_back({e, 1});
    }
    return true;
  }

  bool dropUnitMatrices(Monomial& m) {
    for (size_t i = 0; i < m.chain.size(); ++i)
      if (m.chain[i].kind == AtomKind::UnitMat) {
        m.chain.erase(m.chain.begin() + i);
        return true;
      }
    return false;
  }

  // sigma^{ab} = i (gamma^a gamma^b - g^{ab});  tau_{ab} = i g_{ab} - (i/3) gamma_a gamma_b
  bool expandSigmaTau(Monomial& m, bool& split) {
    for (size_t i = 0; i < m.chain.size(); ++i) {
      Atom a = m.chain[i];
      if (a.kind != AtomKind::SigmaMat && a.kind != AtomKind::TauMat) continue;
      Monomial g2 = m, gm = m;
      g2.chain[i] = gammaAtom(a.idx[1]);
      g2.chain.insert(g2.chain.begin() + i, gammaAtom(a.idx[0]));
      gm.chain.erase(gm.chain.begin() + i);
      gm.fac.push_back({metricAtom(a.idx[0], a.idx[1]), 1});
      if (a.kind == AtomKind::SigmaMat) {
        g2.coef = g2.coef * Q::I();
        gm.coef = gm.coef * (-Q::I());
      } else {
        g2.coef = g2.coef * (Q::I() * Q(Rat(-1, 3)));
        gm.coef = gm.coef * Q::I();
      }
      emitSplit({std::move(g2), std::move(gm)});
      split = true;
      return true;
    }
    return false;
  }

  // ---- gamma algebra ----

  struct GammaPos {
    int pos;  // position in chain
  };

  std::vector<int> gammaPositions(const Monomial& m) {
    std::vector<int> out;
    for (int i = 0; i < (int)m.chain.size(); ++i)
      if (m.chain[i].kind == AtomKind::Gamma) out.push_back(i);
    return out;
  }

  // Key used to normal-order gamma factors; independent of dummy naming.
  std::string gammaOrderKey(Monomial& m, int pos) {
    const Index& i = m.chain[pos].idx[0];
    if (i.concrete())
      return "0#" + std::to_string(int(i.value)) + (i.up ? "u" : "d");
    // count occurrences of the name
    auto atoms = flatten(m);
    auto occ = occurrences(atoms);
    auto it = occ.find(i.name);
    int n = it == occ.end() ? 0 : (int)it->second.size();
    if (n <= 1) return "1#" + Names::str(i.name);  // free index
    // dummy: find the partner atom (not this gamma occurrence)
    for (auto& o : it->second) {
      Atom& pa = *atoms[o.atomPos].atom;
      if (&pa == &m.chain[pos]) continue;
      std::ostringstream os;
      os << "2#" << int(pa.kind) << "#"
         << (pa.symbol == kNoSym ? "" : Names::str(pa.symbol)) << "#" << pa.conj
         << pa.primed << "#" << pa.der.size() << "#" << o.slot;
      return os.str();
    }
    return "3#";
  }

  // Applies {gamma^a, gamma^b} = 2 g^{ab} to swap chain positions p,p+1.
  void anticommute(Monomial m, int p, bool& split) {
    Monomial swapped = m, contracted = m;
    std::swap(swapped.chain[p], swapped.chain[p + 1]);
    swapped.coef = -swapped.coef;
    Index ia = m.chain[p].idx[0], ib = m.chain[p + 1].idx[0];
    contracted.chain.erase(contracted.chain.begin() + p, contracted.chain.begin() + p + 2);
    contracted.fac.push_back({metricAtom(ia, ib), 1});
    contracted.coef = contracted.coef * Q(2);
    emitSplit({std::move(swapped), std::move(contracted)});
    split = true;
  }

  bool reduceGammaChain(Monomial& m, bool& split) {
    auto gp = gammaPositions(m);
    if (gp.size() < 2) return false;

    // (1) adjacent directly-contracted or equal-concrete pairs
    for (size_t k = 0; k + 1 < gp.size(); ++k) {
      int p = gp[k], q = gp[k + 1];
      if (q != p + 1) continue;
      const Index& ia = m.chain[p].idx[0];
      const Index& ib = m.chain[q].idx[0];
      if (sameName(ia, ib)) {  // gamma^a gamma_a = 4
        m.chain.erase(m.chain.begin() + p, m.chain.begin() + q + 1);
        m.coef = m.coef * Q(4);
        queue_.push_back({std::move(m)});
        split = true;
        return true;
      }
      if (ia.concrete() && ib.concrete() && ia.value == ib.value) {
        // same component twice: gamma^v gamma^v = g^{vv}, mixed variance = 1
        int s = ia.up == ib.up ? metricSign(ia.value) : 1;
        m.chain.erase(m.chain.begin() + p, m.chain.begin() + q + 1);
        m.coef = m.coef * Q(s);
        queue_.push_back({std::move(m)});
        split = true;
        return true;
      }
    }

    // (2) non-adjacent contracted pair inside the gamma run: bubble together
    for (size_t k = 0; k < gp.size(); ++k)
      for (size_t l = k + 1; l < gp.size(); ++l) {
        const Index& ia = m.chain[gp[k]].idx[0];
        const Index& ib = m.chain[gp[l]].idx[0];
        bool pairUp = sameName(ia, ib) ||
                      (ia.concrete() && ib.concrete() && ia.value == ib.value);
        if (!pairUp) continue;
        if (gp[l] == gp[k] + 1) continue;  // handled above
        if (gp[l - 1] != gp[l] - 1) return false;  // non-gamma in between: stuck
        anticommute(std::move(m), gp[l] - 1, split);
        return true;
      }

    // (3) adjacent pair contracted into the same symmetric commutative slot pair
    for (size_t k = 0; k + 1 < gp.size(); ++k) {
      int p = gp[k], q = gp[k + 1];
      if (q != p + 1) continue;
      Index ia = m.chain[p].idx[0], ib = m.chain[q].idx[0];
      if (ia.concrete() || ib.concrete()) continue;
      for (auto& [fa, pw] : m.fac) {
        int sa = -1, sb = -1;
        for (int s = 0; s < (int)fa.der.size(); ++s) {
          if (sameName(fa.der[s], ia)) sa = s;
          if (sameName(fa.der[s], ib)) sb = s;
        }
        // derivative multiset is symmetric
        if (sa >= 0 && sb >= 0 && sa != sb) {
          Monomial next = m;
          next.chain.erase(next.chain.begin() + p, next.chain.begin() + q + 1);
          for (auto& [fa2, pw2] : next.fac)
            if (fa2 == fa) {
              fa2.der[sb] = ia;  // contract: pair (flip(ia), ia) traces inside atom
              break;
            }
          queue_.push_back({std::move(next)});
          split = true;
          return true;
        }
        const SymbolInfo* si =
            ctx_.known(fa.symbol) ? &ctx_.info(fa.symbol) : nullptr;
        if (si && si->symPair) {
          int s0 = si->symPair->first, s1 = si->symPair->second;
          if (s0 < (int)fa.idx.size() && s1 < (int)fa.idx.size()) {
            bool match = (sameName(fa.idx[s0], ia) && sameName(fa.idx[s1], ib)) ||
                         (sameName(fa.idx[s0], ib) && sameName(fa.idx[s1], ia));
            if (match) {
              Monomial next = m;
              next.chain.erase(next.chain.begin() + p, next.chain.begin() + q + 1);
              for (auto& [fa2, pw2] : next.fac)
                if (fa2 == fa) {
                  // set the slot holding ib's partner to ia's name at gamma-a variance
                  int slotB = sameName(fa2.idx[s0], ib) ? s0 : s1;
                  fa2.idx[slotB] = ia;
                  break;
                }
              queue_.push_back({std::move(next)});
              split = true;
              return true;
            }
          }
        }
      }
    }

    // (4) normal-order adjacent gammas that are strictly out of order
    for (size_t k = 0; k + 1 < gp.size(); ++k) {
      int p = gp[k], q = gp[k + 1];
      if (q != p + 1) continue;
      std::string ka = gammaOrderKey(m, p), kb = gammaOrderKey(m, q);
      if (kb < ka) {
        anticommute(std::move(m), p, split);
        return true;
      }
    }
    return false;
  }

  bool reducePauliChain(Monomial& m, bool& split) {
    for (int i = 0; i + 1 < (int)m.chain.size(); ++i) {
      if (m.chain[i].kind != AtomKind::Pauli || m.chain[i + 1].kind != AtomKind::Pauli)
        continue;
      Index ia = m.chain[i].idx[0], ib = m.chain[i + 1].idx[0];
      // tau_a tau_b = delta_ab + i eps_abc tau_c
      Monomial md = m, me = m;
      md.chain.erase(md.chain.begin() + i, md.chain.begin() + i + 2);
      md.fac.push_back({deltaAtom(ia, ib), 1});
      Index c = freshInternal(m);
      me.chain.erase(me.chain.begin() + i, me.chain.begin() + i + 2);
      me.chain.insert(me.chain.begin() + i, pauliAtom(c));
      me.fac.push_back({epsilonAtom(ia, ib, c), 1});
      me.coef = me.coef * Q::I();
      emitSplit({std::move(md), std::move(me)});
      split = true;
      return true;
    }
    return false;
  }

  Index freshInternal(Monomial& m) {
    for (int k = 0;; ++k) {
      Sym cand = sym("#c" + std::to_string(k));
      auto atoms = flatten(m);
      auto occ = occurrences(atoms);
      if (occ.find(cand) == occ.end()) return Index{cand, -1, IndexSpace::Internal, false};
    }
  }

  bool nilpotentVanishes(Monomial& m) {
    int degree = 0;
    auto count = [&](const Atom& a, int pw) {
      if (a.symbol == kNoSym || !ctx_.known(a.symbol)) return;
      if (ctx_.info(a.symbol).nilpotent) degree += pw;
    };
    for (auto& [a, p] : m.fac) count(a, p);
    for (auto& a : m.chain) count(a, 1);
    return degree >= 2;
  }

  // ---------- dummy renaming, orientation, and factor sorting ----------

  // Blind atom key: like cmpAtom but with dummy names and their variance masked.
  std::string blindKey(const Atom& a, const std::set<Sym>& dummies) const {
    std::ostringstream os;
    os << int(a.kind) << "|" << (a.symbol == kNoSym ? "" : Names::str(a.symbol)) << "|"
       << a.conj << a.primed << "|";
    for (auto s : a.fnder) os << Names::str(s) << ",";
    os << "|";
    auto put = [&](const Index& i) {
      os << int(i.space);
      if (i.concrete()) {
        os << "c" << int(i.value) << (i.up ? "u" : "d");
      } else if (dummies.count(i.name)) {
        os << "D";
      } else {
        os << "f" << Names::str(i.name) << (i.up ? "u" : "d");
      }
      os << ";";
    };
    for (auto& i : a.der) put(i);
    os << "|";
    for (auto& i : a.idx) put(i);
    if (a.exponent) os << "|exp:" << a.exponent->mono.size();
    return os.str();
  }

  std::string fullKey(const Atom& a) const {
    std::ostringstream os;
    os << int(a.kind) << "|" << (a.symbol == kNoSym ? "" : Names::str(a.symbol)) << "|"
       << a.conj << a.primed << "|";
    for (auto s : a.fnder) os << Names::str(s) << ",";
    os << "|";
    auto put = [&](const Index& i) {
      os << int(i.space);
      if (i.concrete())
        os << "c" << int(i.value);
      else
        os << "n" << Names::str(i.name);
      os << (i.up ? "u" : "d") << ";";
    };
    for (auto& i : a.der) put(i);
    os << "|";
    for (auto& i : a.idx) put(i);
    if (a.exponent) os << "|exp:" << a.exponent->mono.size();
    return os.str();
  }

  // Scalar-run boundaries of the chain; complete scalar runs are sortable.
  std::vector<std::pair<int, int>> chainRuns(const Monomial& m) const {
    std::vector<std::pair<int, int>> runs;
    int start = 0;
    int rows = -1, cols = -1;  // current aggregate shape; -1 = empty
    for (int i = 0; i < (int)m.chain.size(); ++i) {
      int r, c;
      atomShapeDims(ctx_, m.chain[i], r, c);
      if (r == 0) { r = c = rows < 0 ? 4 : cols; }
      if (rows < 0) { rows = r; cols = c; }
      else { cols = c; }
      if (rows == 1 && cols == 1) {
        runs.push_back({start, i + 1});
        start = i + 1;
        rows = cols = -1;
      }
    }
    if (start < (int)m.chain.size()) runs.push_back({start, (int)m.chain.size()});
    return runs;
  }

  void canonicalizeNames(Monomial& m) {
    for (int pass = 0; pass < kMaxDummyPasses; ++pass) {
      auto atoms = flatten(m);
      auto occ = occurrences(atoms);
      std::set<Sym> dummies;
      for (auto& [name, os] : occ)
        if (os.size() == 2) dummies.insert(name);

      // sort complete scalar runs of the chain by blind keys
      auto runs = chainRuns(m);
      std::vector<std::vector<Atom>> scalarRuns;
      std::vector<std::vector<Atom>> otherRuns;
      for (auto& [s, e] : runs) {
        std::vector<Atom> run(m.chain.begin() + s, m.chain.begin() + e);
        bool scalar = isScalarRun(run);
        (scalar ? scalarRuns : otherRuns).push_back(std::move(run));
      }
      std::stable_sort(scalarRuns.begin(), scalarRuns.end(),
                       [&](const std::vector<Atom>& x, const std::vector<Atom>& y) {
                         return runKey(x, dummies) < runKey(y, dummies);
                       });
      std::vector<Atom> newChain;
      for (auto& r : scalarRuns) newChain.insert(newChain.end(), r.begin(), r.end());
      for (auto& r : otherRuns) newChain.insert(newChain.end(), r.begin(), r.end());

      // sort commutative factors by (blind key, current full key)
      auto faSorted = m.fac;
      std::stable_sort(faSorted.begin(), faSorted.end(),
                       [&](const auto& x, const auto& y) {
                         std::string bx = blindKey(x.first, dummies);
                         std::string by = blindKey(y.first, dummies);
                         if (bx != by) return bx < by;
                         return fullKey(x.first) < fullKey(y.first);
                       });

      bool chainChanged = newChain != m.chain;
      bool facChanged = false;
      if (faSorted.size() == m.fac.size())
        for (size_t i = 0; i < faSorted.size(); ++i)
          if (!(faSorted[i].first == m.fac[i].first) ||
              faSorted[i].second != m.fac[i].second)
            facChanged = true;
      m.chain = std::move(newChain);
      m.fac = std::move(faSorted);

      // rename dummies in traversal order: chain first, then factors
      std::map<Sym, Sym> rename;
      int next = 0;
      auto visit = [&](Index& i) {
        if (i.concrete() || !dummies.count(i.name)) return;
        auto it = rename.find(i.name);
        if (it == rename.end()) {
          Sym nn = sym("$" + std::to_string(next++));
          rename.emplace(i.name, nn);
          i.name = nn;
        } else {
          i.name = it->second;
        }
      };
      bool renamed = false;
      auto visitAtom = [&](Atom& a) {
        for (auto& i : a.der) { Sym before = i.name; visit(i); renamed |= before != i.name; }
        for (auto& i : a.idx) { Sym before = i.name; visit(i); renamed |= before != i.name; }
      };
      for (auto& a : m.chain) visitAtom(a);
      for (auto& [a, p] : m.fac) visitAtom(a);

      // orient spacetime dummy pairs: first occurrence raised
      bool flipped = orientDummies(m);

      if (!chainChanged && !facChanged && !renamed && !flipped) break;
      // re-apply slot symmetry sorting after renames (may flip signs)
      while (sortSymmetrySlots(m)) {
        if (m.coef.isZero()) return;
      }
    }
  }

  bool isScalarRun(const std::vector<Atom>& run) const {
    if (run.empty()) return true;
    int rows = -1, cols = -1;
    for (auto& a : run) {
      int r, c;
      atomShapeDims(ctx_, a, r, c);
      if (r == 0) { r = c = rows < 0 ? 4 : cols; }
      if (rows < 0) rows = r;
      cols = c;
    }
    return rows == 1 && cols == 1;
  }

  std::string runKey(const std::vector<Atom>& run, const std::set<Sym>& dummies) const {
    std::string k;
    for (auto& a : run) k += blindKey(a, dummies) + "//";
    for (auto& a : run) k += fullKey(a) + "//";
    return k;
  }

  bool orientDummies(Monomial& m) {
    auto atoms = flatten(m);
    auto occ = occurrences(atoms);
    bool flipped = false;
    for (auto& [name, os] : occ) {
      if (os.size() != 2) continue;
      Index& first = slotOf(*atoms[os[0].atomPos].atom, os[0].slot);
      if (first.space != IndexSpace::Spacetime) continue;
      if (!first.up) {
        Index& second = slotOf(*atoms[os[1].atomPos].atom, os[1].slot);
        first.up = !first.up;
        second.up = !second.up;
        flipped = true;
      }
    }
    return flipped;
  }

  void mergeEqualFactors(Monomial& m) {
    std::vector<std::pair<Atom, int>> out;
    for (auto& [a, p] : m.fac) {
      if (!out.empty() && out.back().first == a)
        out.back().second += p;
      else
        out.push_back({a, p});
    }
    std::erase_if(out, [](auto& e) { return e.second == 0; });
    m.fac = std::move(out);
  }

  Expr assemble() {
    std::stable_sort(done_.begin(), done_.end(), [](const Monomial& a, const Monomial& b) {
      return cmpMonomialBody(a, b) < 0;
    });
    Expr out;
    for (auto& m : done_) {
      if (m.coef.isZero()) continue;
      if (!out.mono.empty() && cmpMonomialBody(out.mono.back(), m) == 0) {
        out.mono.back().coef += m.coef;
        if (out.mono.back().coef.isZero()) out.mono.pop_back();
      } else {
        out.mono.push_back(m);
      }
    }
    return out;
  }
};

}  // namespace

Expr normalize(const Expr& e, const Context& ctx) {
  Normalizer n(ctx);
  return n.run(e);
}

Expr divideByParams(const Expr& a, const Expr& divisor, const Context& ctx) {
  Expr d = normalize(divisor, ctx);
  if (d.mono.size() != 1)
    throw std::runtime_error("division requires a single-term divisor");
  const Monomial& dm = d.mono[0];
  if (!dm.chain.empty())
    throw std::runtime_error("division by non-commutative expression");
  for (auto& [atom, p] : dm.fac)
    if (atom.kind != AtomKind::Param)
      throw std::runtime_error("division only by constants and parameters");
  Expr out = a;
  for (auto& m : out.mono) {
    m.coef = m.coef / dm.coef;
    for (auto& [atom, p] : dm.fac) m.fac.push_back({atom, -p});
  }
  return out;
}

bool hasFreeIndex(const Expr& e, Sym name) {
  for (auto& m : e.mono) {
    int count = 0;
    auto scan = [&](const Atom& a) {
      for (auto& i : a.idx)
        if (!i.concrete() && i.name == name) ++count;
      for (auto& i : a.der)
        if (!i.concrete() && i.name == name) ++count;
    };
    for (auto& [a, p] : m.fac) scan(a);
    for (auto& a : m.chain) scan(a);
    if (count == 1) return true;
  }
  return false;
}

std::vector<Index> freeIndices(const Expr& e, const Context& ctx) {
  (void)ctx;
  std::vector<Index> common;
  bool first = true;
  for (auto& mOrig : e.mono) {
    Monomial m = mOrig;
    auto atoms = flatten(m);
    auto occ = occurrences(atoms);
    std::vector<Index> free;
    for (auto& [name, os] : occ)
      if (os.size() == 1)
        free.push_back(slotOf(*atoms[os[0].atomPos].atom, os[0].slot));
    std::sort(free.begin(), free.end(), [](const Index& a, const Index& b) {
      return Names::str(a.name) < Names::str(b.name);
    });
    if (first) {
      common = free;
      first = false;
    } else {
      bool same = common.size() == free.size();
      if (same)
        for (size_t i = 0; i < free.size(); ++i)
          if (free[i].name != common[i].name || free[i].space != common[i].space)
            same = false;
      if (!same) throw IndexError("free indices differ between terms");
    }
  }
  return common;
}

}  // namespace covham
