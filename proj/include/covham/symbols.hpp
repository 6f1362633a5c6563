#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covham {

using Sym = uint32_t;
inline constexpr Sym kNoSym = UINT32_MAX;

// Process-wide name interner. Ids are stable for the process lifetime, so
// expressions can be shared freely across threads.
class Names {
public:
  static Sym intern(const std::string& s) {
    auto& self = instance();
    std::lock_guard<std::mutex> lock(self.mu_);
    auto it = self.ids_.find(s);
    if (it != self.ids_.end()) return it->second;
    Sym id = Sym(self.names_.size());
    self.names_.push_back(s);
    self.ids_.emplace(s, id);
    return id;
  }
  static const std::string& str(Sym id) {
    auto& self = instance();
    std::lock_guard<std::mutex> lock(self.mu_);
    return self.names_.at(id);
  }

private:
  static Names& instance() {
    static Names n;
    return n;
  }
  std::mutex mu_;
  std::map<std::string, Sym> ids_;
  std::vector<std::string> names_;
};

inline Sym sym(const std::string& s) { return Names::intern(s); }

enum class IndexSpace : uint8_t { Spacetime, Internal, FieldLabel };

// A tensor index slot: either symbolic (named) or concrete (a component value).
struct Index {
  Sym name = kNoSym;    // kNoSym when concrete
  int8_t value = -1;    // component value when concrete
  IndexSpace space = IndexSpace::Spacetime;
  bool up = true;       // variance; meaningful for spacetime only

  bool concrete() const { return name == kNoSym; }

  friend bool operator==(const Index& a, const Index& b) {
    return a.name == b.name && a.value == b.value && a.space == b.space && a.up == b.up;
  }
  friend bool operator!=(const Index& a, const Index& b) { return !(a == b); }
};

inline Index up(const std::string& n, IndexSpace sp = IndexSpace::Spacetime) {
  return Index{sym(n), -1, sp, true};
}
inline Index dn(const std::string& n, IndexSpace sp = IndexSpace::Spacetime) {
  return Index{sym(n), -1, sp, false};
}
inline Index upc(int v) { return Index{kNoSym, int8_t(v), IndexSpace::Spacetime, true}; }
inline Index dnc(int v) { return Index{kNoSym, int8_t(v), IndexSpace::Spacetime, false}; }
inline Index internal(const std::string& n) {
  return Index{sym(n), -1, IndexSpace::Internal, false};
}
inline Index internalc(int v) { return Index{kNoSym, int8_t(v), IndexSpace::Internal, false}; }
inline Index flip(Index i) { i.up = !i.up; return i; }

inline int spaceDim(IndexSpace sp) { return sp == IndexSpace::Spacetime ? 4 : 3; }

// Metric signature diag(+1,-1,-1,-1).
inline int metricSign(int component) { return component == 0 ? 1 : -1; }

enum class AtomKind : uint8_t {
  Param,      // named constant (v, lambda, m, c, hbar, q, g, pi, ...)
  Coord,      // spacetime coordinate x^mu
  ParamFn,    // declared function of x and/or fields (chi, theta, V, W, j^mu)
  Field,      // field atom phi_I (possibly with component slots)
  Momentum,   // conjugate momentum atom: field slots + direction slot
  Delta,      // Kronecker delta, two slots
  Metric,     // g^{mu nu} / g_{mu nu}
  Epsilon,    // Levi-Civita, three internal slots
  Gamma,      // Dirac gamma, one spacetime slot (non-commutative)
  SigmaMat,   // sigma^{mu nu}; expanded into gammas by normalize
  TauMat,     // tau_{mu nu};  expanded into gammas by normalize
  Pauli,      // Pauli matrix, one internal slot (non-commutative)
  UnitMat,    // identity matrix; dropped by normalize
  ExpPhase,   // exp(<scalar expression>)
};

enum class NcShape : uint8_t { Scalar, Row, Col, Matrix };

enum class FieldRank : uint8_t { Scalar, Covector, Covector3, Spinor, Doublet };
enum class Complexity : uint8_t { Real, Complex };

// Everything the engine needs to know about a declared symbol.
struct SymbolInfo {
  AtomKind kind = AtomKind::Param;
  std::vector<std::pair<IndexSpace, bool>> slots;  // index signature (space, natural variance)
  NcShape shape = NcShape::Scalar;
  int ncRows = 1, ncCols = 1;
  bool realValued = true;
  bool nilpotent = false;     // formal first-order quantity: products of two vanish
  bool xdep = false;          // ParamFn: explicit x dependence
  std::vector<Sym> fndeps;    // ParamFn: field symbols it depends on
  Sym adjointPartner = kNoSym;  // psi <-> psibar, phi <-> phidag
  // Field bookkeeping
  FieldRank rank = FieldRank::Scalar;
  Complexity cx = Complexity::Real;
  bool momentumAntisym = false;  // momentum tensor declared antisymmetric in (slot0, dir)
  std::optional<std::pair<int, int>> antisymPair;  // declared antisymmetric slot pair
  std::optional<std::pair<int, int>> symPair;      // declared symmetric slot pair
};

// Immutable-after-construction registry of declared symbols. Shared read-only
// by all expression operations.
class Context {
public:
  Context() = default;

  Sym declare(const std::string& name, SymbolInfo info) {
    Sym s = sym(name);
    info_[s] = std::move(info);
    return s;
  }

  bool known(Sym s) const { return info_.count(s) != 0; }
  const SymbolInfo& info(Sym s) const {
    auto it = info_.find(s);
    if (it == info_.end())
      throw std::runtime_error("undeclared symbol: " + Names::str(s));
    return it->second;
  }
  SymbolInfo& mutableInfo(Sym s) {
    auto it = info_.find(s);
    if (it == info_.end())
      throw std::runtime_error("undeclared symbol: " + Names::str(s));
    return it->second;
  }

  Sym declareParam(const std::string& name, bool nilpotentFlag = false) {
    SymbolInfo si;
    si.kind = AtomKind::Param;
    si.nilpotent = nilpotentFlag;
    return declare(name, si);
  }

  // A function of x alone (chi, theta, V(x), j^mu(x)).
  Sym declareParamFn(const std::string& name,
                     std::vector<std::pair<IndexSpace, bool>> slots = {},
                     bool nilpotentFlag = false) {
    SymbolInfo si;
    si.kind = AtomKind::ParamFn;
    si.slots = std::move(slots);
    si.xdep = true;
    si.nilpotent = nilpotentFlag;
    return declare(name, si);
  }

  // A function of declared fields (and optionally x), e.g. W(phi, x).
  Sym declareFieldFn(const std::string& name, std::vector<Sym> deps, bool xdepFlag) {
    SymbolInfo si;
    si.kind = AtomKind::ParamFn;
    si.xdep = xdepFlag;
    si.fndeps = std::move(deps);
    return declare(name, si);
  }

  Sym declareField(const std::string& name, FieldRank rank, Complexity cx) {
    SymbolInfo si;
    si.kind = AtomKind::Field;
    si.rank = rank;
    si.cx = cx;
    si.realValued = (cx == Complexity::Real);
    switch (rank) {
      case FieldRank::Scalar: break;
      case FieldRank::Covector:
        si.slots = {{IndexSpace::Spacetime, false}};
        break;
      case FieldRank::Covector3:
        si.slots = {{IndexSpace::Internal, false}, {IndexSpace::Spacetime, false}};
        break;
      case FieldRank::Spinor:
        si.shape = NcShape::Col; si.ncRows = 4; si.ncCols = 1;
        break;
      case FieldRank::Doublet:
        si.shape = NcShape::Col; si.ncRows = 2; si.ncCols = 1;
        break;
    }
    return declare(name, si);
  }

  // Declares the row-shaped partner (psibar / phidag) of a spinor/doublet.
  Sym declareAdjoint(const std::string& name, Sym of) {
    SymbolInfo si = info(of);
    std::swap(si.ncRows, si.ncCols);
    si.shape = NcShape::Row;
    si.adjointPartner = of;
    Sym s = declare(name, si);
    mutableInfo(of).adjointPartner = s;
    return s;
  }

  std::vector<Sym> fieldSymbols() const {
    std::vector<Sym> out;
    for (auto& [s, si] : info_)
      if (si.kind == AtomKind::Field) out.push_back(s);
    return out;
  }

private:
  std::map<Sym, SymbolInfo> info_;
};

}  // namespace covham
