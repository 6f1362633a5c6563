#include <sstream>

#include "covham/model.hpp"

namespace covham {

namespace {

std::string serializeIndex(const Index& i) {
  if (i.space == IndexSpace::Spacetime) {
    std::string v = i.up ? "up " : "dn ";
    if (i.concrete()) return v + std::to_string(int(i.value));
    return v + Names::str(i.name);
  }
  if (i.concrete()) return std::to_string(int(i.value) + 1);
  return Names::str(i.name);
}

std::string serializeIndexList(const std::vector<Index>& idx) {
  std::string out = "[";
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ", ";
    out += serializeIndex(idx[i]);
  }
  return out + "]";
}

std::string fieldRefOf(Sym s, bool conj, const Context& ctx) {
  const SymbolInfo& si = ctx.info(s);
  std::string base = Names::str(s);
  if (si.adjointPartner != kNoSym && si.shape == NcShape::Row) {
    std::string partner = Names::str(si.adjointPartner);
    if (si.rank == FieldRank::Spinor) return "bar(" + partner + ")";
    return "dag(" + partner + ")";
  }
  if (conj) return "conj(" + base + ")";
  return base;
}

std::string serializeAtom(const Atom& a, int pow, const Context& ctx) {
  std::string body;
  switch (a.kind) {
    case AtomKind::Param:
      body = Names::str(a.symbol);
      if (!a.idx.empty()) body += serializeIndexList(a.idx);
      break;
    case AtomKind::Coord:
      body = "x" + serializeIndexList(a.idx);
      break;
    case AtomKind::ParamFn:
      body = Names::str(a.symbol);
      if (!a.idx.empty()) body += serializeIndexList(a.idx);
      break;
    case AtomKind::Field: {
      body = fieldRefOf(a.symbol, a.conj, ctx);
      if (a.primed) body += "'";
      if (!a.idx.empty()) body += serializeIndexList(a.idx);
      break;
    }
    case AtomKind::Momentum: {
      body = std::string("pi") + (a.primed ? "'" : "") + "(" +
             fieldRefOf(a.symbol, a.conj, ctx) + ")" + serializeIndexList(a.idx);
      break;
    }
    case AtomKind::Delta: body = "delta" + serializeIndexList(a.idx); break;
    case AtomKind::Metric: body = "g" + serializeIndexList(a.idx); break;
    case AtomKind::Epsilon: body = "eps" + serializeIndexList(a.idx); break;
    case AtomKind::Gamma: body = "gamma" + serializeIndexList(a.idx); break;
    case AtomKind::SigmaMat: body = "sigma" + serializeIndexList(a.idx); break;
    case AtomKind::TauMat: body = "taumat" + serializeIndexList(a.idx); break;
    case AtomKind::Pauli: body = "tau" + serializeIndexList(a.idx); break;
    case AtomKind::UnitMat: body = "one"; break;
    case AtomKind::ExpPhase:
      body = "exp(" + serializeExpr(*a.exponent, ctx) + ")";
      break;
  }
  if (!a.der.empty()) body = "d(" + [&] {
        std::string s;
        for (size_t i = 0; i < a.der.size(); ++i) {
          if (i) s += ", ";
          s += serializeIndex(a.der[i]);
        }
        return s;
      }() + ") " + body;
  if (pow != 1) {
    if (!a.der.empty()) body = "(" + body + ")";
    body += "^" + (pow < 0 ? "-" + std::to_string(-pow) : std::to_string(pow));
  }
  return body;
}

std::string serializeQ(const Q& q) {
  auto rat = [](const Rat& r) {
    std::string s = std::to_string(r.num());
    if (!r.isInt()) s += "/" + std::to_string(r.den());
    return s;
  };
  if (q.im.isZero()) return rat(q.re);
  std::string im = rat(q.im) + "*i";
  if (q.re.isZero()) return "(" + im + ")";
  return "(" + rat(q.re) + " + " + im + ")";
}

}  // namespace

std::string serializeExpr(const Expr& e, const Context& ctx) {
  if (e.mono.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& m : e.mono) {
    if (!first) os << " + ";
    first = false;
    std::vector<std::string> parts;
    if (!m.coef.isOne() || (m.fac.empty() && m.chain.empty()))
      parts.push_back(serializeQ(m.coef));
    for (auto& [a, p] : m.fac) parts.push_back(serializeAtom(a, p, ctx));
    for (auto& a : m.chain) parts.push_back(serializeAtom(a, 1, ctx));
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) os << "*";
      os << parts[i];
    }
  }
  return os.str();
}

std::string serializeModel(const ModelSpec& m) {
  std::ostringstream os;
  os << "model " << m.name << " {\n";
  auto rankName = [](FieldRank r) {
    switch (r) {
      case FieldRank::Scalar: return "scalar";
      case FieldRank::Covector: return "covector";
      case FieldRank::Covector3: return "covector3";
      case FieldRank::Spinor: return "spinor";
      case FieldRank::Doublet: return "doublet";
    }
    return "scalar";
  };
  for (auto& f : m.fields)
    os << "  field " << f.name << " " << rankName(f.rank) << " "
       << (f.cx == Complexity::Real ? "real" : "complex") << "\n";
  for (auto& p : m.params) {
    os << "  param " << p.name;
    if (p.value) {
      os << " = " << p.value->num();
      if (!p.value->isInt()) os << "/" << p.value->den();
    }
    if (p.nilpotent) os << " nilpotent";
    os << "\n";
  }
  for (auto& f : m.paramfns) {
    os << "  paramfn " << f.name;
    if (!f.slots.empty()) {
      os << "[";
      for (size_t i = 0; i < f.slots.size(); ++i) {
        if (i) os << ", ";
        if (f.slots[i].first == IndexSpace::Spacetime)
          os << (f.slots[i].second ? "up s" : "dn s") << i;
        else
          os << "s" << i;
      }
      os << "]";
    }
    if (!f.xdep || !f.fieldDeps.empty()) {
      os << " of (";
      bool firstDep = true;
      for (auto& d : f.fieldDeps) {
        if (!firstDep) os << ", ";
        os << d;
        firstDep = false;
      }
      if (f.xdep) {
        if (!firstDep) os << ", ";
        os << "x";
      }
      os << ")";
    }
    if (f.nilpotent) os << " nilpotent";
    os << "\n";
  }
  for (auto& a : m.algebras) os << "  algebra " << a << "\n";
  for (auto& f : m.antisymMomenta) os << "  antisymmetric pi(" << f << ")\n";
  for (auto& [k, v] : m.metadata) os << "  meta " << k << " = \"" << v << "\"\n";
  if (m.lagrangian)
    os << "  lagrangian = " << serializeExpr(*m.lagrangian, *m.ctx) << "\n";
  if (m.hamiltonian)
    os << "  hamiltonian = " << serializeExpr(*m.hamiltonian, *m.ctx) << "\n";
  os << "}\n";
  return os.str();
}

bool sameModel(const ModelSpec& a, const ModelSpec& b) {
  if (a.name != b.name) return false;
  if (a.fields.size() != b.fields.size() || a.params.size() != b.params.size())
    return false;
  for (size_t i = 0; i < a.fields.size(); ++i) {
    if (a.fields[i].name != b.fields[i].name || a.fields[i].rank != b.fields[i].rank ||
        a.fields[i].cx != b.fields[i].cx)
      return false;
  }
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name || a.params[i].value != b.params[i].value ||
        a.params[i].nilpotent != b.params[i].nilpotent)
      return false;
  }
  if (a.algebras != b.algebras || a.antisymMomenta != b.antisymMomenta) return false;
  if (a.metadata != b.metadata) return false;
  if (a.lagrangian.has_value() != b.lagrangian.has_value()) return false;
  if (a.hamiltonian.has_value() != b.hamiltonian.has_value()) return false;
  if (a.lagrangian) {
    Expr la = normalize(*a.lagrangian, *a.ctx), lb = normalize(*b.lagrangian, *b.ctx);
    if (!(la == lb)) return false;
  }
  if (a.hamiltonian) {
    Expr ha = normalize(*a.hamiltonian, *a.ctx), hb = normalize(*b.hamiltonian, *b.ctx);
    if (!(ha == hb)) return false;
  }
  return true;
}

}  // namespace covham
