#include "covham/render.hpp"

#include <sstream>

namespace covham {

std::string render(const Index& i) {
  std::string v;
  if (i.space == IndexSpace::Spacetime) v = i.up ? "^" : "_";
  if (i.concrete()) {
    int shown = i.space == IndexSpace::Internal ? i.value + 1 : int(i.value);
    return v + std::to_string(shown);
  }
  return v + Names::str(i.name);
}

namespace {
std::string idxList(const std::vector<Index>& idx) {
  if (idx.empty()) return "";
  std::string out = "[";
  for (size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ",";
    out += render(idx[i]);
  }
  return out + "]";
}
}  // namespace

std::string render(const Atom& a) {
  std::string name;
  switch (a.kind) {
    case AtomKind::Param: name = Names::str(a.symbol); break;
    case AtomKind::Coord: name = "x"; break;
    case AtomKind::ParamFn:
    case AtomKind::Field: name = Names::str(a.symbol); break;
    case AtomKind::Momentum: name = "p{" + Names::str(a.symbol) + "}"; break;
    case AtomKind::Delta: name = "delta"; break;
    case AtomKind::Metric: name = "g"; break;
    case AtomKind::Epsilon: name = "eps"; break;
    case AtomKind::Gamma: name = "gamma"; break;
    case AtomKind::SigmaMat: name = "sigma"; break;
    case AtomKind::TauMat: name = "taumat"; break;
    case AtomKind::Pauli: name = "tau"; break;
    case AtomKind::UnitMat: name = "one"; break;
    case AtomKind::ExpPhase: name = "exp"; break;
  }
  if (a.conj) name += "*";
  if (a.primed) name += "'";
  for (auto s : a.fnder) name += ";" + Names::str(s);
  std::string out = name + idxList(a.idx);
  if (a.kind == AtomKind::ExpPhase) out += "(" + render(*a.exponent) + ")";
  if (!a.der.empty()) out = "d" + idxList(a.der) + out;
  return out;
}

std::string render(const Expr& e) {
  if (e.mono.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& m : e.mono) {
    if (!first) os << " + ";
    first = false;
    std::vector<std::string> parts;
    bool coefShown = false;
    if (!m.coef.isOne() || (m.fac.empty() && m.chain.empty())) {
      parts.push_back(m.coef.str());
      coefShown = true;
    }
    (void)coefShown;
    for (auto& [a, p] : m.fac) {
      std::string s = render(a);
      if (p != 1) s += "^" + std::to_string(p);
      parts.push_back(s);
    }
    if (!m.chain.empty()) {
      std::string s;
      for (size_t i = 0; i < m.chain.size(); ++i) {
        if (i) s += ".";
        s += render(m.chain[i]);
      }
      parts.push_back(s);
    }
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) os << "*";
      os << parts[i];
    }
  }
  return os.str();
}

}  // namespace covham
