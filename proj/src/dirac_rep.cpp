#include "covham/dirac_rep.hpp"

#include <stdexcept>

namespace covham {

namespace {
using Cx = std::complex<double>;

Eigen::Matrix2cd pauli2(int a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, Cx(0, -1), Cx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}
}  // namespace

Mat4 diracGamma4(int mu, bool upVariance) {
  Mat4 m = Mat4::Zero();
  if (mu == 0) {
    m(0, 0) = 1; m(1, 1) = 1; m(2, 2) = -1; m(3, 3) = -1;
  } else {
    Eigen::Matrix2cd s = pauli2(mu - 1);
    m.block<2, 2>(0, 2) = s;
    m.block<2, 2>(2, 0) = -s;
    if (!upVariance) m = -m;
  }
  return m;
}

Mat4 diracSigma4(int mu, int nu, bool up1, bool up2) {
  Mat4 a = diracGamma4(mu, up1), b = diracGamma4(nu, up2);
  return Cx(0, 0.5) * (a * b - b * a);
}

Mat4 diracTau4(int mu, int nu, bool up1, bool up2) {
  double gv = 0;
  if (mu == nu) {
    gv = up1 == up2 ? (mu == 0 ? 1.0 : -1.0) : 1.0;
  }
  return Cx(0, 2.0 / 3.0) * gv * Mat4::Identity() -
         (1.0 / 3.0) * diracSigma4(mu, nu, up1, up2);
}

Mat4 matrixOracle(const std::vector<Atom>& generatorChain) {
  Mat4 acc = Mat4::Identity();
  for (const Atom& a : generatorChain) {
    for (const Index& i : a.idx)
      if (!i.concrete())
        throw std::runtime_error("matrix oracle requires concrete indices");
    switch (a.kind) {
      case AtomKind::Gamma:
        acc = acc * diracGamma4(a.idx[0].value, a.idx[0].up);
        break;
      case AtomKind::SigmaMat:
        acc = acc * diracSigma4(a.idx[0].value, a.idx[1].value, a.idx[0].up, a.idx[1].up);
        break;
      case AtomKind::TauMat:
        acc = acc * diracTau4(a.idx[0].value, a.idx[1].value, a.idx[0].up, a.idx[1].up);
        break;
      case AtomKind::UnitMat:
        break;
      default:
        throw std::runtime_error("matrix oracle: not a spinor-space generator");
    }
  }
  return acc;
}

Mat4 gammaPolynomialMatrix(const Expr& e) {
  Mat4 total = Mat4::Zero();
  for (const Monomial& m : e.mono) {
    Cx coef(m.coef.re.toDouble(), m.coef.im.toDouble());
    for (const auto& [a, p] : m.fac) {
      double v;
      switch (a.kind) {
        case AtomKind::Delta:
          if (!a.idx[0].concrete() || !a.idx[1].concrete())
            throw std::runtime_error("symbolic index in gamma polynomial");
          v = a.idx[0].value == a.idx[1].value ? 1.0 : 0.0;
          break;
        case AtomKind::Metric:
          if (!a.idx[0].concrete() || !a.idx[1].concrete())
            throw std::runtime_error("symbolic index in gamma polynomial");
          v = a.idx[0].value == a.idx[1].value ? metricSign(a.idx[0].value) : 0.0;
          break;
        default:
          throw std::runtime_error("gamma polynomial: unsupported factor");
      }
      for (int k = 0; k < p; ++k) coef *= v;
    }
    total += coef * matrixOracle(m.chain);
  }
  return total;
}

}  // namespace covham
