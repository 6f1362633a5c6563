#pragma once

#include <Eigen/Dense>
#include <complex>

#include "covham/expr.hpp"

namespace covham {

using Mat4 = Eigen::Matrix4cd;

// Explicit Dirac-representation matrices, used as an independent oracle for
// the symbolic generator algebra: gamma^0 = diag(1,1,-1,-1) block form.
Mat4 diracGamma4(int mu, bool upVariance);
Mat4 diracSigma4(int mu, int nu, bool up1, bool up2);
Mat4 diracTau4(int mu, int nu, bool up1, bool up2);

// Evaluates a product of concrete-index generator atoms by literal matrix
// multiplication. Throws EvalError on symbolic indices.
Mat4 matrixOracle(const std::vector<Atom>& generatorChain);

// Evaluates a normalized expression whose monomials consist of rational
// coefficients, metric/delta factors with concrete indices and gamma chains,
// to an explicit 4x4 matrix. Used to cross-check symbolic reductions.
Mat4 gammaPolynomialMatrix(const Expr& e);

}  // namespace covham
