#ifndef CARNOT_MODELS_HPP
#define CARNOT_MODELS_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carnot/manifold.hpp"

namespace carnot {

/// Replaces variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& values);

/// Heisenberg group h_n(lambda) in coordinates x1..xn, y1..yn, z with the
/// left-invariant orthonormal frame A_j / lambda_j, B_j / lambda_j, d/dz where
/// A_j = d/dx_j - (y_j/2) d/dz and B_j = d/dy_j + (x_j/2) d/dz.
FramedManifold heisenberg_group(const std::vector<double>& lambda);

/// Heisenberg group with its horizontal metric scaled by exp(2 f).
FramedManifold conformal_heisenberg(const std::vector<double>& lambda, const std::string& f);

/// Cartan (2,3,5) group, coordinates x1..x5:
/// X1 = d1, X2 = d2 + x1 d3 + (x1^2/2) d4 + x1 x2 d5.
FramedManifold cartan_group();

/// Same distribution with metric diag(1 + eps x4^2, 1) on (X1, X2).
FramedManifold cartan_perturbed(double eps = 0.1);

/// Rotates the first two orthonormal horizontal fields by the angle alpha
/// (an expression in the coordinates).
FramedManifold rotate_horizontal(const FramedManifold& m, const std::string& alpha);

/// The same manifold in the chart y = A x + b.
FramedManifold affine_chart(const FramedManifold& m, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace carnot

#endif
