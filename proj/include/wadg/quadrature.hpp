#pragma once

// Gauss-type rules on [-1,1] and positive-weight volume rules on the reference
// quadrilateral (tensor Gauss-Legendre) and triangle (collapsed Gauss-Jacobi).

#include "wadg/polynomials.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <stdexcept>

namespace wadg {

struct QuadratureRule1D {
  Eigen::ArrayXd points;
  Eigen::ArrayXd weights;
  int exactness_degree = 0;
  Eigen::Index size() const { return points.size(); }
};

/// Volume rule on a reference element. Points are stored as separate r/s arrays.
struct QuadratureRule {
  Eigen::ArrayXd r;
  Eigen::ArrayXd s;
  Eigen::ArrayXd weights;
  int exactness_degree = 0;
  Eigen::Index size() const { return r.size(); }
};

/// Gauss-Jacobi rule with n points for the weight (1-x)^alpha (1+x)^beta.
/// Golub-Welsch initial guess polished by Newton on the orthonormal polynomial;
/// weights from the Christoffel function.
inline QuadratureRule1D gauss_jacobi_1d(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_1d: n must be >= 1");
  QuadratureRule1D rule;
  rule.exactness_degree = 2 * n - 1;
  if (n == 1) {
    rule.points = Eigen::ArrayXd::Constant(1, -(alpha - beta) / (alpha + beta + 2.0));
  } else {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double h1 = 2.0 * i + alpha + beta;
      T(i, i) = (h1 + 2.0 == 0.0 || h1 == 0.0) ? (beta - alpha) / (alpha + beta + 2.0)
                                               : -(alpha * alpha - beta * beta) / (h1 + 2.0) / h1;
      if (i + 1 < n) {
        const double k = i + 1.0;
        const double off = 2.0 / (h1 + 2.0) *
                           std::sqrt(k * (k + alpha + beta) * (k + alpha) * (k + beta) /
                                     (h1 + 1.0) / (h1 + 3.0));
        T(i, i + 1) = off;
        T(i + 1, i) = off;
      }
    }
    if (alpha + beta < 10 * std::numeric_limits<double>::epsilon()) T(0, 0) = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(T);
    rule.points = eig.eigenvalues().array();
  }
  // Newton polish.
  for (int it = 0; it < 3; ++it) {
    const Eigen::ArrayXd p = jacobi_p(rule.points, alpha, beta, n);
    const Eigen::ArrayXd dp = grad_jacobi_p(rule.points, alpha, beta, n);
    rule.points -= p / dp;
  }
  std::sort(rule.points.data(), rule.points.data() + n);
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(n);
  for (int k = 0; k < n; ++k) sum += jacobi_p(rule.points, alpha, beta, k).square();
  rule.weights = 1.0 / sum;
  return rule;
}

/// n-point Gauss-Legendre rule, exact through degree 2n-1.
inline QuadratureRule1D gauss_legendre_1d(int n) {
  QuadratureRule1D rule = gauss_jacobi_1d(n, 0.0, 0.0);
  // Symmetrize to remove rounding asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.points(n - 1 - i) - rule.points(i));
    const double w = 0.5 * (rule.weights(n - 1 - i) + rule.weights(i));
    rule.points(i) = -x;
    rule.points(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.points(n / 2) = 0.0;
  return rule;
}

/// Gauss-Lobatto-Legendre points (n >= 2), endpoints included.
inline Eigen::ArrayXd gauss_lobatto_points(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_points: n must be >= 2");
  Eigen::ArrayXd x(n);
  x(0) = -1.0;
  x(n - 1) = 1.0;
  if (n > 2) {
    const QuadratureRule1D interior = gauss_jacobi_1d(n - 2, 1.0, 1.0);
    x.segment(1, n - 2) = interior.points;
  }
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (x(n - 1 - i) - x(i));
    x(i) = -v;
    x(n - 1 - i) = v;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  return x;
}

/// Positive-weight volume rule with exactness_degree >= degree.
inline QuadratureRule build_quadrature(ElementShape shape, int degree) {
  if (degree < 0) throw std::invalid_argument("build_quadrature: degree must be >= 0");
  const int n = std::max(1, (degree + 2) / 2); // ceil((degree+1)/2)
  QuadratureRule rule;
  rule.exactness_degree = 2 * n - 1;
  const QuadratureRule1D gl = gauss_legendre_1d(n);
  rule.r.resize(n * n);
  rule.s.resize(n * n);
  rule.weights.resize(n * n);
  if (shape == ElementShape::Quadrilateral) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        rule.r(j * n + i) = gl.points(i);
        rule.s(j * n + i) = gl.points(j);
        rule.weights(j * n + i) = gl.weights(i) * gl.weights(j);
      }
    return rule;
  }
  // Duffy collapse: r = (1+a)(1-b)/2 - 1, s = b, dA = (1-b)/2 da db.
  const QuadratureRule1D gj = gauss_jacobi_1d(n, 1.0, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double a = gl.points(i);
      const double b = gj.points(j);
      rule.r(j * n + i) = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
      rule.s(j * n + i) = b;
      rule.weights(j * n + i) = 0.5 * gl.weights(i) * gj.weights(j);
    }
  return rule;
}

} // namespace wadg
