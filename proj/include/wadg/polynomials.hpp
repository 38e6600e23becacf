#pragma once

// Orthonormal Jacobi polynomials and the modal bases built from them.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace wadg {

enum class ElementShape { Triangle, Quadrilateral };

inline const char* to_string(ElementShape s) {
  return s == ElementShape::Triangle ? "triangle" : "quadrilateral";
}

inline int basis_dim(ElementShape shape, int N) {
  return shape == ElementShape::Triangle ? (N + 1) * (N + 2) / 2 : (N + 1) * (N + 1);
}

inline int num_faces(ElementShape shape) { return shape == ElementShape::Triangle ? 3 : 4; }

/// Normalized Jacobi polynomial P_n^{(alpha,beta)} evaluated at x, orthonormal
/// with respect to the weight (1-x)^alpha (1+x)^beta on [-1,1].
inline Eigen::ArrayXd jacobi_p(const Eigen::ArrayXd& x, double alpha, double beta, int n) {
  const Eigen::Index m = x.size();
  const double gamma0 = std::pow(2.0, alpha + beta + 1.0) / (alpha + beta + 1.0) *
                        std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                        std::tgamma(alpha + beta + 1.0);
  Eigen::ArrayXd p_prev = Eigen::ArrayXd::Constant(m, 1.0 / std::sqrt(gamma0));
  if (n == 0) return p_prev;
  const double gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
  Eigen::ArrayXd p =
      ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
  if (n == 1) return p;

  double a_old = 2.0 / (2.0 + alpha + beta) *
                 std::sqrt((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + alpha + beta;
    const double a_new = 2.0 / (h1 + 2.0) *
                         std::sqrt((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) *
                                   (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0));
    const double b_new = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
    Eigen::ArrayXd p_next = 1.0 / a_new * (-a_old * p_prev + (x - b_new) * p);
    p_prev = std::move(p);
    p = std::move(p_next);
    a_old = a_new;
  }
  return p;
}

/// d/dx of the normalized Jacobi polynomial.
inline Eigen::ArrayXd grad_jacobi_p(const Eigen::ArrayXd& x, double alpha, double beta, int n) {
  if (n == 0) return Eigen::ArrayXd::Zero(x.size());
  return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
}

/// Collapsed coordinates (a,b) of points in the reference triangle.
inline void rs_to_ab(const Eigen::ArrayXd& r, const Eigen::ArrayXd& s, Eigen::ArrayXd& a,
                     Eigen::ArrayXd& b) {
  a.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    a(i) = std::abs(s(i) - 1.0) > 1e-14 ? 2.0 * (1.0 + r(i)) / (1.0 - s(i)) - 1.0 : -1.0;
  }
  b = s;
}

/// Values of the orthonormal modal basis at points (rows) for every mode (columns).
/// Quadrilateral: tensor Legendre; triangle: Koornwinder-Dubiner.
inline Eigen::MatrixXd eval_modal_basis(ElementShape shape, int N, const Eigen::ArrayXd& r,
                                        const Eigen::ArrayXd& s) {
  Eigen::MatrixXd V(r.size(), basis_dim(shape, N));
  int col = 0;
  if (shape == ElementShape::Quadrilateral) {
    for (int j = 0; j <= N; ++j) {
      const Eigen::ArrayXd ps = jacobi_p(s, 0, 0, j);
      for (int i = 0; i <= N; ++i) V.col(col++) = (jacobi_p(r, 0, 0, i) * ps).matrix();
    }
    return V;
  }
  Eigen::ArrayXd a, b;
  rs_to_ab(r, s, a, b);
  for (int i = 0; i <= N; ++i) {
    const Eigen::ArrayXd h1 = jacobi_p(a, 0, 0, i);
    const Eigen::ArrayXd scale = (1.0 - b).pow(static_cast<double>(i));
    for (int j = 0; j <= N - i; ++j) {
      V.col(col++) = (std::sqrt(2.0) * h1 * jacobi_p(b, 2.0 * i + 1.0, 0, j) * scale).matrix();
    }
  }
  return V;
}

/// Reference derivatives (d/dr, d/ds) of the modal basis at points.
inline void eval_modal_gradient(ElementShape shape, int N, const Eigen::ArrayXd& r,
                                const Eigen::ArrayXd& s, Eigen::MatrixXd& Vr,
                                Eigen::MatrixXd& Vs) {
  const int Np = basis_dim(shape, N);
  Vr.resize(r.size(), Np);
  Vs.resize(r.size(), Np);
  int col = 0;
  if (shape == ElementShape::Quadrilateral) {
    for (int j = 0; j <= N; ++j) {
      const Eigen::ArrayXd ps = jacobi_p(s, 0, 0, j);
      const Eigen::ArrayXd dps = grad_jacobi_p(s, 0, 0, j);
      for (int i = 0; i <= N; ++i) {
        Vr.col(col) = (grad_jacobi_p(r, 0, 0, i) * ps).matrix();
        Vs.col(col) = (jacobi_p(r, 0, 0, i) * dps).matrix();
        ++col;
      }
    }
    return;
  }
  Eigen::ArrayXd a, b;
  rs_to_ab(r, s, a, b);
  const Eigen::ArrayXd half_1mb = 0.5 * (1.0 - b);
  for (int i = 0; i <= N; ++i) {
    const Eigen::ArrayXd fa = jacobi_p(a, 0, 0, i);
    const Eigen::ArrayXd dfa = grad_jacobi_p(a, 0, 0, i);
    for (int j = 0; j <= N - i; ++j) {
      const Eigen::ArrayXd gb = jacobi_p(b, 2.0 * i + 1.0, 0, j);
      const Eigen::ArrayXd dgb = grad_jacobi_p(b, 2.0 * i + 1.0, 0, j);
      Eigen::ArrayXd dr = dfa * gb;
      if (i > 0) dr *= half_1mb.pow(i - 1.0);
      Eigen::ArrayXd ds = dfa * (gb * (0.5 * (1.0 + a)));
      if (i > 0) ds *= half_1mb.pow(i - 1.0);
      Eigen::ArrayXd tmp = dgb * half_1mb.pow(static_cast<double>(i));
      if (i > 0) tmp -= 0.5 * i * gb * half_1mb.pow(i - 1.0);
      ds += fa * tmp;
      const double scale = std::pow(2.0, i + 0.5);
      Vr.col(col) = (scale * dr).matrix();
      Vs.col(col) = (scale * ds).matrix();
      ++col;
    }
  }
}

} // namespace wadg
