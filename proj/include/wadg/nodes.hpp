#pragma once

// Interpolation node sets: tensor Gauss-Lobatto on quadrilaterals and
// warp & blend points on triangles.

#include "wadg/quadrature.hpp"

#include <array>
#include <cmath>
#include <vector>
#include <numbers>

namespace wadg {

namespace detail {

/// 1D warp function mapping equispaced to Gauss-Lobatto points, used by the
/// triangle blend construction.
inline Eigen::ArrayXd warp_factor(int N, const Eigen::ArrayXd& rout) {
  const Eigen::ArrayXd lgl = gauss_lobatto_points(N + 1);
  const Eigen::ArrayXd req = Eigen::ArrayXd::LinSpaced(N + 1, -1.0, 1.0);
  Eigen::MatrixXd Veq(N + 1, N + 1);
  Eigen::MatrixXd Pmat(N + 1, rout.size());
  for (int i = 0; i <= N; ++i) {
    Veq.col(i) = jacobi_p(req, 0, 0, i).matrix();
    Pmat.row(i) = jacobi_p(rout, 0, 0, i).matrix().transpose();
  }
  const Eigen::MatrixXd Lmat = Veq.transpose().partialPivLu().solve(Pmat);
  Eigen::ArrayXd warp = (Lmat.transpose() * (lgl - req).matrix()).array();
  for (Eigen::Index i = 0; i < rout.size(); ++i) {
    const bool interior = std::abs(rout(i)) < 1.0 - 1e-10;
    warp(i) = interior ? warp(i) / (1.0 - rout(i) * rout(i)) : 0.0;
  }
  return warp;
}

} // namespace detail

/// Nodes of degree N on the reference element, as (r, s) arrays.
/// Quadrilateral ordering: r fastest. Triangle ordering: rows of constant s.
inline void reference_nodes(ElementShape shape, int N, Eigen::ArrayXd& r, Eigen::ArrayXd& s) {
  if (N < 1) throw std::invalid_argument("reference_nodes: N must be >= 1");
  if (shape == ElementShape::Quadrilateral) {
    const Eigen::ArrayXd x = gauss_lobatto_points(N + 1);
    r.resize((N + 1) * (N + 1));
    s.resize((N + 1) * (N + 1));
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i <= N; ++i) {
        r(j * (N + 1) + i) = x(i);
        s(j * (N + 1) + i) = x(j);
      }
    return;
  }
  static constexpr std::array<double, 15> alpha_opt = {
      0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832,
      1.3648, 1.4773, 1.4959, 1.5743, 1.5770, 1.6223, 1.6258};
  const double alpha = N < 16 ? alpha_opt[N - 1] : 5.0 / 3.0;
  const int Np = basis_dim(shape, N);
  Eigen::ArrayXd L1(Np), L2(Np), L3(Np);
  int sk = 0;
  for (int n = 1; n <= N + 1; ++n)
    for (int m = 1; m <= N + 2 - n; ++m) {
      L1(sk) = (n - 1.0) / N;
      L3(sk) = (m - 1.0) / N;
      L2(sk) = 1.0 - L1(sk) - L3(sk);
      ++sk;
    }
  const double sqrt3 = std::sqrt(3.0);
  Eigen::ArrayXd x = -L2 + L3;
  Eigen::ArrayXd y = (-L2 - L3 + 2.0 * L1) / sqrt3;
  const Eigen::ArrayXd blend1 = 4.0 * L2 * L3;
  const Eigen::ArrayXd blend2 = 4.0 * L1 * L3;
  const Eigen::ArrayXd blend3 = 4.0 * L1 * L2;
  const Eigen::ArrayXd warp1 =
      blend1 * detail::warp_factor(N, L3 - L2) * (1.0 + (alpha * L1).square());
  const Eigen::ArrayXd warp2 =
      blend2 * detail::warp_factor(N, L1 - L3) * (1.0 + (alpha * L2).square());
  const Eigen::ArrayXd warp3 =
      blend3 * detail::warp_factor(N, L2 - L1) * (1.0 + (alpha * L3).square());
  const double pi = std::numbers::pi;
  x += warp1 + std::cos(2.0 * pi / 3.0) * warp2 + std::cos(4.0 * pi / 3.0) * warp3;
  y += std::sin(2.0 * pi / 3.0) * warp2 + std::sin(4.0 * pi / 3.0) * warp3;

  // Equilateral -> bi-unit right triangle.
  const Eigen::ArrayXd b1 = (sqrt3 * y + 1.0) / 3.0;
  const Eigen::ArrayXd b2 = (-3.0 * x - sqrt3 * y + 2.0) / 6.0;
  const Eigen::ArrayXd b3 = (3.0 * x - sqrt3 * y + 2.0) / 6.0;
  r = -b2 + b3 - b1;
  s = -b2 - b3 + b1;
}

/// Reference coordinates of a point on face `face` at edge parameter t in [-1,1].
/// Faces are traversed counterclockwise.
inline std::array<double, 2> face_point(ElementShape shape, int face, double t) {
  if (shape == ElementShape::Triangle) {
    switch (face) {
    case 0: return {t, -1.0};
    case 1: return {-t, t};
    default: return {-1.0, -t};
    }
  }
  switch (face) {
  case 0: return {t, -1.0};
  case 1: return {1.0, t};
  case 2: return {-t, 1.0};
  default: return {-1.0, -t};
  }
}

/// d(r,s)/dt along a face.
inline std::array<double, 2> face_tangent(ElementShape shape, int face) {
  if (shape == ElementShape::Triangle) {
    switch (face) {
    case 0: return {1.0, 0.0};
    case 1: return {-1.0, 1.0};
    default: return {0.0, -1.0};
    }
  }
  switch (face) {
  case 0: return {1.0, 0.0};
  case 1: return {0.0, 1.0};
  case 2: return {-1.0, 0.0};
  default: return {0.0, -1.0};
  }
}

/// Edge parameter of a reference point assumed to lie on `face`.
inline double face_parameter(ElementShape shape, int face, double r, double s) {
  if (shape == ElementShape::Triangle) {
    switch (face) {
    case 0: return r;
    case 1: return s;
    default: return -s;
    }
  }
  switch (face) {
  case 0: return r;
  case 1: return s;
  case 2: return -r;
  default: return -s;
  }
}

inline bool on_face(ElementShape shape, int face, double r, double s, double tol = 1e-10) {
  if (shape == ElementShape::Triangle) {
    switch (face) {
    case 0: return std::abs(s + 1.0) < tol;
    case 1: return std::abs(r + s) < tol;
    default: return std::abs(r + 1.0) < tol;
    }
  }
  switch (face) {
  case 0: return std::abs(s + 1.0) < tol;
  case 1: return std::abs(r - 1.0) < tol;
  case 2: return std::abs(s - 1.0) < tol;
  default: return std::abs(r + 1.0) < tol;
  }
}

/// Reference vertices in counterclockwise order; face f joins vertex f and f+1.
inline std::vector<std::array<double, 2>> reference_vertices(ElementShape shape) {
  if (shape == ElementShape::Triangle) return {{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
  return {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
}

} // namespace wadg
