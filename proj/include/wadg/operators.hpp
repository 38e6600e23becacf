#pragma once

// Weighted mass matrices, the weight-adjusted inverse, and the projections
// compared in the convergence studies.

#include "wadg/geometry.hpp"

#include <Eigen/Cholesky>
#include <functional>

namespace wadg {

using ScalarFn = std::function<double(double, double)>;

/// Evaluates fn at every physical quadrature point (Nq x K).
inline Eigen::MatrixXd eval_at_points(const ScalarFn& fn, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i, k) = fn(x(i, k), y(i, k));
  return out;
}

/// (M_w)_{ij} = sum_q w_q w(x_q) l_j(x_q) l_i(x_q) on the reference element.
inline Eigen::MatrixXd weighted_mass_matrix(const ReferenceElement& ref, const Eigen::VectorXd& w) {
  const Eigen::VectorXd ww = ref.vol_quad.weights.matrix().cwiseProduct(w);
  Eigen::MatrixXd M = ref.Vq.transpose() * ww.asDiagonal() * ref.Vq;
  M = 0.5 * (M + M.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw NotSPD("weighted mass matrix is not positive definite");
  return M;
}

/// Weight-adjusted inverse Mhat^{-1} M_{1/w} Mhat^{-1} rhs applied matrix-free as
/// Pq diag(w_inv) Vq (Mhat^{-1} rhs). With premultiplied = true, rhs already
/// holds Mhat^{-1} times the load vector. Works column-wise on Np x K blocks.
inline Eigen::MatrixXd apply_weight_adjusted_inverse(const ReferenceElement& ref, const Eigen::MatrixXd& w_inv,
                                                     const Eigen::MatrixXd& rhs, bool premultiplied = false) {
  const Eigen::MatrixXd vals = premultiplied ? Eigen::MatrixXd(ref.Vq * rhs) : Eigen::MatrixXd(ref.Vq * (ref.Mhat_inv * rhs));
  return ref.Pq * vals.cwiseProduct(w_inv);
}

/// The weight-adjusted mass matrix Mhat M_{1/w}^{-1} Mhat of one element.
inline Eigen::MatrixXd weight_adjusted_mass(const ReferenceElement& ref, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd Minvw = weighted_mass_matrix(ref, w.cwiseInverse());
  return ref.Mhat * Minvw.llt().solve(ref.Mhat);
}

/// Physical L2 projection: solves M_J c = Vq^T diag(w J) f on each element.
inline Eigen::MatrixXd l2_project(const ReferenceElement& ref, const GeometricData& geo, const ScalarFn& fn) {
  const Eigen::MatrixXd f = eval_at_points(fn, geo.xq, geo.yq);
  const Eigen::VectorXd w = ref.vol_quad.weights.matrix();
  Eigen::MatrixXd c(ref.Np, geo.K);
  for (int k = 0; k < geo.K; ++k) {
    const Eigen::MatrixXd MJ = weighted_mass_matrix(ref, geo.J.col(k));
    const Eigen::VectorXd b = ref.Vq.transpose() * w.cwiseProduct(geo.J.col(k)).cwiseProduct(f.col(k));
    c.col(k) = MJ.llt().solve(b);
  }
  return c;
}

/// Weight-adjusted pseudo-projection Pi_N((1/J) Pi_N(u J)). With project_J the
/// weight J is first replaced by its reference L2 projection onto P^N.
inline Eigen::MatrixXd wadg_pseudo_project(const ReferenceElement& ref, const GeometricData& geo, const ScalarFn& fn,
                                           bool project_J = false) {
  const Eigen::MatrixXd f = eval_at_points(fn, geo.xq, geo.yq);
  const Eigen::MatrixXd J = project_J ? Eigen::MatrixXd(ref.Vq * (ref.Pq * geo.J)) : geo.J;
  const Eigen::MatrixXd uJ = ref.Pq * f.cwiseProduct(J);
  return apply_weight_adjusted_inverse(ref, J.cwiseInverse(), uJ, true);
}

/// Per-element J-weighted L2 error of the low-storage curvilinear projection
/// u - (1/sqrt J) Pi_N(u sqrt J).
inline Eigen::VectorXd lsc_projection_error(const ReferenceElement& ref, const GeometricData& geo, const ScalarFn& fn) {
  const Eigen::MatrixXd f = eval_at_points(fn, geo.xq, geo.yq);
  const Eigen::MatrixXd sJ = geo.J.cwiseSqrt();
  const Eigen::MatrixXd proj = ref.Vq * (ref.Pq * f.cwiseProduct(sJ));
  const Eigen::MatrixXd err = f - proj.cwiseQuotient(sJ);
  const Eigen::VectorXd w = ref.vol_quad.weights.matrix();
  Eigen::VectorXd out(geo.K);
  for (int k = 0; k < geo.K; ++k)
    out(k) = std::sqrt((w.array() * geo.J.col(k).array() * err.col(k).array().square()).sum());
  return out;
}

/// Root of the sum of squared per-element errors, summed in element order.
inline double combine_element_errors(const Eigen::VectorXd& e) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) s += e(k) * e(k);
  return std::sqrt(s);
}

/// sqrt(sum_k sum_q w_q J_q (u_h - u)^2) with a fixed summation order.
inline double global_l2_error(const ReferenceElement& ref, const GeometricData& geo, const Eigen::MatrixXd& coeffs,
                              const ScalarFn& fn) {
  const Eigen::MatrixXd uh = ref.Vq * coeffs;
  const Eigen::VectorXd w = ref.vol_quad.weights.matrix();
  double s = 0.0;
  for (int k = 0; k < geo.K; ++k)
    for (int q = 0; q < geo.Nq; ++q) {
      const double d = uh(q, k) - fn(geo.xq(q, k), geo.yq(q, k));
      s += w(q) * geo.J(q, k) * d * d;
    }
  return std::sqrt(s);
}

/// Reference monomials r^a s^b with a + b <= M at the volume quadrature points.
inline Eigen::MatrixXd reference_monomials(const ReferenceElement& ref, int M) {
  std::vector<Eigen::VectorXd> cols;
  for (int a = 0; a <= M; ++a)
    for (int b = 0; a + b <= M; ++b)
      cols.push_back((ref.vol_quad.r.pow(a) * ref.vol_quad.s.pow(b)).matrix());
  Eigen::MatrixXd V(ref.Nq, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) V.col(static_cast<Eigen::Index>(i)) = cols[i];
  return V;
}

/// max over elements and monomials v in P^M of
///   |(w u, v) - (T^{-1}_{1/w} u, v)| / ||w||_inf
/// on the reference element, with T^{-1}_{1/w} u = M_{1/w}^{-1} Vq^T W u.
/// Dividing by the size of w per element removes the h^2 scale of w = J.
/// With project_weight, w is replaced by its reference projection onto P^N
/// on both sides of the comparison.
inline double conservation_moment_error(const ReferenceElement& ref, const GeometricData& geo, const Eigen::MatrixXd& w,
                                        const ScalarFn& u_fn, int M, bool project_weight = false) {
  if (M < 0 || M > ref.N) throw std::invalid_argument("conservation_moment_error: need 0 <= M <= N");
  const Eigen::MatrixXd f = eval_at_points(u_fn, geo.xq, geo.yq);
  const Eigen::MatrixXd ww = project_weight ? Eigen::MatrixXd(ref.Vq * (ref.Pq * w)) : w;
  const Eigen::MatrixXd V = reference_monomials(ref, M);
  const Eigen::VectorXd wq = ref.vol_quad.weights.matrix();
  double err = 0.0;
  for (int k = 0; k < geo.K; ++k) {
    const Eigen::MatrixXd Minv_w = weighted_mass_matrix(ref, ww.col(k).cwiseInverse());
    const Eigen::VectorXd c = Minv_w.llt().solve(ref.Vq.transpose() * wq.cwiseProduct(f.col(k)));
    const Eigen::VectorXd lhs = V.transpose() * wq.cwiseProduct(ww.col(k)).cwiseProduct(f.col(k));
    const Eigen::VectorXd rhs = V.transpose() * wq.cwiseProduct(ref.Vq * c);
    err = std::max(err, (lhs - rhs).cwiseAbs().maxCoeff() / ww.col(k).cwiseAbs().maxCoeff());
  }
  return err;
}

} // namespace wadg
