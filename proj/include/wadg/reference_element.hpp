#pragma once

// Reference element: nodal basis, volume/face quadrature, and every reference
// matrix the operators and solver consume. Immutable after construction.

#include "wadg/errors.hpp"
#include "wadg/nodes.hpp"

#include <algorithm>
#include <Eigen/SVD>
#include <vector>

namespace wadg {

/// Lagrange basis of degree N on the reference element, defined through the
/// orthonormal modal basis at the reference nodes.
class NodalBasis {
public:
  NodalBasis() = default;
  NodalBasis(ElementShape shape, int N) : shape_(shape), N_(N) {
    reference_nodes(shape, N, r_, s_);
    V_ = eval_modal_basis(shape, N, r_, s_);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V_);
    const auto& sv = svd.singularValues();
    cond_ = sv(0) / sv(sv.size() - 1);
    if (!(cond_ < 1e12)) throw SingularNodalBasis(cond_);
    Vinv_ = V_.partialPivLu().inverse();
  }

  ElementShape shape() const { return shape_; }
  int degree() const { return N_; }
  int size() const { return static_cast<int>(r_.size()); }
  const Eigen::ArrayXd& r() const { return r_; }
  const Eigen::ArrayXd& s() const { return s_; }
  /// Modal Vandermonde at the nodes and its inverse.
  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::MatrixXd& Vinv() const { return Vinv_; }
  double vandermonde_condition() const { return cond_; }

  /// (M)_{ij} = l_j(x_i) at arbitrary reference points.
  Eigen::MatrixXd interpolation_matrix(const Eigen::ArrayXd& r, const Eigen::ArrayXd& s) const {
    return eval_modal_basis(shape_, N_, r, s) * Vinv_;
  }
  void derivative_matrices(const Eigen::ArrayXd& r, const Eigen::ArrayXd& s, Eigen::MatrixXd& Dr,
                           Eigen::MatrixXd& Ds) const {
    Eigen::MatrixXd Vr, Vs;
    eval_modal_gradient(shape_, N_, r, s, Vr, Vs);
    Dr = Vr * Vinv_;
    Ds = Vs * Vinv_;
  }

  /// Indices of nodes on each face, ordered by increasing edge parameter.
  std::vector<std::vector<int>> face_nodes() const {
    std::vector<std::vector<int>> out(num_faces(shape_));
    for (int f = 0; f < num_faces(shape_); ++f) {
      for (int i = 0; i < size(); ++i)
        if (on_face(shape_, f, r_(i), s_(i))) out[f].push_back(i);
      std::sort(out[f].begin(), out[f].end(), [&](int a, int b) {
        return face_parameter(shape_, f, r_(a), s_(a)) < face_parameter(shape_, f, r_(b), s_(b));
      });
    }
    return out;
  }

  /// Node index sitting on each reference vertex.
  std::vector<int> vertex_nodes() const {
    std::vector<int> out;
    for (const auto& v : reference_vertices(shape_)) {
      int best = 0;
      double dbest = 1e300;
      for (int i = 0; i < size(); ++i) {
        const double d = std::hypot(r_(i) - v[0], s_(i) - v[1]);
        if (d < dbest) {
          dbest = d;
          best = i;
        }
      }
      out.push_back(best);
    }
    return out;
  }

private:
  ElementShape shape_ = ElementShape::Quadrilateral;
  int N_ = 0;
  Eigen::ArrayXd r_, s_;
  Eigen::MatrixXd V_, Vinv_;
  double cond_ = 1.0;
};

/// Degree-N reference element with volume and face quadrature of the requested
/// exactness. Face quadrature uses Gauss-Legendre on every edge.
struct ReferenceElement {
  int N = 0;
  ElementShape shape = ElementShape::Quadrilateral;
  int Np = 0;
  int Nfaces = 0;
  NodalBasis basis;

  QuadratureRule vol_quad;
  QuadratureRule1D face_quad;
  int Nq = 0;
  int Nfq = 0; // points per face

  Eigen::MatrixXd Vq;         // Nq x Np, (Vq)_ij = l_j(x_i)
  Eigen::MatrixXd Pq;         // Np x Nq, Mhat^{-1} Vq^T diag(w)
  Eigen::MatrixXd Vrq, Vsq;   // derivatives of l_j at volume quadrature points
  Eigen::MatrixXd Prq, Psq;   // Mhat^{-1} Vrq^T diag(w) (strong-weak volume terms)
  Eigen::MatrixXd Mhat;       // reference mass matrix
  Eigen::MatrixXd Mhat_inv;
  Eigen::MatrixXd Dr, Ds;     // nodal differentiation matrices
  std::vector<std::vector<int>> face_nodes;

  Eigen::ArrayXd rf, sf;      // face quadrature points, face-major (Nfaces*Nfq)
  Eigen::ArrayXd wf;          // matching 1D weights
  Eigen::MatrixXd Vfq;        // (Nfaces*Nfq) x Np
  Eigen::MatrixXd Pfq;        // Np x (Nfaces*Nfq), Mhat^{-1} Vfq^T diag(wf)

  double vandermonde_condition() const { return basis.vandermonde_condition(); }
};

inline ReferenceElement build_reference_element(int N, ElementShape shape, int volume_quad_degree,
                                                int face_quad_degree) {
  if (N < 1) throw std::invalid_argument("build_reference_element: N must be >= 1");
  ReferenceElement ref;
  ref.N = N;
  ref.shape = shape;
  ref.basis = NodalBasis(shape, N);
  ref.Np = ref.basis.size();
  ref.Nfaces = num_faces(shape);

  // The modal basis is orthonormal, so Mhat = (V V^T)^{-1} exactly.
  const Eigen::MatrixXd& Vinv = ref.basis.Vinv();
  ref.Mhat = Vinv.transpose() * Vinv;
  const Eigen::MatrixXd& V = ref.basis.V();
  ref.Mhat_inv = V * V.transpose();
  ref.basis.derivative_matrices(ref.basis.r(), ref.basis.s(), ref.Dr, ref.Ds);
  ref.face_nodes = ref.basis.face_nodes();

  ref.vol_quad = build_quadrature(shape, volume_quad_degree);
  ref.Nq = static_cast<int>(ref.vol_quad.size());
  ref.Vq = ref.basis.interpolation_matrix(ref.vol_quad.r, ref.vol_quad.s);
  ref.basis.derivative_matrices(ref.vol_quad.r, ref.vol_quad.s, ref.Vrq, ref.Vsq);
  const Eigen::VectorXd w = ref.vol_quad.weights.matrix();
  ref.Pq = ref.Mhat_inv * ref.Vq.transpose() * w.asDiagonal();
  ref.Prq = ref.Mhat_inv * ref.Vrq.transpose() * w.asDiagonal();
  ref.Psq = ref.Mhat_inv * ref.Vsq.transpose() * w.asDiagonal();

  ref.face_quad = gauss_legendre_1d(std::max(1, (face_quad_degree + 2) / 2));
  ref.Nfq = static_cast<int>(ref.face_quad.size());
  const int nf = ref.Nfaces * ref.Nfq;
  ref.rf.resize(nf);
  ref.sf.resize(nf);
  ref.wf.resize(nf);
  for (int f = 0; f < ref.Nfaces; ++f)
    for (int i = 0; i < ref.Nfq; ++i) {
      const auto p = face_point(shape, f, ref.face_quad.points(i));
      ref.rf(f * ref.Nfq + i) = p[0];
      ref.sf(f * ref.Nfq + i) = p[1];
      ref.wf(f * ref.Nfq + i) = ref.face_quad.weights(i);
    }
  ref.Vfq = ref.basis.interpolation_matrix(ref.rf, ref.sf);
  ref.Pfq = ref.Mhat_inv * ref.Vfq.transpose() * ref.wf.matrix().asDiagonal();
  return ref;
}

} // namespace wadg
