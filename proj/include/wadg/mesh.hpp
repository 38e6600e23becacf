#pragma once

// Curved isoparametric mesh: per-element mapping nodes, face connectivity,
// and the bookkeeping needed to regenerate or refine a mesh family.

#include "wadg/reference_element.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace wadg {

/// Neighbor across a face; elem < 0 marks a Dirichlet boundary face.
struct FaceNeighbor {
  int elem = -1;
  int face = -1;
  bool boundary() const { return elem < 0; }
};

enum class MeshFamilyKind { Imported, UniformQuad, UniformTri, Arnold, RandomPerturbed, WarpedArnold, SmoothWarp, Disk };

inline const char* to_string(MeshFamilyKind k) {
  switch (k) {
  case MeshFamilyKind::UniformQuad: return "uniform";
  case MeshFamilyKind::UniformTri: return "uniform-tri";
  case MeshFamilyKind::Arnold: return "arnold";
  case MeshFamilyKind::RandomPerturbed: return "random";
  case MeshFamilyKind::WarpedArnold: return "warped";
  case MeshFamilyKind::SmoothWarp: return "smooth-warp";
  case MeshFamilyKind::Disk: return "disk";
  default: return "imported";
  }
}

/// Generator parameters, kept so that refine() can produce the next family member.
struct MeshFamily {
  MeshFamilyKind kind = MeshFamilyKind::Imported;
  int level = 0;
  int K1D = 0;
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  double amplitude = 0.0; // random / smooth-warp perturbation size
  double omega = 0.0;     // warped Arnold parameter
  std::uint64_t seed = 0;
};

struct CurvedMesh2D {
  ElementShape shape = ElementShape::Quadrilateral;
  int N_geo = 1;
  int K = 0;
  /// Physical coordinates of the degree-N_geo mapping nodes, Np_geo x K.
  Eigen::MatrixXd x, y;
  /// face_connectivity[k][f] is the neighbor of face f of element k.
  std::vector<std::vector<FaceNeighbor>> face_connectivity;
  double h = 0.0;
  MeshFamily family;

  /// Straight-sided skeleton (used by nested disk refinement). May be empty.
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::vector<int>> elem_vertices;

  int Np_geo() const { return static_cast<int>(x.rows()); }
  int num_faces() const { return wadg::num_faces(shape); }
  int num_boundary_faces() const {
    int n = 0;
    for (const auto& fc : face_connectivity)
      for (const auto& nb : fc) n += nb.boundary();
    return n;
  }
};

/// Builds mapping nodes by evaluating map(k, r, s) at the degree-N_geo reference nodes.
inline CurvedMesh2D mesh_from_map(ElementShape shape, int N_geo, int K,
                                  const std::function<std::array<double, 2>(int, double, double)>& map) {
  CurvedMesh2D mesh;
  mesh.shape = shape;
  mesh.N_geo = N_geo;
  mesh.K = K;
  const NodalBasis gb(shape, N_geo);
  mesh.x.resize(gb.size(), K);
  mesh.y.resize(gb.size(), K);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < gb.size(); ++i) {
      const auto p = map(k, gb.r()(i), gb.s()(i));
      mesh.x(i, k) = p[0];
      mesh.y(i, k) = p[1];
    }
  return mesh;
}

/// Largest distance between two mapping nodes of one element (element diameter).
inline double max_element_diameter(const CurvedMesh2D& mesh) {
  double h = 0.0;
  for (int k = 0; k < mesh.K; ++k)
    for (int i = 0; i < mesh.Np_geo(); ++i)
      for (int j = i + 1; j < mesh.Np_geo(); ++j)
        h = std::max(h, std::hypot(mesh.x(i, k) - mesh.x(j, k), mesh.y(i, k) - mesh.y(j, k)));
  return h;
}

/// Matches faces by their mapping-node coordinates and fills face_connectivity.
/// Faces with no partner become boundary faces. Throws MeshError when a face
/// has more than one partner or the matched nodes disagree.
inline void build_connectivity(CurvedMesh2D& mesh, double rel_tol = 1e-9) {
  const NodalBasis gb(mesh.shape, mesh.N_geo);
  const auto fnodes = gb.face_nodes();
  const int Nf = mesh.num_faces();
  double scale = 0.0;
  for (int k = 0; k < mesh.K; ++k)
    scale = std::max({scale, mesh.x.col(k).cwiseAbs().maxCoeff(), mesh.y.col(k).cwiseAbs().maxCoeff()});
  const double tol = rel_tol * std::max(1.0, scale);

  struct FaceKey {
    double cx, cy;
    int elem, face;
  };
  std::vector<FaceKey> keys;
  keys.reserve(static_cast<std::size_t>(mesh.K) * Nf);
  for (int k = 0; k < mesh.K; ++k)
    for (int f = 0; f < Nf; ++f) {
      double cx = 0.0, cy = 0.0;
      for (int i : fnodes[f]) {
        cx += mesh.x(i, k);
        cy += mesh.y(i, k);
      }
      keys.push_back({cx / fnodes[f].size(), cy / fnodes[f].size(), k, f});
    }
  std::sort(keys.begin(), keys.end(), [](const FaceKey& a, const FaceKey& b) { return a.cx < b.cx; });

  mesh.face_connectivity.assign(mesh.K, std::vector<FaceNeighbor>(Nf));
  for (std::size_t a = 0; a < keys.size(); ++a) {
    for (std::size_t b = a + 1; b < keys.size() && keys[b].cx - keys[a].cx <= tol; ++b) {
      if (std::abs(keys[b].cy - keys[a].cy) > tol) continue;
      const FaceKey& A = keys[a];
      const FaceKey& B = keys[b];
      auto& na = mesh.face_connectivity[A.elem][A.face];
      auto& nb = mesh.face_connectivity[B.elem][B.face];
      if (!na.boundary() || !nb.boundary())
        throw MeshError("face (" + std::to_string(A.elem) + "," + std::to_string(A.face) +
                        ") matches more than one neighbor");
      // Shared faces are traversed in opposite directions.
      const auto& ia = fnodes[A.face];
      const auto& ib = fnodes[B.face];
      const std::size_t n = ia.size();
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = mesh.x(ia[i], A.elem) - mesh.x(ib[n - 1 - i], B.elem);
        const double dy = mesh.y(ia[i], A.elem) - mesh.y(ib[n - 1 - i], B.elem);
        if (std::hypot(dx, dy) > tol)
          throw MeshError("non-conforming face between elements " + std::to_string(A.elem) + " and " +
                          std::to_string(B.elem));
      }
      na = {B.elem, B.face};
      nb = {A.elem, A.face};
    }
  }
}

/// Minimum mapping Jacobian over the volume quadrature points of every element.
/// Throws NonPositiveJacobian at the first non-positive value.
inline double validate_jacobian(const CurvedMesh2D& mesh, int quad_degree = -1) {
  const NodalBasis gb(mesh.shape, mesh.N_geo);
  const QuadratureRule q = build_quadrature(mesh.shape, quad_degree < 0 ? 4 * mesh.N_geo : quad_degree);
  Eigen::MatrixXd Dr, Ds;
  gb.derivative_matrices(q.r, q.s, Dr, Ds);
  const Eigen::MatrixXd xr = Dr * mesh.x, xs = Ds * mesh.x, yr = Dr * mesh.y, ys = Ds * mesh.y;
  const Eigen::MatrixXd J = (xr.array() * ys.array() - xs.array() * yr.array()).matrix();
  double jmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < mesh.K; ++k)
    for (int i = 0; i < J.rows(); ++i) {
      if (!(J(i, k) > 0.0)) throw NonPositiveJacobian(k, i, J(i, k));
      jmin = std::min(jmin, J(i, k));
    }
  return jmin;
}

} // namespace wadg
