#pragma once

// Mesh families: uniform, Arnold trapezoids, randomly perturbed, warped
// Arnold, smoothly warped, and Gordon-Hall blended disk meshes.

#include "wadg/mesh.hpp"

#include <map>
#include <numbers>
#include <random>

namespace wadg {

namespace detail {

inline std::array<double, 2> bilinear(const std::array<std::array<double, 2>, 4>& v, double r, double s) {
  const double n0 = 0.25 * (1 - r) * (1 - s), n1 = 0.25 * (1 + r) * (1 - s);
  const double n2 = 0.25 * (1 + r) * (1 + s), n3 = 0.25 * (1 - r) * (1 + s);
  return {n0 * v[0][0] + n1 * v[1][0] + n2 * v[2][0] + n3 * v[3][0],
          n0 * v[0][1] + n1 * v[1][1] + n2 * v[2][1] + n3 * v[3][1]};
}

/// Barycentric coordinates on the reference triangle.
inline std::array<double, 3> barycentric(double r, double s) {
  return {-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0};
}

inline void finalize(CurvedMesh2D& mesh, const MeshFamily& fam, double h) {
  mesh.family = fam;
  mesh.h = h;
  build_connectivity(mesh);
  validate_jacobian(mesh);
}

} // namespace detail

/// K1D x K1D affine quadrilaterals on [x0,x1] x [y0,y1].
inline CurvedMesh2D uniform_quad_mesh(int K1D, double x0 = -1.0, double x1 = 1.0, double y0 = -1.0,
                                      double y1 = 1.0, int N_geo = 1) {
  if (K1D < 1) throw std::invalid_argument("uniform_quad_mesh: K1D must be >= 1");
  const double dx = (x1 - x0) / K1D, dy = (y1 - y0) / K1D;
  CurvedMesh2D mesh = mesh_from_map(ElementShape::Quadrilateral, N_geo, K1D * K1D, [&](int k, double r, double s) {
    const int i = k % K1D, j = k / K1D;
    return std::array<double, 2>{x0 + (i + 0.5 * (1 + r)) * dx, y0 + (j + 0.5 * (1 + s)) * dy};
  });
  MeshFamily fam{MeshFamilyKind::UniformQuad};
  fam.K1D = K1D;
  fam.x0 = x0, fam.x1 = x1, fam.y0 = y0, fam.y1 = y1;
  detail::finalize(mesh, fam, std::hypot(dx, dy));
  return mesh;
}

/// K1D x K1D squares on [x0,x1] x [y0,y1], each split into two triangles.
inline CurvedMesh2D uniform_tri_mesh(int K1D, double x0 = -1.0, double x1 = 1.0, double y0 = -1.0,
                                     double y1 = 1.0, int N_geo = 1) {
  if (K1D < 1) throw std::invalid_argument("uniform_tri_mesh: K1D must be >= 1");
  const double dx = (x1 - x0) / K1D, dy = (y1 - y0) / K1D;
  CurvedMesh2D mesh =
      mesh_from_map(ElementShape::Triangle, N_geo, 2 * K1D * K1D, [&](int k, double r, double s) {
        const int sq = k / 2, i = sq % K1D, j = sq / K1D;
        const std::array<double, 2> v00{x0 + i * dx, y0 + j * dy}, v10{v00[0] + dx, v00[1]},
            v11{v00[0] + dx, v00[1] + dy}, v01{v00[0], v00[1] + dy};
        const auto l = detail::barycentric(r, s);
        const auto& a = v00;
        const auto& b = k % 2 == 0 ? v10 : v11;
        const auto& c = k % 2 == 0 ? v11 : v01;
        return std::array<double, 2>{l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                                     l[0] * a[1] + l[1] * b[1] + l[2] * c[1]};
      });
  MeshFamily fam{MeshFamilyKind::UniformTri};
  fam.K1D = K1D;
  fam.x0 = x0, fam.x1 = x1, fam.y0 = y0, fam.y1 = y1;
  detail::finalize(mesh, fam, std::hypot(dx, dy));
  return mesh;
}

/// Arnold-type trapezoid mesh on [0,1]^2 with 2^(l+1) columns of width
/// h = 2^-(l+1). All vertical edges stay vertical, so the bilinear Jacobian of
/// every element is linear in r, and the shape pattern is the same at every level.
inline CurvedMesh2D arnold_mesh(int level) {
  if (level < 0) throw std::invalid_argument("arnold_mesh: level must be >= 0");
  const int n = 2 << level;
  const double h = 1.0 / n;
  // Interior horizontal cut lines zig-zag: at vertical line i the crossing of
  // line j sits at j h + (-1)^(i+j+1) h/4, so every cell is a trapezoid with
  // parallel vertical edges of lengths h/2 and 3h/2 (h(1 -+ 1/4) at the boundary).
  auto cut = [&](int i, int j) {
    if (j == 0 || j == n) return j * h;
    return j * h + ((i + j) % 2 == 0 ? -0.25 : 0.25) * h;
  };
  using V = std::array<double, 2>;
  std::vector<std::array<V, 4>> quads;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      quads.push_back({V{i * h, cut(i, j)}, V{(i + 1) * h, cut(i + 1, j)}, V{(i + 1) * h, cut(i + 1, j + 1)},
                       V{i * h, cut(i, j + 1)}});
  CurvedMesh2D mesh = mesh_from_map(ElementShape::Quadrilateral, 1, static_cast<int>(quads.size()),
                                    [&](int k, double r, double s) { return detail::bilinear(quads[k], r, s); });
  MeshFamily fam{MeshFamilyKind::Arnold};
  fam.level = level;
  fam.K1D = n;
  fam.x0 = 0.0, fam.x1 = 1.0, fam.y0 = 0.0, fam.y1 = 1.0;
  detail::finalize(mesh, fam, h);
  return mesh;
}

/// Uniform degree-N_geo quadrilateral mesh of [-1,1]^2 whose interior mapping
/// nodes are displaced by independent uniform offsets in [-a d, a d] per
/// coordinate, where d = h g/2 for element width h and smallest reference gap g
/// between Gauss-Lobatto mapping nodes (d = h for N_geo = 1). Nodes shared
/// between elements move together and boundary nodes stay fixed.
inline CurvedMesh2D random_perturbed_mesh(int K1D, int N_geo, double amplitude, std::uint64_t seed,
                                          int max_attempts = 8) {
  if (K1D < 1 || N_geo < 1) throw std::invalid_argument("random_perturbed_mesh: K1D, N_geo must be >= 1");
  const double hel = 2.0 / K1D;
  const Eigen::ArrayXd gll = gauss_lobatto_points(N_geo + 1);
  const int M = K1D * N_geo + 1;
  Eigen::ArrayXd t(M);
  for (int e = 0; e < K1D; ++e)
    for (int a = 0; a <= N_geo; ++a) t(e * N_geo + a) = -1.0 + (e + 0.5 * (1.0 + gll(a))) * hel;

  double gap = 2.0;
  for (int a = 0; a < N_geo; ++a) gap = std::min(gap, std::abs(gll(a + 1) - gll(a)));
  const double d = 0.5 * gap * hel;

  for (int attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> dist(-amplitude * d, amplitude * d);
    Eigen::MatrixXd GX(M, M), GY(M, M);
    for (int gj = 0; gj < M; ++gj)
      for (int gi = 0; gi < M; ++gi) {
        GX(gi, gj) = t(gi);
        GY(gi, gj) = t(gj);
        const bool interior = gi > 0 && gi < M - 1 && gj > 0 && gj < M - 1;
        if (interior && amplitude > 0.0) {
          GX(gi, gj) += dist(rng);
          GY(gi, gj) += dist(rng);
        }
      }
    CurvedMesh2D mesh;
    mesh.shape = ElementShape::Quadrilateral;
    mesh.N_geo = N_geo;
    mesh.K = K1D * K1D;
    const int Npg = (N_geo + 1) * (N_geo + 1);
    mesh.x.resize(Npg, mesh.K);
    mesh.y.resize(Npg, mesh.K);
    for (int k = 0; k < mesh.K; ++k) {
      const int i = k % K1D, j = k / K1D;
      for (int b = 0; b <= N_geo; ++b)
        for (int a = 0; a <= N_geo; ++a) {
          mesh.x(b * (N_geo + 1) + a, k) = GX(i * N_geo + a, j * N_geo + b);
          mesh.y(b * (N_geo + 1) + a, k) = GY(i * N_geo + a, j * N_geo + b);
        }
    }
    MeshFamily fam{MeshFamilyKind::RandomPerturbed};
    fam.K1D = K1D;
    fam.amplitude = amplitude;
    fam.seed = seed;
    try {
      detail::finalize(mesh, fam, hel);
      return mesh;
    } catch (const NonPositiveJacobian&) {
      if (attempt + 1 >= max_attempts) throw;
    }
  }
}

/// Vertical displacement of a warped horizontal mesh line.
inline double warp_displacement(double omega, int K1D, double x) {
  return omega / (K1D + 1.0) * std::cos(0.5 * K1D * std::numbers::pi * (x + 1.0));
}

/// Warped Arnold mesh on [-1,1]^2: every odd interior horizontal line of a
/// K1D x K1D grid is displaced by dy(x) and the displacement is blended linearly
/// across the adjacent elements.
inline CurvedMesh2D warped_arnold_mesh(double omega, int K1D, int N_geo = 3) {
  if (omega < 0.0 || omega > 2.0) throw std::invalid_argument("warped_arnold_mesh: omega must lie in [0,2]");
  if (K1D < 1) throw std::invalid_argument("warped_arnold_mesh: K1D must be >= 1");
  const double hel = 2.0 / K1D;
  auto line_dy = [&](int line, double x) {
    const bool warped = line % 2 == 1 && line > 0 && line < K1D;
    return warped ? warp_displacement(omega, K1D, x) : 0.0;
  };
  CurvedMesh2D mesh = mesh_from_map(ElementShape::Quadrilateral, N_geo, K1D * K1D, [&](int k, double r, double s) {
    const int i = k % K1D, j = k / K1D;
    const double x = -1.0 + (i + 0.5 * (1 + r)) * hel;
    const double y = -1.0 + (j + 0.5 * (1 + s)) * hel + 0.5 * (1 - s) * line_dy(j, x) +
                     0.5 * (1 + s) * line_dy(j + 1, x);
    return std::array<double, 2>{x, y};
  });
  MeshFamily fam{MeshFamilyKind::WarpedArnold};
  fam.K1D = K1D;
  fam.omega = omega;
  detail::finalize(mesh, fam, hel);
  return mesh;
}

/// Uniform mesh of [-1,1]^2 pushed through the smooth boundary-preserving map
///   x = X + a sin(pi X) sin(pi Y),   y = Y + (a/2) sin(pi X) sin(2 pi Y),
/// interpolated at degree N_geo. The Jacobian is smooth in physical space, so
/// elements become affine as h -> 0, and it is not a polynomial of degree N_geo.
inline CurvedMesh2D smooth_warp_mesh(int K1D, int N_geo = 3, double amplitude = 0.1) {
  const double pi = std::numbers::pi;
  if (!(2.0 * pi * std::abs(amplitude) + 1.5 * pi * pi * amplitude * amplitude < 1.0))
    throw std::invalid_argument("smooth_warp_mesh: |amplitude| too large for a positive Jacobian");
  const double hel = 2.0 / K1D;
  CurvedMesh2D mesh = mesh_from_map(ElementShape::Quadrilateral, N_geo, K1D * K1D, [&](int k, double r, double s) {
    const int i = k % K1D, j = k / K1D;
    const double X = -1.0 + (i + 0.5 * (1 + r)) * hel;
    const double Y = -1.0 + (j + 0.5 * (1 + s)) * hel;
    const double sx = std::sin(pi * X);
    return std::array<double, 2>{X + amplitude * sx * std::sin(pi * Y), Y + 0.5 * amplitude * sx * std::sin(2 * pi * Y)};
  });
  MeshFamily fam{MeshFamilyKind::SmoothWarp};
  fam.K1D = K1D;
  fam.amplitude = amplitude;
  detail::finalize(mesh, fam, hel);
  return mesh;
}

/// Straight-sided triangulation of the unit disk by concentric rings: ring i
/// carries 6i vertices at radius i/n, giving 6 n^2 triangles.
inline void disk_ring_triangulation(int n, std::vector<std::array<double, 2>>& verts,
                                    std::vector<std::vector<int>>& tris) {
  if (n < 1) throw std::invalid_argument("disk_ring_triangulation: n must be >= 1");
  verts.assign(1, {0.0, 0.0});
  std::vector<int> ring_start{0};
  for (int i = 1; i <= n; ++i) {
    ring_start.push_back(static_cast<int>(verts.size()));
    for (int m = 0; m < 6 * i; ++m) {
      const double th = 2.0 * std::numbers::pi * m / (6.0 * i);
      verts.push_back({std::cos(th) * i / n, std::sin(th) * i / n});
    }
  }
  auto ring_vertex = [&](int i, int m) {
    if (i == 0) return 0;
    return ring_start[i] + (m % (6 * i));
  };
  tris.clear();
  auto add = [&](int a, int b, int c) {
    const auto &A = verts[a], &B = verts[b], &C = verts[c];
    const double area = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
    if (area > 0) tris.push_back({a, b, c});
    else tris.push_back({a, c, b});
  };
  for (int i = 1; i <= n; ++i)
    for (int sec = 0; sec < 6; ++sec) {
      for (int m = 0; m < i; ++m)
        add(ring_vertex(i - 1, sec * (i - 1) + m), ring_vertex(i, sec * i + m), ring_vertex(i, sec * i + m + 1));
      for (int m = 0; m + 1 < i; ++m)
        add(ring_vertex(i - 1, sec * (i - 1) + m), ring_vertex(i, sec * i + m + 1),
            ring_vertex(i - 1, sec * (i - 1) + m + 1));
    }
}

namespace detail {

inline std::map<std::pair<int, int>, int> edge_counts(const std::vector<std::vector<int>>& elems) {
  std::map<std::pair<int, int>, int> cnt;
  for (const auto& e : elems)
    for (std::size_t f = 0; f < e.size(); ++f) {
      const int a = e[f], b = e[(f + 1) % e.size()];
      ++cnt[{std::min(a, b), std::max(a, b)}];
    }
  return cnt;
}

inline bool on_unit_circle(const std::array<double, 2>& v) { return std::abs(std::hypot(v[0], v[1]) - 1.0) < 1e-12; }

} // namespace detail

/// Isoparametric disk mesh from a straight-sided triangulation whose boundary
/// vertices lie on the unit circle. Each boundary edge is replaced by the arc
/// with angle linear in the edge parameter, and the edge displacement is
/// blended into the element by Gordon-Hall interpolation.
inline CurvedMesh2D gordon_hall_disk_mesh(const std::vector<std::array<double, 2>>& verts,
                                          const std::vector<std::vector<int>>& tris, int N_geo) {
  if (N_geo < 1) throw std::invalid_argument("gordon_hall_disk_mesh: N_geo must be >= 1");
  const auto cnt = detail::edge_counts(tris);
  CurvedMesh2D mesh =
      mesh_from_map(ElementShape::Triangle, N_geo, static_cast<int>(tris.size()), [&](int k, double r, double s) {
        const auto& t = tris[k];
        const auto l = detail::barycentric(r, s);
        std::array<double, 2> p{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
          p[0] += l[i] * verts[t[i]][0];
          p[1] += l[i] * verts[t[i]][1];
        }
        for (int f = 0; f < 3; ++f) {
          const int ia = f, ib = (f + 1) % 3;
          const int a = t[ia], b = t[ib];
          if (cnt.at({std::min(a, b), std::max(a, b)}) != 1) continue;
          if (!detail::on_unit_circle(verts[a]) || !detail::on_unit_circle(verts[b])) continue;
          const double la = l[ia], lb = l[ib];
          if (!(la * lb > 0.0)) continue;
          const double tt = lb - la;
          const double tha = std::atan2(verts[a][1], verts[a][0]);
          const double dth = std::remainder(std::atan2(verts[b][1], verts[b][0]) - tha, 2.0 * std::numbers::pi);
          const double th = tha + 0.5 * (1.0 + tt) * dth;
          const double cx = 0.5 * (1 - tt) * verts[a][0] + 0.5 * (1 + tt) * verts[b][0];
          const double cy = 0.5 * (1 - tt) * verts[a][1] + 0.5 * (1 + tt) * verts[b][1];
          const double scale = la * lb * 4.0 / (1.0 - tt * tt);
          p[0] += scale * (std::cos(th) - cx);
          p[1] += scale * (std::sin(th) - cy);
        }
        return p;
      });
  mesh.vertices = verts;
  mesh.elem_vertices = tris;
  // Mean straight edge length: it halves under nested refinement, while the
  // largest diameter is skewed on coarse levels by boundary midpoint snapping.
  double edge_sum = 0.0;
  for (const auto& t : tris)
    for (int f = 0; f < 3; ++f)
      edge_sum += std::hypot(verts[t[(f + 1) % 3]][0] - verts[t[f]][0], verts[t[(f + 1) % 3]][1] - verts[t[f]][1]);
  MeshFamily fam{MeshFamilyKind::Disk};
  detail::finalize(mesh, fam, edge_sum / (3.0 * static_cast<double>(tris.size())));
  return mesh;
}

namespace detail {

/// Nested midpoint subdivision of a triangulation; boundary-edge midpoints on
/// the unit circle are moved onto the circle.
inline void subdivide_disk_skeleton(std::vector<std::array<double, 2>>& verts, std::vector<std::vector<int>>& tris) {
  const auto cnt = edge_counts(tris);
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    if (auto it = mid.find(key); it != mid.end()) return it->second;
    std::array<double, 2> m{0.5 * (verts[a][0] + verts[b][0]), 0.5 * (verts[a][1] + verts[b][1])};
    if (cnt.at(key) == 1 && on_unit_circle(verts[a]) && on_unit_circle(verts[b])) {
      const double r = std::hypot(m[0], m[1]);
      m = {m[0] / r, m[1] / r};
    }
    verts.push_back(m);
    return mid[key] = static_cast<int>(verts.size()) - 1;
  };
  std::vector<std::vector<int>> out;
  out.reserve(4 * tris.size());
  for (const auto& t : tris) {
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    out.push_back({t[0], m01, m20});
    out.push_back({m01, t[1], m12});
    out.push_back({m20, m12, t[2]});
    out.push_back({m01, m12, m20});
  }
  tris = std::move(out);
}

} // namespace detail

/// Disk family member: ring triangulation with `rings` rings, refined `level`
/// times by nested midpoint subdivision, then curved at degree N_geo.
inline CurvedMesh2D disk_mesh(int level, int N_geo, int rings = 2) {
  std::vector<std::array<double, 2>> verts;
  std::vector<std::vector<int>> tris;
  disk_ring_triangulation(rings, verts, tris);
  for (int l = 0; l < level; ++l) detail::subdivide_disk_skeleton(verts, tris);
  CurvedMesh2D mesh = gordon_hall_disk_mesh(verts, tris, N_geo);
  mesh.family.level = level;
  mesh.family.K1D = rings;
  return mesh;
}

/// Splits every element into four children in reference space, keeping the
/// parent's polynomial map. Used for meshes without a generator family.
inline CurvedMesh2D refine_by_subdivision(const CurvedMesh2D& mesh) {
  const NodalBasis gb(mesh.shape, mesh.N_geo);
  const int Npg = gb.size();
  const ElementShape shape = mesh.shape;
  CurvedMesh2D out;
  out.shape = shape;
  out.N_geo = mesh.N_geo;
  out.K = 4 * mesh.K;
  out.x.resize(Npg, out.K);
  out.y.resize(Npg, out.K);
  using V = std::array<double, 2>;
  std::array<std::array<V, 3>, 4> tri_children{};
  const V P0{-1, -1}, P1{1, -1}, P2{-1, 1}, m01{0, -1}, m12{0, 0}, m20{-1, 0};
  tri_children = {{{P0, m01, m20}, {m01, P1, m12}, {m20, m12, P2}, {m01, m12, m20}}};
  for (int c = 0; c < 4; ++c) {
    Eigen::ArrayXd rc(Npg), sc(Npg);
    for (int i = 0; i < Npg; ++i) {
      const double r = gb.r()(i), s = gb.s()(i);
      if (shape == ElementShape::Quadrilateral) {
        rc(i) = -1.0 + (c % 2) + 0.5 * (1 + r);
        sc(i) = -1.0 + (c / 2) + 0.5 * (1 + s);
      } else {
        const auto l = detail::barycentric(r, s);
        const auto& cv = tri_children[c];
        rc(i) = l[0] * cv[0][0] + l[1] * cv[1][0] + l[2] * cv[2][0];
        sc(i) = l[0] * cv[0][1] + l[1] * cv[1][1] + l[2] * cv[2][1];
      }
    }
    const Eigen::MatrixXd I = gb.interpolation_matrix(rc, sc);
    for (int k = 0; k < mesh.K; ++k) {
      out.x.col(4 * k + c) = I * mesh.x.col(k);
      out.y.col(4 * k + c) = I * mesh.y.col(k);
    }
  }
  detail::finalize(out, mesh.family, 0.5 * mesh.h);
  return out;
}

/// Next member of the mesh family with h halved. Generated families are
/// regenerated at the next level; disk meshes are refined by nested
/// subdivision of the straight skeleton and re-blended.
inline CurvedMesh2D refine(const CurvedMesh2D& mesh) {
  const MeshFamily& f = mesh.family;
  switch (f.kind) {
  case MeshFamilyKind::UniformQuad: return uniform_quad_mesh(2 * f.K1D, f.x0, f.x1, f.y0, f.y1, mesh.N_geo);
  case MeshFamilyKind::UniformTri: return uniform_tri_mesh(2 * f.K1D, f.x0, f.x1, f.y0, f.y1, mesh.N_geo);
  case MeshFamilyKind::Arnold: return arnold_mesh(f.level + 1);
  case MeshFamilyKind::RandomPerturbed: return random_perturbed_mesh(2 * f.K1D, mesh.N_geo, f.amplitude, f.seed);
  case MeshFamilyKind::WarpedArnold: return warped_arnold_mesh(f.omega, 2 * f.K1D, mesh.N_geo);
  case MeshFamilyKind::SmoothWarp: return smooth_warp_mesh(2 * f.K1D, mesh.N_geo, f.amplitude);
  case MeshFamilyKind::Disk: {
    if (mesh.vertices.empty()) return refine_by_subdivision(mesh);
    auto verts = mesh.vertices;
    auto tris = mesh.elem_vertices;
    detail::subdivide_disk_skeleton(verts, tris);
    CurvedMesh2D out = gordon_hall_disk_mesh(verts, tris, mesh.N_geo);
    out.family.level = f.level + 1;
    out.family.K1D = f.K1D;
    return out;
  }
  default: return refine_by_subdivision(mesh);
  }
}

} // namespace wadg
