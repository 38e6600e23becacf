#pragma once

// Geometric factors of the isoparametric maps at volume and face quadrature
// points, the exterior-trace index map, and Sobolev norms of the Jacobian.

#include "wadg/mesh.hpp"

namespace wadg {

struct GeometricData {
  int K = 0;
  int Nq = 0;
  int Nfq_total = 0; // face quadrature points per element (all faces)

  // Nq x K
  Eigen::MatrixXd xq, yq, J, rx, ry, sx, sy;
  // Nfq_total x K
  Eigen::MatrixXd xf, yf, nx, ny, Jf;
  /// Exterior index (into column-major Nfq_total x K arrays) of each face point.
  std::vector<int> mapP;
  /// 1 for face points on Dirichlet boundary faces.
  std::vector<char> boundary;

  Eigen::VectorXd area, perimeter;
};

/// Evaluates geometric data of `mesh` at the quadrature points of `ref`.
/// Throws NonPositiveJacobian on inverted elements and MeshError when
/// exterior face points cannot be matched.
inline GeometricData compute_geometric_data(const CurvedMesh2D& mesh, const ReferenceElement& ref) {
  if (mesh.shape != ref.shape) throw ConfigError("mesh and reference element shapes differ");
  if (ref.N < mesh.N_geo) throw ConfigError("polynomial degree N must be >= mapping degree N_geo");
  GeometricData g;
  g.K = mesh.K;
  g.Nq = ref.Nq;
  g.Nfq_total = ref.Nfaces * ref.Nfq;
  const NodalBasis gb(mesh.shape, mesh.N_geo);

  Eigen::MatrixXd Dr, Ds;
  gb.derivative_matrices(ref.vol_quad.r, ref.vol_quad.s, Dr, Ds);
  const Eigen::MatrixXd Iq = gb.interpolation_matrix(ref.vol_quad.r, ref.vol_quad.s);
  g.xq = Iq * mesh.x;
  g.yq = Iq * mesh.y;
  const Eigen::ArrayXXd xr = (Dr * mesh.x).array(), xs = (Ds * mesh.x).array();
  const Eigen::ArrayXXd yr = (Dr * mesh.y).array(), ys = (Ds * mesh.y).array();
  const Eigen::ArrayXXd J = xr * ys - xs * yr;
  for (int k = 0; k < mesh.K; ++k)
    for (int i = 0; i < g.Nq; ++i)
      if (!(J(i, k) > 0.0)) throw NonPositiveJacobian(k, i, J(i, k));
  g.J = J.matrix();
  g.rx = (ys / J).matrix();
  g.ry = (-xs / J).matrix();
  g.sx = (-yr / J).matrix();
  g.sy = (xr / J).matrix();

  Eigen::MatrixXd Drf, Dsf;
  gb.derivative_matrices(ref.rf, ref.sf, Drf, Dsf);
  const Eigen::MatrixXd If = gb.interpolation_matrix(ref.rf, ref.sf);
  g.xf = If * mesh.x;
  g.yf = If * mesh.y;
  const Eigen::ArrayXXd xrf = (Drf * mesh.x).array(), xsf = (Dsf * mesh.x).array();
  const Eigen::ArrayXXd yrf = (Drf * mesh.y).array(), ysf = (Dsf * mesh.y).array();
  g.nx.resize(g.Nfq_total, mesh.K);
  g.ny.resize(g.Nfq_total, mesh.K);
  g.Jf.resize(g.Nfq_total, mesh.K);
  for (int f = 0; f < ref.Nfaces; ++f) {
    const auto tan = face_tangent(mesh.shape, f);
    for (int i = 0; i < ref.Nfq; ++i) {
      const int row = f * ref.Nfq + i;
      for (int k = 0; k < mesh.K; ++k) {
        const double dx = xrf(row, k) * tan[0] + xsf(row, k) * tan[1];
        const double dy = yrf(row, k) * tan[0] + ysf(row, k) * tan[1];
        const double len = std::hypot(dx, dy);
        g.Jf(row, k) = len;
        g.nx(row, k) = dy / len;
        g.ny(row, k) = -dx / len;
      }
    }
  }

  const Eigen::VectorXd w = ref.vol_quad.weights.matrix();
  g.area = g.J.transpose() * w;
  g.perimeter = g.Jf.transpose() * ref.wf.matrix();

  // Exterior trace map.
  const int Nfq = ref.Nfq;
  g.mapP.resize(static_cast<std::size_t>(g.Nfq_total) * mesh.K);
  g.boundary.assign(g.mapP.size(), 0);
  const double tol = 1e-8 * std::max(1.0, std::max(g.xf.cwiseAbs().maxCoeff(), g.yf.cwiseAbs().maxCoeff()));
  for (int k = 0; k < mesh.K; ++k)
    for (int f = 0; f < ref.Nfaces; ++f) {
      const FaceNeighbor nb = mesh.face_connectivity[k][f];
      for (int i = 0; i < Nfq; ++i) {
        const int row = f * Nfq + i;
        const std::size_t idM = static_cast<std::size_t>(k) * g.Nfq_total + row;
        if (nb.boundary()) {
          g.mapP[idM] = static_cast<int>(idM);
          g.boundary[idM] = 1;
          continue;
        }
        auto dist = [&](int j) {
          const int rowP = nb.face * Nfq + j;
          return std::hypot(g.xf(row, k) - g.xf(rowP, nb.elem), g.yf(row, k) - g.yf(rowP, nb.elem));
        };
        int match = Nfq - 1 - i;
        if (dist(match) > tol) {
          match = -1;
          for (int j = 0; j < Nfq; ++j)
            if (dist(j) <= tol) match = j;
          if (match < 0)
            throw MeshError("no exterior match for face point " + std::to_string(i) + " of element " +
                            std::to_string(k) + " face " + std::to_string(f));
        }
        g.mapP[idM] = nb.elem * g.Nfq_total + nb.face * Nfq + match;
      }
    }
  return g;
}

/// Per-element Sobolev data of the mapping Jacobian.
struct JacobianNorms {
  Eigen::VectorXd inv_J_inf;  // ||1/J||_{L^inf}
  Eigen::VectorXd J_sobolev;  // ||J||_{W^{s,inf}} = max over |alpha| <= s of sup |D^alpha J|
  double kappa = 0.0;         // max_k ||1/J|| ||J||_{W^{s,inf}}
};

namespace detail {

/// Bivariate Taylor polynomial truncated at total order n <= kMaxOrder;
/// c[i][j] multiplies a^i b^j and entries with i + j > n stay zero.
struct Jet {
  static constexpr int kMaxOrder = 7;
  int n = 0;
  std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> c{};

  explicit Jet(int order = 0) : n(order) {}

  Jet operator*(const Jet& o) const {
    Jet out(n);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) {
        const double v = c[i][j];
        if (v == 0.0) continue;
        for (int k = 0; i + j + k <= n; ++k)
          for (int l = 0; i + j + k + l <= n; ++l) out.c[i + k][j + l] += v * o.c[k][l];
      }
    return out;
  }
  Jet& axpy(double a, const Jet& o) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) c[i][j] += a * o.c[i][j];
    return *this;
  }
  /// d/da; the top order becomes zero.
  Jet da() const {
    Jet out(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + 1 + j <= n; ++j) out.c[i][j] = (i + 1) * c[i + 1][j];
    return out;
  }
  Jet db() const {
    Jet out(n);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j + 1 <= n; ++j) out.c[i][j] = (j + 1) * c[i][j + 1];
    return out;
  }
};

/// f(a(x, y), b(x, y)) for jets a, b without constant terms, by Horner's
/// rule in a over coefficients that are polynomials in b.
inline Jet compose(const Jet& f, const Jet& a, const Jet& b) {
  const int n = f.n;
  std::array<Jet, Jet::kMaxOrder + 1> bp;
  bp.fill(Jet(n));
  bp[0].c[0][0] = 1.0;
  for (int j = 1; j <= n; ++j) bp[j] = bp[j - 1] * b;
  Jet out(n);
  for (int i = n; i >= 0; --i) {
    if (i < n) out = out * a;
    for (int j = 0; i + j <= n; ++j)
      if (f.c[i][j] != 0.0) out.axpy(f.c[i][j], bp[j]);
  }
  return out;
}

/// Monomial exponents spanning the mapping space of the shape at degree N.
inline std::vector<std::pair<int, int>> map_monomials(ElementShape shape, int N) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      if (shape == ElementShape::Quadrilateral || i + j <= N) e.emplace_back(i, j);
  return e;
}

/// Taylor jet of sum_m coef(m) r^p s^q about (r0, s0), truncated at order n.
inline Jet taylor_jet(const std::vector<std::pair<int, int>>& mono, const Eigen::VectorXd& coef, double r0, double s0,
                      int n) {
  auto binom = [](int a, int b) {
    double v = 1.0;
    for (int k = 1; k <= b; ++k) v = v * (a - b + k) / k;
    return v;
  };
  Jet out(n);
  for (std::size_t m = 0; m < mono.size(); ++m) {
    const auto [p, q] = mono[m];
    for (int i = 0; i <= std::min(p, n); ++i)
      for (int j = 0; j <= q && i + j <= n; ++j)
        out.c[i][j] += coef(m) * binom(p, i) * std::pow(r0, p - i) * binom(q, j) * std::pow(s0, q - j);
  }
  return out;
}

} // namespace detail

/// Physical derivatives of J up to order s at sample points of every element
/// (mapping nodes plus an oversampled quadrature grid). At each point the
/// polynomial map is expanded in a Taylor series, inverted as a series in the
/// physical displacement, and composed with the series of J, so D^alpha J is
/// exact up to rounding.
inline JacobianNorms sobolev_seminorm_J(const CurvedMesh2D& mesh, int s) {
  if (s < 0 || s + 1 > detail::Jet::kMaxOrder)
    throw std::invalid_argument("sobolev_seminorm_J: order must lie in [0, " +
                                std::to_string(detail::Jet::kMaxOrder - 1) + "]");
  const int Ng = mesh.N_geo;
  const NodalBasis gb(mesh.shape, Ng);
  const QuadratureRule dense = build_quadrature(mesh.shape, std::max(4 * Ng, 2 * s + 2));
  const int Npg = gb.r().size();
  Eigen::VectorXd sr(Npg + dense.r.size()), ss(Npg + dense.r.size());
  sr << gb.r(), dense.r;
  ss << gb.s(), dense.s;

  const auto mono = detail::map_monomials(mesh.shape, Ng);
  Eigen::MatrixXd Vm(Npg, static_cast<Eigen::Index>(mono.size()));
  for (int i = 0; i < Npg; ++i)
    for (std::size_t m = 0; m < mono.size(); ++m)
      Vm(i, m) = std::pow(gb.r()(i), mono[m].first) * std::pow(gb.s()(i), mono[m].second);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(Vm);

  JacobianNorms out;
  out.inv_J_inf.resize(mesh.K);
  out.J_sobolev.resize(mesh.K);
  const int n = s + 1;
  for (int k = 0; k < mesh.K; ++k) {
    const Eigen::VectorXd cx = lu.solve(mesh.x.col(k).eval()), cy = lu.solve(mesh.y.col(k).eval());
    double jmin = std::numeric_limits<double>::infinity(), jsob = 0.0;
    for (Eigen::Index p = 0; p < sr.size(); ++p) {
      const detail::Jet X = detail::taylor_jet(mono, cx, sr(p), ss(p), n);
      const detail::Jet Y = detail::taylor_jet(mono, cy, sr(p), ss(p), n);
      detail::Jet J = X.da() * Y.db();
      J.axpy(-1.0, X.db() * Y.da());
      jmin = std::min(jmin, J.c[0][0]);

      // Displacements (a, b) in reference space as series in (xi, eta):
      // A (a, b) = (xi, eta) - nonlinear part, solved by fixed point.
      Eigen::Matrix2d A;
      A << X.c[1][0], X.c[0][1], Y.c[1][0], Y.c[0][1];
      const Eigen::Matrix2d Ainv = A.inverse();
      detail::Jet Xn = X, Yn = Y;
      Xn.c[0][0] = Xn.c[1][0] = Xn.c[0][1] = 0.0;
      Yn.c[0][0] = Yn.c[1][0] = Yn.c[0][1] = 0.0;
      detail::Jet a(n), b(n);
      for (int it = 0; it < n; ++it) {
        detail::Jet fx(n), fy(n);
        fx.c[1][0] = 1.0;
        fy.c[0][1] = 1.0;
        if (it > 0) {
          fx.axpy(-1.0, detail::compose(Xn, a, b));
          fy.axpy(-1.0, detail::compose(Yn, a, b));
        }
        a = detail::Jet(n).axpy(Ainv(0, 0), fx).axpy(Ainv(0, 1), fy);
        b = detail::Jet(n).axpy(Ainv(1, 0), fx).axpy(Ainv(1, 1), fy);
      }
      detail::Jet Js = J;
      for (int i = 0; i <= n; ++i) Js.c[i][n - i] = 0.0;
      const detail::Jet Jx = detail::compose(Js, a, b);
      double fi = 1.0;
      for (int i = 0; i <= s; ++i) {
        if (i > 0) fi *= i;
        double fj = 1.0;
        for (int j = 0; i + j <= s; ++j) {
          if (j > 0) fj *= j;
          jsob = std::max(jsob, std::abs(Jx.c[i][j]) * fi * fj);
        }
      }
    }
    if (!(jmin > 0.0)) throw NonPositiveJacobian(k, -1, jmin);
    out.inv_J_inf(k) = 1.0 / jmin;
    out.J_sobolev(k) = jsob;
  }
  out.kappa = out.inv_J_inf.cwiseProduct(out.J_sobolev).maxCoeff();
  return out;
}

} // namespace wadg
