#pragma once

// Semi-discrete DG operators for the first-order acoustic system
//   (1/c^2) p_t + div u = 0,   u_t + grad p = 0
// with penalty fluxes, Dirichlet (p = 0) boundaries, weight-adjusted or exact
// curved mass inversion, and low-storage RK time stepping.

#include "wadg/lsrk.hpp"
#include "wadg/operators.hpp"

#include <optional>

namespace wadg {

enum class Formulation { Strong, StrongWeak };
enum class MassMode { WADG, ExactCurvedMass };

inline const char* to_string(Formulation f) { return f == Formulation::Strong ? "strong" : "strong-weak"; }
inline const char* to_string(MassMode m) { return m == MassMode::WADG ? "wadg" : "exact"; }

struct FluxParams {
  double tau_p = 1.0;
  double tau_u = 1.0;
};

/// Degrees of freedom of (p, u1, u2), each Np x K.
struct FieldState {
  Eigen::MatrixXd p, u1, u2;
  double t = 0.0;

  static FieldState zeros(int Np, int K) {
    return {Eigen::MatrixXd::Zero(Np, K), Eigen::MatrixXd::Zero(Np, K), Eigen::MatrixXd::Zero(Np, K), 0.0};
  }
  void scale_add(double a, double dt, const FieldState& k) {
    p = a * p + dt * k.p;
    u1 = a * u1 + dt * k.u1;
    u2 = a * u2 + dt * k.u2;
  }
  void add(double b, const FieldState& r) {
    p += b * r.p;
    u1 += b * r.u1;
    u2 += b * r.u2;
  }
  bool all_finite() const { return p.allFinite() && u1.allFinite() && u2.allFinite(); }
  Eigen::Index size() const { return p.size() + u1.size() + u2.size(); }
};

/// Squared wavespeed at volume quadrature points (density fixed to 1).
struct MediumField {
  ScalarFn c2_fn;
  Eigen::MatrixXd c2_q;

  static MediumField from_function(const GeometricData& geo, ScalarFn fn) {
    MediumField m;
    m.c2_q = eval_at_points(fn, geo.xq, geo.yq);
    m.c2_fn = std::move(fn);
    if (!(m.c2_q.minCoeff() > 0.0)) throw ConfigError("wavespeed squared must be positive");
    return m;
  }
  static MediumField constant(const GeometricData& geo, double c2 = 1.0) {
    return from_function(geo, [c2](double, double) { return c2; });
  }
};

struct SolverConfig {
  Formulation formulation = Formulation::Strong;
  MassMode mass_mode = MassMode::WADG;
  FluxParams flux;
  double cfl = 0.5;
  int volume_quad_degree = -1; // < 0: rule default
  int face_quad_degree = -1;
  bool unsafe_quadrature = false;
};

/// Quadrature degrees for which discrete integration by parts holds for the
/// strong form on degree-N_geo maps. Tensor rules need one extra degree in
/// the volume because the geometric factors are of full degree N_geo in the
/// tangential direction.
inline std::pair<int, int> sufficiency_degrees(ElementShape shape, int N, int N_geo) {
  const int vol = shape == ElementShape::Triangle ? 2 * N + N_geo - 2 : 2 * N + N_geo - 1;
  return {vol, 2 * N + N_geo - 1};
}

/// Resolves and validates the quadrature degrees of a configuration.
inline std::pair<int, int> resolve_quadrature(const SolverConfig& cfg, ElementShape shape, int N, int N_geo) {
  const auto [svol, sface] = sufficiency_degrees(shape, N, N_geo);
  int need_vol = 2 * N + 1, need_face = 2 * N + 1;
  if (cfg.formulation == Formulation::Strong) {
    need_vol = std::max(need_vol, svol);
    need_face = std::max(need_face, sface);
  }
  const int vol = cfg.volume_quad_degree >= 0 ? cfg.volume_quad_degree : need_vol;
  const int face = cfg.face_quad_degree >= 0 ? cfg.face_quad_degree : need_face;
  if (!cfg.unsafe_quadrature && (vol < need_vol || face < need_face))
    throw ConfigError("quadrature degrees (" + std::to_string(vol) + ", " + std::to_string(face) +
                      ") are below the required (" + std::to_string(need_vol) + ", " + std::to_string(need_face) +
                      ") for the " + to_string(cfg.formulation) + " formulation; set unsafe_quadrature to override");
  if (vol < 0 || face < 0) throw ConfigError("quadrature degrees must be nonnegative");
  return {vol, face};
}

using SpaceTimeFn = std::function<double(double, double, double)>;

struct TimeSample {
  double t;
  double energy;
  double l2_error_p; // NaN without an exact solution
};

struct RunResult {
  FieldState state;
  std::vector<TimeSample> series;
  double dt = 0.0;
  long steps = 0;
  double final_error_p = std::numeric_limits<double>::quiet_NaN();
};

class AcousticSolver {
public:
  AcousticSolver(const CurvedMesh2D& mesh, int N, SolverConfig cfg, ScalarFn c2 = nullptr) : cfg_(cfg) {
    if (cfg.cfl <= 0.0) throw ConfigError("cfl must be positive");
    if (cfg.flux.tau_p < 0.0 || cfg.flux.tau_u < 0.0) throw ConfigError("penalty parameters must be nonnegative");
    const auto [vol, face] = resolve_quadrature(cfg, mesh.shape, N, mesh.N_geo);
    ref_ = build_reference_element(N, mesh.shape, vol, face);
    geo_ = compute_geometric_data(mesh, ref_);
    medium_ = c2 ? MediumField::from_function(geo_, c2) : MediumField::constant(geo_);

    rxJ_ = geo_.rx.cwiseProduct(geo_.J);
    ryJ_ = geo_.ry.cwiseProduct(geo_.J);
    sxJ_ = geo_.sx.cwiseProduct(geo_.J);
    syJ_ = geo_.sy.cwiseProduct(geo_.J);
    c2_over_J_ = medium_.c2_q.cwiseQuotient(geo_.J);
    inv_J_ = geo_.J.cwiseInverse();
    if (cfg.mass_mode == MassMode::ExactCurvedMass) build_exact_mass(mesh);
  }

  const ReferenceElement& ref() const { return ref_; }
  const GeometricData& geo() const { return geo_; }
  const MediumField& medium() const { return medium_; }
  const SolverConfig& config() const { return cfg_; }
  int K() const { return geo_.K; }
  int Np() const { return ref_.Np; }

  FieldState zero_state() const { return FieldState::zeros(ref_.Np, geo_.K); }

  /// Volume terms of the strong form, premultiplied by Mhat^{-1}. Overwrites out.
  void volume_strong(const FieldState& q, FieldState& out) const {
    const Eigen::MatrixXd pr = ref_.Vrq * q.p, ps = ref_.Vsq * q.p;
    const Eigen::MatrixXd u1r = ref_.Vrq * q.u1, u1s = ref_.Vsq * q.u1;
    const Eigen::MatrixXd u2r = ref_.Vrq * q.u2, u2s = ref_.Vsq * q.u2;
    const Eigen::ArrayXXd divJ = rxJ_.array() * u1r.array() + sxJ_.array() * u1s.array() +
                                 ryJ_.array() * u2r.array() + syJ_.array() * u2s.array();
    const Eigen::ArrayXXd dpdxJ = rxJ_.array() * pr.array() + sxJ_.array() * ps.array();
    const Eigen::ArrayXXd dpdyJ = ryJ_.array() * pr.array() + syJ_.array() * ps.array();
    out.p.noalias() = -(ref_.Pq * divJ.matrix());
    out.u1.noalias() = -(ref_.Pq * dpdxJ.matrix());
    out.u2.noalias() = -(ref_.Pq * dpdyJ.matrix());
    out.t = q.t;
  }

  /// Volume terms of the strong-weak form: the pressure equation is integrated
  /// by parts once, the velocity equation is as in the strong form.
  void volume_strong_weak(const FieldState& q, FieldState& out) const {
    const Eigen::MatrixXd pr = ref_.Vrq * q.p, ps = ref_.Vsq * q.p;
    const Eigen::ArrayXXd u1q = (ref_.Vq * q.u1).array(), u2q = (ref_.Vq * q.u2).array();
    const Eigen::ArrayXXd ur = rxJ_.array() * u1q + ryJ_.array() * u2q;
    const Eigen::ArrayXXd us = sxJ_.array() * u1q + syJ_.array() * u2q;
    const Eigen::ArrayXXd dpdxJ = rxJ_.array() * pr.array() + sxJ_.array() * ps.array();
    const Eigen::ArrayXXd dpdyJ = ryJ_.array() * pr.array() + syJ_.array() * ps.array();
    out.p.noalias() = ref_.Prq * ur.matrix();
    out.p.noalias() += ref_.Psq * us.matrix();
    out.u1.noalias() = -(ref_.Pq * dpdxJ.matrix());
    out.u2.noalias() = -(ref_.Pq * dpdyJ.matrix());
    out.t = q.t;
  }

  /// Subtracts the projected face fluxes from out. The strong form uses the
  /// jump of u in the pressure flux, the strong-weak form twice its average.
  void surface_terms(const FieldState& q, Formulation form, FieldState& out) const {
    Eigen::MatrixXd fp, fu1, fu2;
    face_fluxes(q, form == Formulation::StrongWeak, fp, fu1, fu2);
    out.p.noalias() -= ref_.Pfq * fp;
    out.u1.noalias() -= ref_.Pfq * fu1;
    out.u2.noalias() -= ref_.Pfq * fu2;
  }

  /// Strong-form right-hand side premultiplied by Mhat^{-1} (before the curved mass inverse).
  void rhs_strong(const FieldState& q, FieldState& out) const {
    volume_strong(q, out);
    surface_terms(q, Formulation::Strong, out);
  }

  void rhs_strong_weak(const FieldState& q, FieldState& out) const {
    volume_strong_weak(q, out);
    surface_terms(q, Formulation::StrongWeak, out);
  }

  void rhs_pre(const FieldState& q, FieldState& out) const {
    if (cfg_.formulation == Formulation::Strong) rhs_strong(q, out);
    else rhs_strong_weak(q, out);
  }

  /// Turns an Mhat^{-1}-premultiplied right-hand side into a time derivative.
  /// WADG: Pq diag(c^2/J) Vq on p and Pq diag(1/J) Vq on u.
  void apply_mass_inverse(FieldState& r) const {
    if (cfg_.mass_mode == MassMode::WADG) {
      r.p = ref_.Pq * (ref_.Vq * r.p).cwiseProduct(c2_over_J_);
      r.u1 = ref_.Pq * (ref_.Vq * r.u1).cwiseProduct(inv_J_);
      r.u2 = ref_.Pq * (ref_.Vq * r.u2).cwiseProduct(inv_J_);
      return;
    }
#pragma omp parallel for schedule(static)
    for (int k = 0; k < geo_.K; ++k) {
      r.p.col(k) = exact_p_[k] * r.p.col(k);
      r.u1.col(k) = exact_u_[k] * r.u1.col(k);
      r.u2.col(k) = exact_u_[k] * r.u2.col(k);
    }
  }

  /// Full time derivative.
  void rhs(const FieldState& q, FieldState& out) const {
    rhs_pre(q, out);
    apply_mass_inverse(out);
  }

  /// Discrete energy 1/2 (p^T M_p p + u^T M_u u) in the norm of the mass mode:
  /// WADG uses Mhat M_{c^2/J}^{-1} Mhat and Mhat M_{1/J}^{-1} Mhat.
  double energy(const FieldState& q) const {
    double e = 0.0;
    for (int k = 0; k < geo_.K; ++k) {
      if (cfg_.mass_mode == MassMode::WADG) {
        const Eigen::VectorXd Mp = ref_.Mhat * q.p.col(k);
        const Eigen::VectorXd Mu1 = ref_.Mhat * q.u1.col(k), Mu2 = ref_.Mhat * q.u2.col(k);
        const Eigen::LLT<Eigen::MatrixXd> Lp(weighted_mass_matrix(ref_, c2_over_J_.col(k)));
        const Eigen::LLT<Eigen::MatrixXd> Lu(weighted_mass_matrix(ref_, inv_J_.col(k)));
        e += Mp.dot(Lp.solve(Mp)) + Mu1.dot(Lu.solve(Mu1)) + Mu2.dot(Lu.solve(Mu2));
      } else {
        e += q.p.col(k).dot(mass_p_[k] * q.p.col(k)) + q.u1.col(k).dot(mass_u_[k] * q.u1.col(k)) +
             q.u2.col(k).dot(mass_u_[k] * q.u2.col(k));
      }
    }
    return 0.5 * e;
  }

  /// d/dt energy = Q^T Mhat rhs_pre, independent of the mass mode.
  double energy_rate(const FieldState& q) const {
    FieldState r = zero_state();
    rhs_pre(q, r);
    return (q.p.cwiseProduct(ref_.Mhat * r.p)).sum() + (q.u1.cwiseProduct(ref_.Mhat * r.u1)).sum() +
           (q.u2.cwiseProduct(ref_.Mhat * r.u2)).sum();
  }

  /// dt = cfl min_k (2 area_k / perimeter_k) / (c_max,k (N+1)^2).
  double stable_dt() const {
    double dt = std::numeric_limits<double>::infinity();
    const double np1 = ref_.N + 1.0;
    for (int k = 0; k < geo_.K; ++k) {
      const double cmax = std::sqrt(medium_.c2_q.col(k).maxCoeff());
      dt = std::min(dt, 2.0 * geo_.area(k) / geo_.perimeter(k) / (cmax * np1 * np1));
    }
    return cfg_.cfl * dt;
  }

  /// Physical L2 projection of the initial data.
  FieldState project(const ScalarFn& p, const ScalarFn& u1, const ScalarFn& u2) const {
    FieldState q;
    q.p = l2_project(ref_, geo_, p);
    q.u1 = l2_project(ref_, geo_, u1);
    q.u2 = l2_project(ref_, geo_, u2);
    return q;
  }

  double pressure_error(const FieldState& q, const SpaceTimeFn& exact_p) const {
    const double t = q.t;
    return global_l2_error(ref_, geo_, q.p, [&](double x, double y) { return exact_p(x, y, t); });
  }

  /// Advances q0 to time T. Samples energy (and the pressure error when
  /// exact_p is given) every output_interval and at T. Throws BlowUp when the
  /// energy exceeds blowup_factor times its initial value.
  RunResult run(const FieldState& q0, double T, const SpaceTimeFn& exact_p = nullptr, double output_interval = 0.0,
                double dt = 0.0, double blowup_factor = 1e6) const {
    if (T < 0.0) throw ConfigError("final time must be nonnegative");
    RunResult res;
    res.dt = dt > 0.0 ? dt : stable_dt();
    FieldState q = q0;
    FieldState reg = zero_state(), k = zero_state();
    const double e0 = energy(q);
    auto sample = [&]() {
      const double e = energy(q);
      if (!std::isfinite(e) || (e0 > 0.0 && e > blowup_factor * e0))
        throw BlowUp(q.t, e0 > 0.0 ? e / e0 : std::numeric_limits<double>::infinity());
      res.series.push_back({q.t, e, exact_p ? pressure_error(q, exact_p) : std::numeric_limits<double>::quiet_NaN()});
    };
    sample();
    double next_out = output_interval > 0.0 ? output_interval : std::numeric_limits<double>::infinity();
    auto f = [this](double t, const FieldState& y, FieldState& out) {
      (void)t;
      rhs(y, out);
    };
    const double eps = 1e-12 * std::max(1.0, T);
    while (q.t < T - eps) {
      const double h = std::min(res.dt, T - q.t);
      const double t0 = q.t;
      lsrk_step(q, reg, k, t0, h, f);
      q.t = (T - (t0 + h) <= eps) ? T : t0 + h;
      ++res.steps;
      if (q.t >= next_out - eps && q.t < T) {
        sample();
        while (next_out <= q.t + eps) next_out += output_interval;
      } else if (!q.all_finite()) {
        throw BlowUp(q.t, std::numeric_limits<double>::infinity());
      }
    }
    if (res.series.back().t != q.t) sample();
    if (exact_p) res.final_error_p = res.series.back().l2_error_p;
    res.state = std::move(q);
    return res;
  }

  /// Bytes of per-element data read by the mass-inverse update.
  std::size_t update_bytes_per_element() const {
    if (cfg_.mass_mode == MassMode::WADG) return 2 * sizeof(double) * static_cast<std::size_t>(ref_.Nq);
    return 2 * sizeof(double) * static_cast<std::size_t>(ref_.Np) * ref_.Np;
  }

private:
  /// Face terms at face quadrature points, already multiplied by Jf.
  void face_fluxes(const FieldState& q, bool average_u, Eigen::MatrixXd& fp, Eigen::MatrixXd& fu1,
                   Eigen::MatrixXd& fu2) const {
    const Eigen::MatrixXd pM = ref_.Vfq * q.p, u1M = ref_.Vfq * q.u1, u2M = ref_.Vfq * q.u2;
    const int n = geo_.Nfq_total * geo_.K;
    fp.resize(geo_.Nfq_total, geo_.K);
    fu1.resize(geo_.Nfq_total, geo_.K);
    fu2.resize(geo_.Nfq_total, geo_.K);
    const double tp = cfg_.flux.tau_p, tu = cfg_.flux.tau_u;
    const double* pm = pM.data();
    const double* u1m = u1M.data();
    const double* u2m = u2M.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const int j = geo_.mapP[i];
      double pP = pm[j], u1P = u1m[j], u2P = u2m[j];
      if (geo_.boundary[i]) {
        pP = -pm[i];
        u1P = u1m[i];
        u2P = u2m[i];
      }
      const double nx = geo_.nx.data()[i], ny = geo_.ny.data()[i], Jf = geo_.Jf.data()[i];
      const double dp = pP - pm[i];
      const double dun = (u1P - u1m[i]) * nx + (u2P - u2m[i]) * ny;
      const double un = average_u ? (u1P + u1m[i]) * nx + (u2P + u2m[i]) * ny : dun;
      fp.data()[i] = 0.5 * (un - tp * dp) * Jf;
      const double fu = 0.5 * (dp - tu * dun) * Jf;
      fu1.data()[i] = fu * nx;
      fu2.data()[i] = fu * ny;
    }
  }

  void build_exact_mass(const CurvedMesh2D& mesh) {
    // Oversampled quadrature so that M_J is exact for constant wavespeed.
    const QuadratureRule q2 = build_quadrature(mesh.shape, 2 * ref_.N + 2 * mesh.N_geo);
    const NodalBasis gb(mesh.shape, mesh.N_geo);
    Eigen::MatrixXd Dr, Ds;
    gb.derivative_matrices(q2.r, q2.s, Dr, Ds);
    const Eigen::MatrixXd Ig = gb.interpolation_matrix(q2.r, q2.s);
    const Eigen::MatrixXd J =
        ((Dr * mesh.x).array() * (Ds * mesh.y).array() - (Ds * mesh.x).array() * (Dr * mesh.y).array()).matrix();
    const Eigen::MatrixXd xq = Ig * mesh.x, yq = Ig * mesh.y;
    const Eigen::MatrixXd V2 = ref_.basis.interpolation_matrix(q2.r, q2.s);
    const Eigen::VectorXd w2 = q2.weights.matrix();
    exact_p_.resize(geo_.K);
    exact_u_.resize(geo_.K);
    mass_p_.resize(geo_.K);
    mass_u_.resize(geo_.K);
    for (int k = 0; k < geo_.K; ++k) {
      Eigen::VectorXd wJ = w2.cwiseProduct(J.col(k));
      Eigen::VectorXd wJc = wJ;
      for (int i = 0; i < wJc.size(); ++i) wJc(i) /= medium_.c2_fn(xq(i, k), yq(i, k));
      mass_u_[k] = V2.transpose() * wJ.asDiagonal() * V2;
      mass_p_[k] = V2.transpose() * wJc.asDiagonal() * V2;
      Eigen::LLT<Eigen::MatrixXd> Lu(mass_u_[k]), Lp(mass_p_[k]);
      if (Lu.info() != Eigen::Success || Lp.info() != Eigen::Success)
        throw NotSPD("curved mass matrix of element " + std::to_string(k) + " is not positive definite");
      exact_u_[k] = Lu.solve(ref_.Mhat);
      exact_p_[k] = Lp.solve(ref_.Mhat);
    }
  }

  SolverConfig cfg_;
  ReferenceElement ref_;
  GeometricData geo_;
  MediumField medium_;
  Eigen::MatrixXd rxJ_, ryJ_, sxJ_, syJ_, c2_over_J_, inv_J_;
  std::vector<Eigen::MatrixXd> exact_p_, exact_u_, mass_p_, mass_u_;
};

} // namespace wadg
