#pragma once

// Convergence records, studies over mesh families, operator spectra, and the
// right-hand-side benchmark.

#include "wadg/meshgen.hpp"
#include "wadg/solver.hpp"
#include "wadg/special.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <complex>
#include <ostream>

namespace wadg {

/// (h, error) series with a least-squares log-log slope over the finest levels.
struct ConvergenceRecord {
  std::vector<double> h;
  std::vector<double> error;
  int window = 3;

  void add(double hh, double e) {
    if (!h.empty() && !(hh < h.back())) throw std::invalid_argument("ConvergenceRecord: h must decrease");
    h.push_back(hh);
    error.push_back(e);
  }
  std::size_t size() const { return h.size(); }

  /// Slope of log(error) against log(h) over the last `w` entries.
  double slope(int w = -1, double* residual = nullptr) const {
    const int n = static_cast<int>(h.size());
    const int m = std::min(n, w < 0 ? window : w);
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      A(i, 0) = std::log(h[n - m + i]);
      A(i, 1) = 1.0;
      b(i) = std::log(error[n - m + i]);
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    if (residual) *residual = (A * c - b).norm();
    return c(0);
  }

  void write_csv(std::ostream& os) const {
    os << "h,error,slope_window_flag\n";
    const int n = static_cast<int>(h.size());
    const int m = std::min(n, window);
    os.precision(17);
    for (int i = 0; i < n; ++i) os << h[i] << ',' << error[i] << ',' << (i >= n - m ? 1 : 0) << '\n';
  }
};

enum class ProjectionMethod { L2, WADG, LSC };

inline const char* to_string(ProjectionMethod m) {
  switch (m) {
  case ProjectionMethod::L2: return "l2";
  case ProjectionMethod::WADG: return "wadg";
  default: return "lsc";
  }
}

/// Volume quadrature degree used by the projection studies: exact for the
/// J-weighted mass matrix plus a margin for smooth non-polynomial data.
inline int projection_quad_degree(int N, int N_geo) { return 2 * N + 2 * N_geo + 2; }

/// Projection error of one method on one mesh.
inline double projection_error(const CurvedMesh2D& mesh, int N, ProjectionMethod method, const ScalarFn& fn,
                               int quad_degree = -1) {
  const int deg = quad_degree >= 0 ? quad_degree : projection_quad_degree(N, mesh.N_geo);
  const ReferenceElement ref = build_reference_element(N, mesh.shape, deg, deg);
  const GeometricData geo = compute_geometric_data(mesh, ref);
  switch (method) {
  case ProjectionMethod::L2: return global_l2_error(ref, geo, l2_project(ref, geo, fn), fn);
  case ProjectionMethod::WADG: return global_l2_error(ref, geo, wadg_pseudo_project(ref, geo, fn), fn);
  default: return combine_element_errors(lsc_projection_error(ref, geo, fn));
  }
}

inline double default_projection_target(double x, double y) {
  return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

/// Projection errors on `levels` successive members of the family of `base`.
inline ConvergenceRecord projection_convergence_study(const CurvedMesh2D& base, int levels, int N,
                                                      ProjectionMethod method, const ScalarFn& fn,
                                                      int quad_degree = -1) {
  ConvergenceRecord rec;
  CurvedMesh2D mesh = base;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) mesh = refine(mesh);
    rec.add(mesh.h, projection_error(mesh, N, method, fn, quad_degree));
  }
  return rec;
}

/// kappa_J = max_k ||1/J|| ||J||_{W^{N+1,inf}} over warped Arnold meshes with
/// K1D = K1D0 * 2^l.
inline ConvergenceRecord kappa_growth_study(double omega, int N, int levels, int K1D0 = 4, int N_geo = 3) {
  ConvergenceRecord rec;
  for (int l = 0; l < levels; ++l) {
    const CurvedMesh2D mesh = warped_arnold_mesh(omega, K1D0 << l, N_geo);
    rec.add(mesh.h, sobolev_seminorm_J(mesh, N + 1).kappa);
  }
  return rec;
}

/// Zeroth- through M-th moment discrepancy of the weight-adjusted inner
/// product with w = J over `levels` members of the family of `base`. Uses the
/// projection quadrature: a tensor rule of degree 2N+1 has exactly Np points,
/// which turns the weight-adjusted inverse into interpolation of w u and
/// makes the discrepancy vanish identically.
inline ConvergenceRecord conservation_rate_study(const CurvedMesh2D& base, int levels, int N, int M,
                                                 const ScalarFn& fn, bool project_weight = false) {
  ConvergenceRecord rec;
  CurvedMesh2D mesh = base;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) mesh = refine(mesh);
    const int deg = projection_quad_degree(N, mesh.N_geo);
    const ReferenceElement ref = build_reference_element(N, mesh.shape, deg, deg);
    const GeometricData geo = compute_geometric_data(mesh, ref);
    rec.add(mesh.h, conservation_moment_error(ref, geo, geo.J, fn, M, project_weight));
  }
  return rec;
}

/// One level of a disk wave study.
struct WaveLevel {
  int level = 0;
  int K = 0;
  double h = 0.0;
  double dt = 0.0;
  long steps = 0;
  double error = 0.0;
  double seconds = 0.0;
};

/// Runs the J0 disk mode to time T on one mesh and returns the pressure error.
inline WaveLevel run_disk_mode(const CurvedMesh2D& mesh, int N, const SolverConfig& cfg, double T,
                               double dt_scale = 1.0) {
  const auto t0 = std::chrono::steady_clock::now();
  const AcousticSolver solver(mesh, N, cfg);
  const DiskMode mode;
  FieldState q = solver.project([&](double x, double y) { return mode.pressure(x, y, 0.0); },
                                [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  const RunResult res = solver.run(q, T, [&](double x, double y, double t) { return mode.pressure(x, y, t); }, 0.0,
                                   dt_scale * solver.stable_dt());
  WaveLevel out;
  out.level = mesh.family.level;
  out.K = mesh.K;
  out.h = mesh.h;
  out.dt = res.dt;
  out.steps = res.steps;
  out.error = res.final_error_p;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Final-time pressure errors on disk meshes of levels 0..levels-1 with
/// isoparametric mapping degree N.
inline ConvergenceRecord wave_convergence_study(int N, int levels, const SolverConfig& cfg, double T = 1.0,
                                                int rings = 2, std::vector<WaveLevel>* details = nullptr) {
  ConvergenceRecord rec;
  CurvedMesh2D mesh = disk_mesh(0, N, rings);
  for (int l = 0; l < levels; ++l) {
    if (l > 0) mesh = refine(mesh);
    const WaveLevel wl = run_disk_mode(mesh, N, cfg, T);
    rec.add(wl.h, wl.error);
    if (details) details->push_back(wl);
  }
  return rec;
}

/// Dense matrix of the full semi-discrete operator (mass inverse included),
/// assembled column by column from unit vectors ordered (p, u1, u2), each
/// column-major Np x K.
inline Eigen::MatrixXd assemble_evolution_matrix(const AcousticSolver& solver, long cap = 6000) {
  const int Np = solver.Np(), K = solver.K();
  const long n = 3L * Np * K;
  if (n > cap) throw SizeCapExceeded(n, cap);
  Eigen::MatrixXd A(n, n);
  FieldState e = solver.zero_state(), r = solver.zero_state();
  const long blk = static_cast<long>(Np) * K;
  auto field = [&](FieldState& s, long j) -> double& {
    Eigen::MatrixXd& m = j < blk ? s.p : (j < 2 * blk ? s.u1 : s.u2);
    return m.data()[j % blk];
  };
  for (long j = 0; j < n; ++j) {
    field(e, j) = 1.0;
    solver.rhs(e, r);
    field(e, j) = 0.0;
    A.col(j).segment(0, blk) = Eigen::Map<const Eigen::VectorXd>(r.p.data(), blk);
    A.col(j).segment(blk, blk) = Eigen::Map<const Eigen::VectorXd>(r.u1.data(), blk);
    A.col(j).segment(2 * blk, blk) = Eigen::Map<const Eigen::VectorXd>(r.u2.data(), blk);
  }
  return A;
}

struct SpectrumResult {
  std::vector<std::complex<double>> eigenvalues; // sorted by magnitude, descending
  double max_real_part = 0.0;
  double spectral_radius = 0.0;
};

inline SpectrumResult eigenspectrum(const Eigen::MatrixXd& A) {
  SpectrumResult out;
  if (A.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw EigenSolveFailure("nonsymmetric eigenvalue solve did not converge");
  const Eigen::VectorXcd ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::stable_sort(out.eigenvalues.begin(), out.eigenvalues.end(),
                   [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  out.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& l : out.eigenvalues) {
    out.max_real_part = std::max(out.max_real_part, l.real());
    out.spectral_radius = std::max(out.spectral_radius, std::abs(l));
  }
  return out;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumResult& s) {
  os << "re,im\n";
  os.precision(17);
  for (const auto& l : s.eigenvalues) os << l.real() << ',' << l.imag() << '\n';
}

struct BenchmarkRow {
  std::string phase; // "<formulation>/<volume|surface|update>"
  int N = 0;
  int K = 0;
  double ns_per_dof = 0.0;
};

/// Median wall time of each right-hand-side phase, per degree of freedom
/// (3 Np K unknowns), for the volume, surface, and update phases of the
/// solver's formulation.
inline std::vector<BenchmarkRow> benchmark_rhs(const AcousticSolver& solver, int repetitions = 20) {
  if (repetitions < 10) throw ConfigError("benchmark needs at least 10 repetitions");
  FieldState q = solver.zero_state();
  q.p.setRandom();
  q.u1.setRandom();
  q.u2.setRandom();
  FieldState r = solver.zero_state();
  const double dofs = 3.0 * solver.Np() * solver.K();
  auto median_ns = [&](const std::function<void()>& fn) {
    for (int i = 0; i < 3; ++i) fn();
    std::vector<double> t;
    for (int i = 0; i < repetitions; ++i) {
      const auto a = std::chrono::steady_clock::now();
      fn();
      t.push_back(std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - a).count());
    }
    std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
    return t[t.size() / 2] / dofs;
  };
  std::vector<BenchmarkRow> rows;
  const int N = solver.ref().N, K = solver.K();
  const Formulation form = solver.config().formulation;
  const std::string tag = to_string(form);
  rows.push_back({tag + "/volume", N, K, median_ns([&] {
                    if (form == Formulation::Strong) solver.volume_strong(q, r);
                    else solver.volume_strong_weak(q, r);
                  })});
  rows.push_back({tag + "/surface", N, K, median_ns([&] { solver.surface_terms(q, form, r); })});
  FieldState u = q;
  rows.push_back({tag + "/update", N, K, median_ns([&] {
                    u.p = q.p;
                    u.u1 = q.u1;
                    u.u2 = q.u2;
                    solver.apply_mass_inverse(u);
                  })});
  return rows;
}

inline void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
  os << "phase,N,K,ns_per_dof\n";
  for (const auto& r : rows) os << r.phase << ',' << r.N << ',' << r.K << ',' << r.ns_per_dof << '\n';
}

} // namespace wadg
