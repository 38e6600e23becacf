// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include "wadg/analysis.hpp"

#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

using namespace wadg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

struct Report {
  int failures = 0;
  void line(int id, bool ok, const std::string& detail) {
    std::printf("C%d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

FieldState random_state(const AcousticSolver& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldState q = s.zero_state();
  for (Eigen::MatrixXd* m : {&q.p, &q.u1, &q.u2})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = u(rng);
  return q;
}

double max_diff(const FieldState& a, const FieldState& b) {
  return std::max({(a.p - b.p).cwiseAbs().maxCoeff(), (a.u1 - b.u1).cwiseAbs().maxCoeff(),
                   (a.u2 - b.u2).cwiseAbs().maxCoeff()});
}

double max_abs(const FieldState& a) {
  return std::max({a.p.cwiseAbs().maxCoeff(), a.u1.cwiseAbs().maxCoeff(), a.u2.cwiseAbs().maxCoeff()});
}

SolverConfig make_config(Formulation f, double tau, MassMode m = MassMode::WADG) {
  SolverConfig c;
  c.formulation = f;
  c.flux = {tau, tau};
  c.mass_mode = m;
  return c;
}

FieldState disk_initial(const AcousticSolver& s) {
  const DiskMode mode;
  return s.project([&](double x, double y) { return mode.pressure(x, y, 0.0); }, [](double, double) { return 0.0; },
                   [](double, double) { return 0.0; });
}

// Arnold projection dichotomy.
void criterion1(Report& rep) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  const double l2lo[] = {3.75, 4.75}, wlo[] = {2.75, 3.75};
  for (int i = 0; i < 2; ++i) {
    const int N = 3 + i;
    const double l2 = projection_convergence_study(arnold_mesh(0), 6, N, ProjectionMethod::L2, default_projection_target).slope();
    const double wadg =
        projection_convergence_study(arnold_mesh(0), 6, N, ProjectionMethod::WADG, default_projection_target).slope();
    const double lsc = projection_convergence_study(arnold_mesh(0), 6, N, ProjectionMethod::LSC, default_projection_target).slope();
    ok &= in_range(l2, l2lo[i], l2lo[i] + 0.5) && in_range(wadg, wlo[i], wlo[i] + 0.5) && in_range(lsc, -0.25, 0.5);
    detail += "N=" + std::to_string(N) + " slopes l2 " + fmt(l2) + ", wadg " + fmt(wadg) + ", lsc " + fmt(lsc) + "; ";
  }
  const double secs = seconds_since(t0);
  ok &= secs < 120.0;
  rep.line(1, ok, detail + fmt(secs, 3) + " s");
}

// Growth of kappa_J and the matching pseudo-projection rates on warped meshes.
void criterion2(Report& rep) {
  bool ok = true;
  std::string detail = "kappa slopes";
  const double omegas[] = {2.0, 1.0, 0.25}, expect[] = {-4.0, -3.0, -3.0};
  for (int i = 0; i < 3; ++i) {
    const double s = kappa_growth_study(omegas[i], 3, 5).slope();
    ok &= std::abs(s - expect[i]) <= 0.3;
    detail += " w=" + fmt(omegas[i]) + ": " + fmt(s);
  }
  detail += "; wadg slopes";
  // omega = 1/4 needs more levels before the asymptotic rate shows.
  const int levels[] = {6, 6, 8};
  for (int i = 0; i < 3; ++i) {
    const double s = projection_convergence_study(warped_arnold_mesh(omegas[i], 2, 3), levels[i], 3,
                                                  ProjectionMethod::WADG, default_projection_target)
                         .slope();
    ok &= i == 0 ? s <= 0.5 : std::abs(s - 1.0) <= 0.4;
    detail += " w=" + fmt(omegas[i]) + ": " + fmt(s);
  }
  rep.line(2, ok, detail);
}

// Disk wave convergence, mass-mode agreement, and time-step insensitivity.
void criterion3(Report& rep) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  double worst_ratio = 0.0, worst_dt = 0.0, coarse3 = 0.0;
  for (int N = 2; N <= 4; ++N) {
    std::vector<WaveLevel> wl, xl;
    const ConvergenceRecord rw = wave_convergence_study(N, 4, make_config(Formulation::Strong, 1.0), 1.0, 2, &wl);
    wave_convergence_study(N, 4, make_config(Formulation::Strong, 1.0, MassMode::ExactCurvedMass), 1.0, 2, &xl);
    const double s = rw.slope();
    ok &= in_range(s, N + 0.25, N + 1.25);
    for (std::size_t l = 0; l < wl.size(); ++l) worst_ratio = std::max(worst_ratio, std::abs(wl[l].error / xl[l].error - 1.0));
    if (N == 3) coarse3 = wl[0].error;
    // Spatial error dominates: halving dt on the finest level barely moves it.
    CurvedMesh2D mesh = disk_mesh(0, N);
    for (int l = 1; l < 4; ++l) mesh = refine(mesh);
    const double half = run_disk_mode(mesh, N, make_config(Formulation::Strong, 1.0), 1.0, 0.5).error;
    worst_dt = std::max(worst_dt, std::abs(half / wl.back().error - 1.0));
    detail += "N=" + std::to_string(N) + " slope " + fmt(s) + "; ";
  }
  ok &= worst_ratio <= 0.01 && worst_dt < 0.01;
  ok &= std::abs(coarse3 / 7.91808e-3) <= 2.0 && std::abs(coarse3 / 7.91808e-3) >= 0.5;
  const double secs = seconds_since(t0);
  ok &= secs < 600.0;
  rep.line(3, ok,
           detail + "max |wadg/exact - 1| " + fmt(worst_ratio, 3) + ", max dt-halving change " + fmt(worst_dt, 3) +
               ", N=3 coarse error " + fmt(coarse3) + ", " + fmt(secs, 3) + " s");
}

// Energy conservation, dissipation and the central-flux spectrum.
void criterion4(Report& rep) {
  bool ok = true;
  std::string detail;
  {
    // Central flux on a curved mesh: drift of the J0 mode over T = 1 with the
    // smaller of two time steps.
    const AcousticSolver s(disk_mesh(1, 3), 3, make_config(Formulation::StrongWeak, 0.0));
    const FieldState q0 = disk_initial(s);
    double drift = 0.0;
    for (double scale : {1.0, 0.5}) {
      const RunResult r = s.run(q0, 1.0, nullptr, 0.0, scale * s.stable_dt());
      drift = std::abs(r.series.back().energy / r.series.front().energy - 1.0);
    }
    ok &= drift <= 1e-6;
    detail += "tau=0 drift " + fmt(drift, 3);
  }
  {
    bool mono = true;
    for (Formulation f : {Formulation::Strong, Formulation::StrongWeak})
      for (const CurvedMesh2D& mesh : {disk_mesh(1, 3), warped_arnold_mesh(1.0, 4, 3)}) {
        const AcousticSolver s(mesh, 3, make_config(f, 1.0));
        const RunResult r = s.run(disk_initial(s), 1.0, nullptr, 0.05);
        for (std::size_t i = 1; i < r.series.size(); ++i) mono &= r.series[i].energy <= r.series[i - 1].energy;
      }
    ok &= mono;
    detail += std::string(", tau=1 monotone ") + (mono ? "yes" : "no");
  }
  {
    const SpectrumResult sp =
        eigenspectrum(assemble_evolution_matrix(AcousticSolver(disk_mesh(0, 3), 3, make_config(Formulation::Strong, 0.0))));
    const double rel = sp.max_real_part / sp.spectral_radius;
    ok &= rel <= 1e-8;
    detail += ", tau=0 max Re/rho " + fmt(rel, 3);
  }
  rep.line(4, ok, detail);
}

// Zeroth-moment discrepancy rate with w = J.
void criterion5(Report& rep) {
  const double s = conservation_rate_study(smooth_warp_mesh(2, 2), 6, 2, 0, default_projection_target).slope();
  rep.line(5, s >= 5.5, "slope " + fmt(s));
}

// Discrete integration by parts under the sufficiency rule.
void criterion6(Report& rep) {
  std::mt19937_64 rng(2024);
  const std::vector<std::pair<std::string, CurvedMesh2D>> meshes = {
      {"disk1", disk_mesh(1, 3)}, {"warped", warped_arnold_mesh(1.0, 4, 3)}, {"random", random_perturbed_mesh(4, 3, 0.1, 7)}};
  const int N = 3;
  double worst = 0.0, min_under = std::numeric_limits<double>::infinity();
  std::vector<std::string> warnings;
  double worst_re = 0.0;
  for (const auto& [name, mesh] : meshes) {
    const AcousticSolver s(mesh, N, make_config(Formulation::Strong, 1.0));
    SolverConfig uc = make_config(Formulation::Strong, 1.0);
    uc.volume_quad_degree = uc.face_quad_degree = 2 * N + 1;
    uc.unsafe_quadrature = true;
    const AcousticSolver u(mesh, N, uc);
    for (int trial = 0; trial < 20; ++trial) {
      const FieldState q = random_state(s, rng);
      FieldState a = s.zero_state(), b = s.zero_state();
      s.rhs_strong(q, a);
      s.rhs_strong_weak(q, b);
      worst = std::max(worst, max_diff(a, b) / std::max(1.0, max_abs(a)));
      u.rhs_strong(q, a);
      u.rhs_strong_weak(q, b);
      min_under = std::min(min_under, max_diff(a, b));
    }
    // Energy stability of the under-integrated central-flux operator: reported, not asserted.
    for (Formulation f : {Formulation::Strong, Formulation::StrongWeak}) {
      SolverConfig sc = uc;
      sc.formulation = f;
      sc.flux = {0.0, 0.0};
      const SpectrumResult sp = eigenspectrum(assemble_evolution_matrix(AcousticSolver(mesh, N, sc)));
      const double rel = sp.max_real_part / sp.spectral_radius;
      worst_re = std::max(worst_re, rel);
      if (rel > 1e-8) warnings.push_back(name + "/" + to_string(f) + " max Re/rho " + fmt(rel, 3));
    }
  }
  const bool ok = worst <= 1e-9 && min_under > 0.0;
  rep.line(6, ok, "strong vs strong-weak max rel diff " + fmt(worst, 3) + " (20 states x 3 meshes); under-integrated min diff " +
                      fmt(min_under, 3) + ", max Re/rho " + fmt(worst_re, 3));
  for (const auto& w : warnings) std::printf("C6 WARN  under-integrated spectrum not purely imaginary: %s\n", w.c_str());
}

// Standalone property suites and relative benchmark costs.
void criterion7(Report& rep) {
  bool ok = true;
  std::string detail = "suites:";
  std::istringstream list(WADG_TEST_BINARIES);
  std::string path;
  while (std::getline(list, path, ':')) {
    const int rc = std::system((path + " --gtest_brief=1 > /dev/null 2>&1").c_str());
    ok &= rc == 0;
    detail += " " + path.substr(path.find_last_of('/') + 1) + (rc == 0 ? " ok" : " FAILED");
  }
  const CurvedMesh2D mesh = disk_mesh(1, 4);
  for (Formulation f : {Formulation::Strong, Formulation::StrongWeak}) {
    double total = 0.0;
    for (const auto& r : benchmark_rhs(AcousticSolver(mesh, 4, make_config(f, 1.0)), 20)) {
      ok &= std::isfinite(r.ns_per_dof) && r.ns_per_dof > 0.0;
      total += r.ns_per_dof;
    }
    detail += std::string("; ") + to_string(f) + " rhs " + fmt(total, 3) + " ns/dof";
  }
  rep.line(7, ok, detail);
}

} // namespace

int main() {
  Report rep;
  criterion1(rep);
  criterion2(rep);
  criterion3(rep);
  criterion4(rep);
  criterion5(rep);
  criterion6(rep);
  criterion7(rep);
  std::printf("%d of 7 criteria failed\n", rep.failures);
  return rep.failures == 0 ? 0 : 1;
}
