// wadg: command-line driver for meshes, convergence studies, spectra, single
// runs, and the right-hand-side benchmark. Every command writes its outputs to
// a run directory holding config.echo, one or more CSV files, and log.txt.
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration or input error.

#include "wadg/wadg.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace wadg;

namespace {

class RunDir {
public:
  RunDir(const std::string& path, const Config& cfg) : path_(path) {
    fs::create_directories(path_);
    std::ofstream(path_ / "config.echo") << cfg.echo();
    log_.open(path_ / "log.txt");
    if (!log_) throw ConfigError("cannot write to run directory '" + path + "'");
  }

  std::ofstream csv(const std::string& name) {
    std::ofstream os(path_ / name);
    if (!os) throw ConfigError("cannot write '" + (path_ / name).string() + "'");
    return os;
  }

  /// Writes a line to stdout and to log.txt.
  void log(const std::string& line) {
    std::cout << line << '\n';
    log_ << line << '\n';
  }

  const fs::path& path() const { return path_; }

private:
  fs::path path_;
  std::ofstream log_;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

ProjectionMethod parse_method(const std::string& s) {
  if (s == "l2") return ProjectionMethod::L2;
  if (s == "wadg") return ProjectionMethod::WADG;
  if (s == "lsc") return ProjectionMethod::LSC;
  throw ConfigError("unknown projection method '" + s + "' (expected l2, wadg, lsc)");
}

Formulation parse_formulation(const std::string& s) {
  if (s == "strong") return Formulation::Strong;
  if (s == "strong-weak") return Formulation::StrongWeak;
  throw ConfigError("unknown formulation '" + s + "' (expected strong, strong-weak)");
}

MassMode parse_mass_mode(const std::string& s) {
  if (s == "wadg") return MassMode::WADG;
  if (s == "exact") return MassMode::ExactCurvedMass;
  throw ConfigError("unknown mass mode '" + s + "' (expected wadg, exact)");
}

SolverConfig solver_config(const Config& c) {
  SolverConfig s;
  s.formulation = parse_formulation(c.get_string("formulation", "strong"));
  s.mass_mode = parse_mass_mode(c.get_string("mass_mode", "wadg"));
  const double tau = c.get_double("tau", 1.0);
  s.flux.tau_p = c.get_double("tau_p", tau);
  s.flux.tau_u = c.get_double("tau_u", tau);
  s.cfl = c.get_double("cfl", 0.5);
  s.volume_quad_degree = c.get_int("volume_quad_degree", -1);
  s.face_quad_degree = c.get_int("face_quad_degree", -1);
  s.unsafe_quadrature = c.get_bool("unsafe_quadrature", false);
  return s;
}

const std::set<std::string> kSolverKeys = {"formulation", "mass_mode", "tau", "tau_p", "tau_u", "cfl",
                                           "volume_quad_degree", "face_quad_degree", "unsafe_quadrature"};

/// Builds a mesh from a family name and parameters.
CurvedMesh2D family_mesh(const std::string& family, const Config& c, int level_or_k1d, int N_geo) {
  if (family == "arnold") return arnold_mesh(level_or_k1d);
  if (family == "uniform-quad" || family == "uniform") return uniform_quad_mesh(level_or_k1d, -1, 1, -1, 1, N_geo);
  if (family == "uniform-tri") return uniform_tri_mesh(level_or_k1d, -1, 1, -1, 1, N_geo);
  if (family == "warped") return warped_arnold_mesh(c.get_double("omega", 1.0), level_or_k1d, N_geo);
  if (family == "smooth-warp") return smooth_warp_mesh(level_or_k1d, N_geo, c.get_double("amplitude", 0.1));
  if (family == "random")
    return random_perturbed_mesh(level_or_k1d, N_geo, c.get_double("amplitude", 0.1),
                                 static_cast<std::uint64_t>(c.get_int("seed", 1)));
  if (family == "disk") return disk_mesh(level_or_k1d, N_geo, c.get_int("rings", 2));
  throw ConfigError("unknown mesh family '" + family + "'");
}

/// Mesh specifiers: "disk<l>", "arnold<l>", "uniform<K1D>", "uniform-tri<K1D>",
/// "warped<K1D>", "smooth-warp<K1D>", "random<K1D>", or a path to a JSON mesh.
CurvedMesh2D mesh_from_spec(const std::string& spec, const Config& c, int N_geo) {
  static const std::regex re("^(disk|arnold|uniform-tri|uniform|warped|smooth-warp|random)([0-9]+)$");
  std::smatch m;
  if (std::regex_match(spec, m, re)) return family_mesh(m[1], c, std::stoi(m[2]), N_geo);
  if (fs::exists(spec)) return read_mesh(spec);
  throw ConfigError("mesh '" + spec + "' is neither a known family specifier nor an existing file");
}

bool is_disk(const CurvedMesh2D& mesh) { return mesh.family.kind == MeshFamilyKind::Disk; }

std::string default_out(const std::string& cmd) { return "wadg_runs/" + cmd; }

// ---------------------------------------------------------------------------

int cmd_mesh(const Config& c) {
  c.reject_unknown({"family", "level", "N_geo", "omega", "amplitude", "seed", "rings", "output", "out"});
  const std::string family = c.get_string("family", "disk");
  const int N_geo = c.get_int("N_geo", family == "arnold" ? 1 : 3);
  const CurvedMesh2D mesh = family_mesh(family, c, c.get_int("level", family == "disk" || family == "arnold" ? 0 : 4), N_geo);
  RunDir run(c.get_string("out", default_out("mesh")), c);
  const std::string output = c.get_string("output", (run.path() / "mesh.json").string());
  write_mesh(output, mesh);
  auto os = run.csv("mesh_summary.csv");
  os << "family,shape,N_geo,K,h,boundary_faces,min_J\n";
  const double minJ = validate_jacobian(mesh);
  os << family << ',' << to_string(mesh.shape) << ',' << mesh.N_geo << ',' << mesh.K << ',' << mesh.h << ','
     << mesh.num_boundary_faces() << ',' << minJ << '\n';
  run.log("mesh " + family + ": K = " + std::to_string(mesh.K) + ", h = " + fmt(mesh.h) + ", min J = " + fmt(minJ));
  run.log("wrote " + output);
  return 0;
}

int cmd_project_convergence(const Config& c) {
  c.reject_unknown({"family", "N", "levels", "method", "omega", "amplitude", "seed", "K1D", "N_geo", "window", "out"});
  const std::string family = c.get_string("family", "arnold");
  const int N = c.get_int("N", 3), levels = c.get_int("levels", 6);
  if (levels < 2) throw ConfigError("levels must be at least 2");
  const std::string methods = c.get_string("method", "wadg");
  std::vector<ProjectionMethod> list;
  if (methods == "all") list = {ProjectionMethod::L2, ProjectionMethod::WADG, ProjectionMethod::LSC};
  else list = {parse_method(methods)};

  const int N_geo = c.get_int("N_geo", 3);
  const CurvedMesh2D base = family == "arnold" ? arnold_mesh(0) : family_mesh(family, c, c.get_int("K1D", 2), N_geo);
  RunDir run(c.get_string("out", default_out("project-convergence")), c);
  for (const auto m : list) {
    ConvergenceRecord rec = projection_convergence_study(base, levels, N, m, default_projection_target);
    rec.window = c.get_int("window", 3);
    auto os = run.csv(std::string("convergence_") + to_string(m) + ".csv");
    rec.write_csv(os);
    double res = 0.0;
    const double slope = rec.slope(-1, &res);
    run.log(std::string(to_string(m)) + " slope " + fmt(slope, 4) + " (residual " + fmt(res, 3) + ", " +
            std::to_string(rec.size()) + " levels)");
  }
  return 0;
}

int cmd_wave_convergence(const Config& c) {
  auto keys = kSolverKeys;
  keys.insert({"N", "levels", "T", "rings", "window", "out"});
  c.reject_unknown(keys);
  const int N = c.get_int("N", 3), levels = c.get_int("levels", 4);
  const SolverConfig cfg = solver_config(c);
  RunDir run(c.get_string("out", default_out("wave-convergence")), c);
  std::vector<WaveLevel> details;
  ConvergenceRecord rec = wave_convergence_study(N, levels, cfg, c.get_double("T", 1.0), c.get_int("rings", 2), &details);
  rec.window = c.get_int("window", 3);
  auto os = run.csv("convergence.csv");
  rec.write_csv(os);
  auto ls = run.csv("levels.csv");
  ls << "level,K,h,dt,steps,error,seconds\n" << std::setprecision(17);
  for (const auto& w : details) {
    ls << w.level << ',' << w.K << ',' << w.h << ',' << w.dt << ',' << w.steps << ',' << w.error << ',' << w.seconds
       << '\n';
    run.log("level " + std::to_string(w.level) + ": K = " + std::to_string(w.K) + ", h = " + fmt(w.h) +
            ", error = " + fmt(w.error) + ", steps = " + std::to_string(w.steps));
  }
  double res = 0.0;
  const double slope = rec.slope(-1, &res);
  run.log("slope " + fmt(slope, 4) + " (residual " + fmt(res, 3) + ")");
  return 0;
}

int cmd_kappa_study(const Config& c) {
  c.reject_unknown({"omega", "N", "levels", "K1D", "N_geo", "window", "out"});
  ConvergenceRecord rec = kappa_growth_study(c.get_double("omega", 2.0), c.get_int("N", 3), c.get_int("levels", 4),
                                             c.get_int("K1D", 4), c.get_int("N_geo", 3));
  rec.window = c.get_int("window", 3);
  RunDir run(c.get_string("out", default_out("kappa-study")), c);
  auto os = run.csv("kappa.csv");
  rec.write_csv(os);
  double res = 0.0;
  const double slope = rec.slope(-1, &res);
  run.log("kappa growth slope " + fmt(slope, 4) + " (residual " + fmt(res, 3) + ")");
  return 0;
}

int cmd_conservation_study(const Config& c) {
  c.reject_unknown({"family", "N", "M", "levels", "K1D", "N_geo", "omega", "amplitude", "project_weight", "window",
                    "out"});
  const std::string family = c.get_string("family", "smooth-warp");
  const int N = c.get_int("N", 2);
  const CurvedMesh2D base = family_mesh(family, c, c.get_int("K1D", 2), c.get_int("N_geo", std::min(N, 3)));
  ConvergenceRecord rec = conservation_rate_study(base, c.get_int("levels", 4), N, c.get_int("M", 0),
                                                  default_projection_target, c.get_bool("project_weight", false));
  rec.window = c.get_int("window", 3);
  RunDir run(c.get_string("out", default_out("conservation-study")), c);
  auto os = run.csv("conservation.csv");
  rec.write_csv(os);
  double res = 0.0;
  const double slope = rec.slope(-1, &res);
  run.log("moment discrepancy slope " + fmt(slope, 4) + " (residual " + fmt(res, 3) + ")");
  return 0;
}

int cmd_spectrum(const Config& c) {
  auto keys = kSolverKeys;
  keys.insert({"mesh", "N", "cap", "omega", "amplitude", "seed", "rings", "out"});
  c.reject_unknown(keys);
  const int N = c.get_int("N", 3);
  const CurvedMesh2D mesh = mesh_from_spec(c.get_string("mesh", "disk0"), c, N);
  const AcousticSolver solver(mesh, N, solver_config(c));
  const SpectrumResult s = eigenspectrum(assemble_evolution_matrix(solver, c.get_int("cap", 6000)));
  RunDir run(c.get_string("out", default_out("spectrum")), c);
  auto os = run.csv("spectrum.csv");
  write_spectrum_csv(os, s);
  run.log("eigenvalues " + std::to_string(s.eigenvalues.size()) + ", spectral radius " + fmt(s.spectral_radius) +
          ", max real part " + fmt(s.max_real_part, 4));
  return 0;
}

int cmd_run(const Config& c) {
  auto keys = kSolverKeys;
  keys.insert({"mesh", "N", "T", "dt", "dt_scale", "output_interval", "omega", "amplitude", "seed", "rings", "out"});
  c.reject_unknown(keys);
  const int N = c.get_int("N", 3);
  const CurvedMesh2D mesh = mesh_from_spec(c.get_string("mesh", "disk0"), c, N);
  const AcousticSolver solver(mesh, N, solver_config(c));
  const double T = c.get_double("T", 1.0);
  const double dt = c.has("dt") ? c.get_double("dt", 0.0) : c.get_double("dt_scale", 1.0) * solver.stable_dt();

  // The J0 mode is exact on the unit disk; elsewhere the same radial profile
  // is used as initial data without a reference solution.
  const DiskMode mode;
  const FieldState q0 = solver.project([&](double x, double y) { return mode.pressure(x, y, 0.0); },
                                       [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  SpaceTimeFn exact;
  if (is_disk(mesh)) exact = [&](double x, double y, double t) { return mode.pressure(x, y, t); };
  const RunResult res = solver.run(q0, T, exact, c.get_double("output_interval", 0.1), dt);

  RunDir run(c.get_string("out", default_out("run")), c);
  auto os = run.csv("timeseries.csv");
  os << "t,energy,l2_error_p\n" << std::setprecision(17);
  for (const auto& s : res.series) os << s.t << ',' << s.energy << ',' << s.l2_error_p << '\n';
  run.log("K = " + std::to_string(mesh.K) + ", N = " + std::to_string(N) + ", dt = " + fmt(res.dt) +
          ", steps = " + std::to_string(res.steps));
  run.log("energy " + fmt(res.series.front().energy, 12) + " -> " + fmt(res.series.back().energy, 12));
  if (exact) run.log("final L2 pressure error " + fmt(res.final_error_p, 12));
  return 0;
}

int cmd_bench(const Config& c) {
  c.reject_unknown({"N", "mesh", "reps", "formulation", "rings", "omega", "amplitude", "seed", "out"});
  const int N = c.get_int("N", 4);
  const CurvedMesh2D mesh = mesh_from_spec(c.get_string("mesh", "disk2"), c, N);
  const std::string forms = c.get_string("formulation", "both");
  std::vector<Formulation> list;
  if (forms == "both") list = {Formulation::Strong, Formulation::StrongWeak};
  else list = {parse_formulation(forms)};
  RunDir run(c.get_string("out", default_out("bench")), c);
  std::vector<BenchmarkRow> rows;
  for (const auto f : list) {
    SolverConfig cfg;
    cfg.formulation = f;
    const AcousticSolver solver(mesh, N, cfg);
    const auto r = benchmark_rhs(solver, c.get_int("reps", 20));
    double total = 0.0;
    for (const auto& row : r) total += row.ns_per_dof;
    run.log(std::string(to_string(f)) + ": " + fmt(total, 4) + " ns/dof per right-hand side (volume " +
            fmt(r[0].ns_per_dof, 3) + ", surface " + fmt(r[1].ns_per_dof, 3) + ", update " + fmt(r[2].ns_per_dof, 3) +
            ")");
    rows.insert(rows.end(), r.begin(), r.end());
  }
  auto os = run.csv("benchmark.csv");
  write_benchmark_csv(os, rows);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weight-adjusted DG for the 2D acoustic wave equation on curvilinear meshes"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path;
  int threads = 0;
  bool deterministic = false;
  std::map<std::string, std::string> overrides;

  struct Command {
    std::string name, help;
    int (*fn)(const Config&);
    std::vector<std::string> keys; // exposed as --key flags
  };
  const std::vector<Command> commands = {
      {"mesh", "Generate a mesh and write it as JSON", cmd_mesh,
       {"family", "level", "N_geo", "omega", "amplitude", "seed", "rings", "output"}},
      {"project-convergence", "Projection error under refinement", cmd_project_convergence,
       {"family", "N", "levels", "method", "omega", "amplitude", "seed", "K1D", "N_geo", "window"}},
      {"wave-convergence", "Disk wave error under refinement", cmd_wave_convergence,
       {"N", "levels", "T", "rings", "window", "formulation", "mass_mode", "tau", "tau_p", "tau_u", "cfl"}},
      {"kappa-study", "Growth of the Jacobian constant on warped meshes", cmd_kappa_study,
       {"omega", "N", "levels", "K1D", "N_geo", "window"}},
      {"conservation-study", "Convergence of the weighted moment discrepancy", cmd_conservation_study,
       {"family", "N", "M", "levels", "K1D", "N_geo", "omega", "amplitude", "project_weight", "window"}},
      {"spectrum", "Eigenvalues of the assembled semi-discrete operator", cmd_spectrum,
       {"mesh", "N", "cap", "rings", "formulation", "mass_mode", "tau", "tau_p", "tau_u", "volume_quad_degree",
        "face_quad_degree", "unsafe_quadrature"}},
      {"run", "Single time-domain run", cmd_run,
       {"mesh", "N", "T", "dt", "dt_scale", "output_interval", "rings", "formulation", "mass_mode", "tau", "tau_p",
        "tau_u", "cfl"}},
      {"bench", "Per-phase cost of the right-hand side", cmd_bench, {"N", "mesh", "reps", "formulation", "rings"}},
  };

  std::map<CLI::App*, const Command*> dispatch;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "TOML or JSON file of key = value settings");
    sub->add_option("--out", overrides["out"], "Run directory");
    sub->add_option("--threads", threads, "Thread count (default: WADG_NUM_THREADS or all cores)");
    sub->add_flag("--deterministic", deterministic, "Single-threaded, reproducible output");
    for (const auto& key : cmd.keys) sub->add_option("--" + key, overrides[key]);
    dispatch[sub] = &cmd;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (threads <= 0)
    if (const char* env = std::getenv("WADG_NUM_THREADS")) threads = std::atoi(env);
  if (deterministic) threads = 1;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& [k, v] : overrides)
      if (!v.empty()) cfg.set(k, v);
    for (const auto& [sub, cmd] : dispatch)
      if (sub->parsed()) return cmd->fn(cfg);
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const SizeCapExceeded& e) {
    std::cerr << "size cap exceeded: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
