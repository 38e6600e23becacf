// Propagates the J0 standing mode on a curved disk mesh and prints the energy
// and pressure error as the solution evolves.
//
//   disk_wave_demo [N] [level]

#include "wadg/wadg.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  const int N = argc > 1 ? std::atoi(argv[1]) : 3;
  const int level = argc > 2 ? std::atoi(argv[2]) : 1;

  const wadg::CurvedMesh2D mesh = wadg::disk_mesh(level, N);
  const wadg::AcousticSolver solver(mesh, N, wadg::SolverConfig{});
  const wadg::DiskMode mode;

  auto q0 = solver.project([&](double x, double y) { return mode.pressure(x, y, 0.0); },
                           [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  auto res = solver.run(q0, 1.0, [&](double x, double y, double t) { return mode.pressure(x, y, t); }, 0.1);

  std::printf("disk level %d: K = %d, N = %d, dt = %.3e, %ld steps\n", level, mesh.K, N, res.dt, res.steps);
  std::printf("%6s %16s %12s\n", "t", "energy", "L2 error");
  for (const auto& s : res.series) std::printf("%6.2f %16.10f %12.4e\n", s.t, s.energy, s.l2_error_p);
  return 0;
}
