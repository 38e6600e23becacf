#pragma once

// Bessel functions and the exact disk eigenmode used by the wave studies.

#include <cmath>

namespace wadg {

inline double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }
inline double bessel_j1(double x) { return x < 0 ? -std::cyl_bessel_j(1.0, -x) : std::cyl_bessel_j(1.0, x); }

/// First positive zero of J0.
inline constexpr double kDiskLambda = 5.52007811028631;

/// Radially symmetric standing wave of the unit disk with p = 0 on r = 1:
/// p = J0(lambda r) cos(lambda t), u = J1(lambda r) sin(lambda t) x/r.
struct DiskMode {
  double lambda = kDiskLambda;

  double pressure(double x, double y, double t) const {
    return bessel_j0(lambda * std::hypot(x, y)) * std::cos(lambda * t);
  }
  double velocity_x(double x, double y, double t) const { return radial(x, y, t) * cartesian(x, y, x); }
  double velocity_y(double x, double y, double t) const { return radial(x, y, t) * cartesian(x, y, y); }

private:
  double radial(double x, double y, double t) const {
    return bessel_j1(lambda * std::hypot(x, y)) * std::sin(lambda * t);
  }
  static double cartesian(double x, double y, double c) {
    const double r = std::hypot(x, y);
    return r > 0.0 ? c / r : 0.0;
  }
};

} // namespace wadg
