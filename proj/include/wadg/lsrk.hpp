#pragma once

// Five-stage, fourth-order low-storage Runge-Kutta (Carpenter-Kennedy).

#include <array>

namespace wadg {

struct LSRK45 {
  static constexpr std::array<double, 5> a = {
      0.0,
      -567301805773.0 / 1357537059087.0,
      -2404267990393.0 / 2016746695238.0,
      -3550918686646.0 / 2091501179385.0,
      -1275806237668.0 / 842570457699.0};
  static constexpr std::array<double, 5> b = {
      1432997174477.0 / 9575080441755.0,
      5161836677717.0 / 13612068292357.0,
      1720146321549.0 / 2090206949498.0,
      3134564353537.0 / 4481467310338.0,
      2277821191437.0 / 14882151754819.0};
  static constexpr std::array<double, 5> c = {
      0.0,
      1432997174477.0 / 9575080441755.0,
      2526269341429.0 / 6820363962896.0,
      2006345519317.0 / 3224310063776.0,
      2802321613138.0 / 2924317926251.0};
};

/// One step of size dt from time t. State provides
///   scale_add(a, dt, k):  *this = a * (*this) + dt * k
///   add(b, r):            *this += b * r
/// and rhs(t, y, k) writes dy/dt into k. `res` is the second register; it is
/// overwritten in the first stage because a[0] = 0.
template <class State, class Rhs>
void lsrk_step(State& y, State& res, State& k, double t, double dt, Rhs&& rhs) {
  for (int stage = 0; stage < 5; ++stage) {
    rhs(t + LSRK45::c[stage] * dt, y, k);
    res.scale_add(LSRK45::a[stage], dt, k); // res = a res + dt k
    y.add(LSRK45::b[stage], res);           // y += b res
  }
}

} // namespace wadg
