#ifndef ARZ_RIEMANN_HPP
#define ARZ_RIEMANN_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "arz/core.hpp"

namespace arz {

enum class WaveKind { Shock, Rarefaction, Contact, NonclassicalShock };

struct Wave {
  WaveKind kind = WaveKind::Shock;
  State left;
  State right;
  double speed_lo = 0.0;
  double speed_hi = 0.0;
};

struct WaveFan {
  std::vector<Wave> waves;
  State left_state;
  State right_state;
};

inline constexpr double kSameCurveTol = 1e-9;

inline bool same_value(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

template <PressureLaw L>
State middle_state(const L& law, const State& left, const State& right) {
  if (!(left.rho > 0.0) || !(right.rho > 0.0)) throw VacuumError("riemann: zero density");
  double wl = w_of(law, left);
  if (same_value(wl, w_of(law, right), kSameCurveTol)) return right;
  if (same_value(left.v, right.v, 1e-12)) return left;
  if (!(wl - right.v > 0.0)) throw VacuumError("riemann: w(left) <= v(right)");
  return {law.p_inv(wl - right.v), right.v};
}

inline double shock_speed(const State& left, const State& right) {
  if (left.rho == right.rho) throw DegenerateError("shock_speed: equal densities");
  return (right.rho * right.v - left.rho * left.v) / (right.rho - left.rho);
}

// First-family shock speed; for nearly equal densities the quotient is pure roundoff,
// so the characteristic limit is used instead.
template <PressureLaw L>
double shock1_speed(const L& law, const State& left, const State& right) {
  if (same_value(left.rho, right.rho, kSameCurveTol)) return 0.5 * (lambda1(law, left) + lambda1(law, right));
  return shock_speed(left, right);
}

template <PressureLaw L>
WaveFan solve(const L& law, const State& left, const State& right) {
  WaveFan fan{{}, left, right};
  State m = middle_state(law, left, right);
  if (m.rho != left.rho) {
    if (left.rho < m.rho) {
      double s = shock1_speed(law, left, m);
      fan.waves.push_back({WaveKind::Shock, left, m, s, s});
    } else {
      fan.waves.push_back({WaveKind::Rarefaction, left, m, lambda1(law, left), lambda1(law, m)});
    }
  }
  bool m_is_right = m.rho == right.rho && m.v == right.v;
  if (!m_is_right) {
    State ml = m.rho == left.rho ? left : m;
    fan.waves.push_back({WaveKind::Contact, ml, right, right.v, right.v});
  }
  return fan;
}

template <PressureLaw L>
State sample(const L& law, const WaveFan& fan, double xi) {
  for (const Wave& wave : fan.waves) {
    if (xi < wave.speed_lo) return wave.left;
    if (wave.kind == WaveKind::Rarefaction && xi < wave.speed_hi) {
      double wl = w_of(law, wave.left);
      double rho = law.phi_inv(std::max(wl - xi, 0.0));
      return {rho, wl - law.p(rho)};
    }
  }
  return fan.right_state;
}

// Godunov state at x/t = 0. Unlike solve, the middle state is not snapped onto the
// data: perturbations at roundoff level must keep their upwind direction.
template <PressureLaw L>
State interface_state(const L& law, const State& left, const State& right) {
  if (!(left.rho > 0.0) || !(right.rho > 0.0)) throw VacuumError("riemann: zero density");
  double wl = w_of(law, left);
  if (!(wl - right.v > 0.0)) throw VacuumError("riemann: w(left) <= v(right)");
  State m = left.v == right.v ? left : State{law.p_inv(wl - right.v), right.v};
  // The contact moves at v_right >= 0; only a standing contact exposes the right state.
  if (!(right.v > 0.0)) return right;
  if (m.rho == left.rho) return left;
  if (left.rho < m.rho) return shock1_speed(law, left, m) > 0.0 ? left : m;
  if (lambda1(law, left) > 0.0) return left;
  if (lambda1(law, m) <= 0.0) return m;
  double rho = law.phi_inv(wl);
  return {rho, wl - law.p(rho)};
}

}  // namespace arz

#endif
