#ifndef ARZ_CONSTRAINED_HPP
#define ARZ_CONSTRAINED_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "arz/core.hpp"
#include "arz/riemann.hpp"

namespace arz {

// Flux cap rho v <= F + v_bar rho along x = v_bar t.
struct Cap {
  double F = 0.0;
  double v_bar = 0.0;
};

struct MovingConstraintSpec {
  double v_bar = 0.0;
  double alpha = 0.0;
  double R = 0.0;
  double w_alpha = 0.0;
  double rho_alpha = 0.0;
  double F_alpha = 0.0;

  operator Cap() const { return {F_alpha, v_bar}; }
};

struct FixedConstraintSpec {
  double q = 0.0;

  operator Cap() const { return {q, 0.0}; }
};

template <PressureLaw L>
MovingConstraintSpec build_moving_spec(const L& law, double v_bar, double alpha, double R) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (!(R > 0.0)) throw DomainError("R must be positive");
  if (!(v_bar >= 0.0)) throw DomainError("v_bar must be >= 0");
  MovingConstraintSpec s{v_bar, alpha, R, law.p(alpha * R), 0.0, 0.0};
  if (!(s.w_alpha > v_bar)) throw InfeasibleConstraint("p(alpha R) <= v_bar");
  s.rho_alpha = law.phi_inv(s.w_alpha - v_bar);
  s.F_alpha = s.rho_alpha * s.rho_alpha * law.dp(s.rho_alpha);
  return s;
}

inline FixedConstraintSpec make_fixed_spec(double q) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  return {q};
}

struct HatCheck {
  State hat;
  State check1;
};

namespace detail {

template <class Fn>
double bisect_root(Fn g, double lo, double hi) {
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t iters = 400;
  auto r = boost::math::tools::bisect(g, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

template <PressureLaw L>
std::optional<HatCheck> hat_check1_points(const L& law, const State& left, Cap cap) {
  if (!(left.rho > 0.0)) throw VacuumError("hat_check1_points: zero density");
  double wl = w_of(law, left);
  double a = wl - cap.v_bar;
  if (!(a > 0.0)) return std::nullopt;
  auto g = [&](double rho) { return rho * (a - law.p(rho)) - cap.F; };
  double rho_star = law.phi_inv(a);
  if (g(rho_star) < 0.0) return std::nullopt;
  double rho_hat, rho_chk;
  bool linear = false;
  if constexpr (std::is_same_v<L, PowerLaw>) linear = law.gamma == 1.0;
  if (linear) {
    double disc = std::sqrt(std::max(a * a - 4.0 * cap.F, 0.0));
    rho_hat = 0.5 * (a + disc);
    rho_chk = 0.5 * (a - disc);
  } else if (g(rho_star) == 0.0) {
    rho_hat = rho_chk = rho_star;
  } else {
    rho_hat = detail::bisect_root(g, rho_star, law.p_inv(a));
    rho_chk = detail::bisect_root(g, 1e-12, rho_star);
  }
  return HatCheck{{rho_hat, wl - law.p(rho_hat)}, {rho_chk, wl - law.p(rho_chk)}};
}

inline State check2_point(const State& right, Cap cap) {
  if (!(right.v > cap.v_bar)) throw DomainError("check2_point: v_right <= v_bar, no crossing");
  return {cap.F / (right.v - cap.v_bar), right.v};
}

template <PressureLaw L>
bool violates(const L& law, const State& left, const State& right, Cap cap) {
  State s = sample(law, solve(law, left, right), cap.v_bar);
  return s.rho * s.v > cap.F + cap.v_bar * s.rho;
}

struct ConstrainedSolution {
  WaveFan fan;
  double bus_speed = 0.0;
  bool nonclassical = false;
};

namespace detail {

inline void append(WaveFan& fan, const WaveFan& part) {
  fan.waves.insert(fan.waves.end(), part.waves.begin(), part.waves.end());
}

template <PressureLaw L>
ConstrainedSolution solve_constrained(const L& law, const State& left, const State& right, Cap cap,
                                      bool conserve_z) {
  WaveFan classical = solve(law, left, right);
  State trace = sample(law, classical, cap.v_bar);
  if (!(trace.rho * trace.v > cap.F + cap.v_bar * trace.rho))
    return {classical, std::min(cap.v_bar, trace.v), false};
  auto hc = hat_check1_points(law, left, cap);
  if (!hc) throw DegenerateError("constrained solve: violation without hat point");
  State hat = hc->hat;
  State chk = conserve_z ? hc->check1 : check2_point(right, cap);
  WaveFan fan{{}, left, right};
  append(fan, solve(law, left, hat));
  fan.waves.push_back({WaveKind::NonclassicalShock, hat, chk, cap.v_bar, cap.v_bar});
  append(fan, solve(law, chk, right));
  return {fan, cap.v_bar, true};
}

}  // namespace detail

template <PressureLaw L>
ConstrainedSolution solve_rs1(const L& law, const State& left, const State& right, Cap cap) {
  return detail::solve_constrained(law, left, right, cap, true);
}

template <PressureLaw L>
ConstrainedSolution solve_rs2(const L& law, const State& left, const State& right, Cap cap) {
  return detail::solve_constrained(law, left, right, cap, false);
}

template <PressureLaw L>
WaveFan solve_rsq2(const L& law, const State& left, const State& right, FixedConstraintSpec fixed) {
  return solve_rs2(law, left, right, Cap(fixed)).fan;
}

template <PressureLaw L>
double h_alpha(const L& law, double v, Cap cap) {
  if (v < cap.v_bar) throw DomainError("h_alpha: v < v_bar");
  if (v == cap.v_bar) return std::numeric_limits<double>::infinity();
  return v + law.p(cap.F / (v - cap.v_bar));
}

namespace detail {

// Minimum of h_alpha over [a, b] with a >= v_bar; h is unimodal there.
template <PressureLaw L>
double h_alpha_min(const L& law, double a, double b, Cap cap) {
  if (a == cap.v_bar) a = cap.v_bar + 1e-12 * std::max(1.0, b - cap.v_bar);
  if (!(a < b)) return h_alpha(law, b, cap);
  auto h = [&](double v) { return h_alpha(law, v, cap); };
  auto r = boost::math::tools::brent_find_minima(h, a, b, std::numeric_limits<double>::digits / 2);
  return std::min({r.second, h(a), h(b)});
}

}  // namespace detail

template <PressureLaw L>
bool rs1_domain_invariant(const L& law, const InvariantDomain& d, Cap cap) {
  validate(d);
  if (d.v2 <= cap.v_bar) return true;
  double lo = std::max(d.v1, cap.v_bar);
  if (detail::h_alpha_min(law, lo, d.v2, cap) >= d.w2) return true;
  if (d.v1 >= cap.v_bar) return h_alpha(law, d.v1, cap) >= d.w2 && h_alpha(law, d.v2, cap) >= d.w2;
  return h_alpha(law, d.v2, cap) >= d.w2;
}

template <PressureLaw L>
bool rs2_domain_invariant(const L& law, const InvariantDomain& d, Cap cap) {
  validate(d);
  if (d.v2 <= cap.v_bar) return true;
  double lo = std::max(d.v1, cap.v_bar);
  double hmin = detail::h_alpha_min(law, lo, d.v2, cap);
  if (hmin >= d.w2) return true;
  bool common = h_alpha(law, d.v2, cap) <= d.w2 && hmin >= d.w1;
  if (d.v1 >= cap.v_bar) return h_alpha(law, d.v1, cap) >= d.w2 && common;
  return common;
}

}  // namespace arz

#endif
