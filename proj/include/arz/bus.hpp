#ifndef ARZ_BUS_HPP
#define ARZ_BUS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "arz/core.hpp"
#include "arz/riemann.hpp"

namespace arz {

struct BusSpec {
  double v_b = 1.0;
  std::vector<double> stops;
  double delta = 0.0;
  double tau = 0.0;
  double y0 = 0.0;
  // Distance at which an approaching bus counts as arrived; the linear ramp
  // alone only reaches the stop asymptotically.
  double arrival_tol = 0.0;
};

inline void validate(const BusSpec& s) {
  if (!(s.v_b > 0.0)) throw DomainError("bus: v_b must be positive");
  if (!s.stops.empty() && !(s.delta > 0.0)) throw DomainError("bus: delta must be positive with stops");
  if (!(s.tau >= 0.0)) throw DomainError("bus: tau must be >= 0");
  for (size_t i = 1; i < s.stops.size(); ++i)
    if (!(s.stops[i] > s.stops[i - 1])) throw DomainError("bus: stops must be strictly increasing");
}

struct StopLog {
  std::vector<std::optional<double>> arrivals;
};

struct BusState {
  double y = 0.0;
  double speed = 0.0;
  std::optional<double> dwell_until;
};

inline double free_speed(const BusSpec& spec, double t, double y, const StopLog& log) {
  double dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < spec.stops.size(); ++i) {
    std::optional<double> a = i < log.arrivals.size() ? log.arrivals[i] : std::nullopt;
    if (a) {
      if (t >= *a && t < *a + spec.tau) return 0.0;
      continue;  // served stops no longer slow the bus
    }
    dist = std::min(dist, std::abs(y - spec.stops[i]));
  }
  if (!std::isfinite(dist)) return spec.v_b;
  return spec.v_b * std::min(1.0, dist / spec.delta);
}

inline double coupled_speed(double free, double v_front) { return std::min(free, v_front); }

// Records first arrivals between (t0, y0) and (t1, y1); returns the position clamped at a reached stop.
inline double record_stops(const BusSpec& spec, StopLog& log, double t0, double y0, double t1, double y1) {
  log.arrivals.resize(spec.stops.size());
  double tol = spec.arrival_tol > 0.0 ? spec.arrival_tol : 1e-3 * spec.delta;
  for (size_t i = 0; i < spec.stops.size(); ++i) {
    if (log.arrivals[i]) continue;
    double xs = spec.stops[i];
    if (y0 < xs && xs <= y1) {
      log.arrivals[i] = t0 + (t1 - t0) * (xs - y0) / (y1 - y0);
      return xs;
    }
    if (std::abs(y1 - xs) <= tol) {
      log.arrivals[i] = t1;
      return xs;
    }
  }
  return y1;
}

struct Interaction {
  double t_rel = 0.0;  // time after t^n
  double x = 0.0;
  double new_speed = 0.0;
};

inline std::optional<Interaction> shock_interaction_right(double y_n, double v_bar, double lambda,
                                                          double x_interface, double k, double new_speed) {
  if (!(v_bar > lambda)) return std::nullopt;
  double ts = (x_interface - y_n) / (v_bar - lambda);
  if (ts >= k) return std::nullopt;
  ts = std::max(ts, 0.0);
  return Interaction{ts, y_n + v_bar * ts, new_speed};
}

// Bus path inside a rarefaction centred at (x_center, t_center) of a power-law pressure.
struct RarefactionTrajectory {
  double gamma = 1.0;
  double w_bar = 0.0;
  double x_center = 0.0;
  double t_center = 0.0;
  double C = 0.0;

  double y(double t) const {
    double s = t - t_center;
    return x_center + w_bar * s + C * std::pow(s, 1.0 / (gamma + 1.0));
  }
  double speed(double t) const {
    double s = t - t_center;
    return w_bar + C / (gamma + 1.0) * std::pow(s, -gamma / (gamma + 1.0));
  }
  // Absolute time at which the speed reaches v_exit (< w_bar).
  double exit_time(double v_exit) const {
    return t_center + std::pow((gamma + 1.0) * (v_exit - w_bar) / C, -(gamma + 1.0) / gamma);
  }
};

inline RarefactionTrajectory rarefaction_trajectory(const PowerLaw& law, double w_bar, double x_center,
                                                    double t_center, double t_star, double x_star) {
  double s = t_star - t_center;
  if (!(s > 0.0)) throw DegenerateError("rarefaction_trajectory: t* equals the fan centre time");
  double C = (x_star - x_center - w_bar * s) / std::pow(s, 1.0 / (law.gamma + 1.0));
  return {law.gamma, w_bar, x_center, t_center, C};
}

enum class BusInteraction { None, ShockRight, RarefactionRight, Left };

struct BusAdvance {
  double y = 0.0;
  double speed = 0.0;
  BusInteraction kind = BusInteraction::None;
};

// One step of the bus from (t_n, y_n) at speed v_bar inside cell m of the mesh with
// interfaces x; v_free is the free speed held over the step.
inline BusAdvance advance_bus(const PowerLaw& law, const std::vector<ConservedState>& cells,
                              const std::vector<double>& x, int m, double t_n, double y_n, double k,
                              double v_bar, double v_free) {
  int n = static_cast<int>(cells.size());
  auto prim = [&](int j) { return to_primitive(law, cells[std::clamp(j, 0, n - 1)]); };
  State um1 = prim(m - 1), um = prim(m), up1 = prim(m + 1);
  double lam = v_bar;
  for (const State& s : {um1, um, up1}) lam = std::max({lam, std::abs(lambda1(law, s)), std::abs(s.v)});
  double hmin = x[m + 1] - x[m];
  if (m > 0) hmin = std::min(hmin, x[m] - x[m - 1]);
  if (m + 2 < static_cast<int>(x.size())) hmin = std::min(hmin, x[m + 2] - x[m + 1]);
  if (k * lam > 0.5 * hmin * (1.0 + 1e-9)) throw CflError("advance_bus: strong CFL condition violated");

  const double inf = std::numeric_limits<double>::infinity();
  BusAdvance none{y_n + v_bar * k, v_bar, BusInteraction::None};

  // Waves from the right interface: the first-family wave joins u_m to the intermediate state.
  double xr = x[m + 1];
  State ir = middle_state(law, um, up1);
  double t_right = inf;
  bool right_shock = false;
  if (ir.rho != um.rho && m + 1 < n) {
    right_shock = um.rho < ir.rho;
    double edge = right_shock ? shock1_speed(law, um, ir) : lambda1(law, um);
    if (v_bar > edge) t_right = std::max((xr - y_n) / (v_bar - edge), 0.0);
  }

  // Waves from the left interface reach the bus only if they move faster than it.
  double xl = x[m];
  State il = middle_state(law, um1, um);
  double t_left = inf;
  if (il.rho != um1.rho && m > 0) {
    double edge = um1.rho < il.rho ? shock1_speed(law, um1, il) : lambda1(law, il);
    if (edge > v_bar) t_left = (y_n - xl) / (edge - v_bar);
  }

  if (t_right < k && t_right <= t_left) {
    double v_after = std::min(v_free, ir.v);
    if (right_shock) {
      auto hit = shock_interaction_right(y_n, v_bar, shock1_speed(law, um, ir), xr, k, v_after);
      return {hit->x + hit->new_speed * (k - hit->t_rel), hit->new_speed, BusInteraction::ShockRight};
    }
    if (!(v_bar < v_after)) return none;
    double xs = y_n + v_bar * t_right;
    auto traj = rarefaction_trajectory(law, w_of(law, um), xr, t_n, t_n + t_right, xs);
    double t_exit = traj.exit_time(v_after);
    double t_end = t_n + k;
    if (t_exit >= t_end) return {traj.y(t_end), traj.speed(t_end), BusInteraction::RarefactionRight};
    return {traj.y(t_exit) + v_after * (t_end - t_exit), v_after, BusInteraction::RarefactionRight};
  }
  if (t_left < k) {
    none.kind = BusInteraction::Left;
    return none;
  }
  return none;
}

}  // namespace arz

#endif
