#ifndef ARZ_CAPTURE_HPP
#define ARZ_CAPTURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "arz/constrained.hpp"
#include "arz/godunov.hpp"

namespace arz {

struct ReconstructionFractions {
  double d_rho = 0.0;
  double d_z = 0.0;
  bool valid = false;

  double operator[](int c) const { return c == 0 ? d_rho : d_z; }
};

struct BusCellContext {
  int m = 0;
  double y = 0.0;
  double v_bar = 0.0;
  MovingConstraintSpec spec;

  Cap cap() const { return {spec.F_alpha, v_bar}; }
};

template <PressureLaw L>
BusCellContext make_bus_context(const L& law, const UniformGrid& grid, double y, double v_bar,
                                double alpha, double R) {
  return {grid.cell_of(y), y, v_bar, build_moving_spec(law, v_bar, alpha, R)};
}

using EventLog = std::vector<std::string>;

inline void log_event(EventLog* log, double t, const std::string& what) {
  if (log) log->push_back("t=" + std::to_string(t) + " " + what);
}

inline const ConservedState& cell_at(const std::vector<ConservedState>& cells, int j) {
  return cells[std::clamp(j, 0, static_cast<int>(cells.size()) - 1)];
}

template <PressureLaw L>
bool detect(const L& law, const ConservedState& u_left_cell, const ConservedState& u_right_cell,
            const BusCellContext& ctx) {
  return violates(law, to_primitive(law, u_left_cell), to_primitive(law, u_right_cell), ctx.cap());
}

// Fractions within this slack of [0,1] are clamped; round-off on exact data lands here.
inline constexpr double kFractionSlack = 1e-10;

inline ReconstructionFractions fractions(const ConservedState& u_bar_m, const ConservedState& u_hat,
                                         const ConservedState& u_check) {
  ReconstructionFractions fr;
  double d[2];
  for (int c = 0; c < 2; ++c) {
    double den = u_hat[c] - u_check[c];
    if (den == 0.0) throw DegenerateError("fractions: hat and check coincide in a component");
    d[c] = (u_bar_m[c] - u_check[c]) / den;
  }
  fr.valid = true;
  for (double& x : d) {
    if (x < -kFractionSlack || x > 1.0 + kFractionSlack) fr.valid = false;
    else x = std::clamp(x, 0.0, 1.0);
  }
  fr.d_rho = d[0];
  fr.d_z = d[1];
  return fr;
}

struct BusFluxes {
  Flux right;
  Flux left;
};

template <PressureLaw L>
BusFluxes rs1_bus_fluxes(const L& law, const BusCellContext& ctx, const ReconstructionFractions& fr,
                         const ConservedState& u_hat, const ConservedState& u_check1, double h, double k,
                         const ConservedState& u_left_cell) {
  Flux fh = flux(law, u_hat);
  Flux fc = flux(law, u_check1);
  BusFluxes out;
  for (int c = 0; c < 2; ++c) {
    double dt = ctx.v_bar > 0.0 ? h * (1.0 - fr[c]) / ctx.v_bar : std::numeric_limits<double>::infinity();
    out.right[c] = (std::min(dt, k) * fc[c] + std::max(k - dt, 0.0) * fh[c]) / k;
  }
  out.left = numerical_flux(law, u_left_cell, u_hat);
  return out;
}

namespace detail {

inline bool bus_interior(const BusCellContext& ctx, const UniformGrid& grid) {
  return ctx.m >= 1 && ctx.m + 1 < grid.n_cells;
}

}  // namespace detail

template <PressureLaw L>
CellField rs1_step(const L& law, const CellField& field, const UniformGrid& grid,
                   const BusCellContext& ctx, double k, EventLog* log = nullptr) {
  if (!detail::bus_interior(ctx, grid)) return step(law, field, grid, k);
  const auto& cells = field.cells;
  int m = ctx.m;
  if (!detect(law, cells[m - 1], cells[m + 1], ctx)) return step(law, field, grid, k);
  auto hc = hat_check1_points(law, to_primitive(law, cells[m - 1]), ctx.cap());
  if (!hc) {
    log_event(log, field.t, "rs1: no hat point, plain Godunov");
    return step(law, field, grid, k);
  }
  ConservedState uh = to_conserved(law, hc->hat);
  ConservedState uc = to_conserved(law, hc->check1);
  ReconstructionFractions fr = fractions(cells[m], uh, uc);
  if (!fr.valid) {
    log_event(log, field.t, "rs1: fractions outside [0,1], plain Godunov");
    return step(law, field, grid, k);
  }
  check_cfl(k, max_speed(law, cells), grid.h);
  auto F = interface_fluxes(law, cells);
  BusFluxes bf = rs1_bus_fluxes(law, ctx, fr, uh, uc, grid.h, k, cells[m - 1]);
  F[m] = bf.left;
  F[m + 1] = bf.right;
  CellField out{field.t + k, cells};
  double r = k / grid.h;
  for (int j = 0; j < grid.n_cells; ++j) out.cells[j] -= r * (F[j + 1] - F[j]);
  return out;
}

namespace detail {

template <PressureLaw L>
CellField rs2_step_impl(const L& law, const CellField& field, const UniformGrid& grid,
                        const BusCellContext& ctx, double k, bool fixed_value, EventLog* log) {
  if (!bus_interior(ctx, grid)) return step(law, field, grid, k);
  const auto& cells = field.cells;
  int m = ctx.m;
  if (!detect(law, cells[m - 1], cells[m + 1], ctx)) return step(law, field, grid, k);
  Cap cap = ctx.cap();
  State right_prim = to_primitive(law, cells[m + 1]);
  auto hc = hat_check1_points(law, to_primitive(law, cells[m - 1]), cap);
  if (!hc || !(right_prim.v > cap.v_bar)) {
    log_event(log, field.t, "rs2: hat or check2 undefined, plain Godunov");
    return step(law, field, grid, k);
  }
  State chk2 = check2_point(right_prim, cap);
  ConservedState uh = to_conserved(law, hc->hat);
  ConservedState uc = to_conserved(law, chk2);
  ReconstructionFractions fr = fractions(cells[m], uh, uc);
  if (!fr.valid) {
    log_event(log, field.t, "rs2: fractions outside [0,1], plain Godunov");
    return step(law, field, grid, k);
  }
  check_cfl(k, max_speed(law, cells), grid.h);

  const double h = grid.h;
  const double V = ctx.v_bar;
  auto F = interface_fluxes(law, cells);
  CellField out{field.t + k, cells};
  for (int j = 0; j < grid.n_cells; ++j) out.cells[j] -= (k / h) * (F[j + 1] - F[j]);

  const ConservedState& um1 = cells[m - 1];
  const ConservedState& up1 = cells[m + 1];
  const ConservedState& up2 = cell_at(cells, m + 2);
  Flux f_hat = flux(law, uh);
  Flux f_chk = flux(law, uc);
  Flux F_left = numerical_flux(law, um1, uh);
  Flux F_chk_right = numerical_flux(law, uc, up1);
  Flux F_right_out = numerical_flux(law, up1, up2);

  out.cells[m - 1] = um1 - (k / h) * (F_left - F[m - 1]);

  bool case_two[2];
  ConservedState u_l, u_r, u_next, new_m, new_p1;
  for (int c = 0; c < 2; ++c) {
    double d = fr[c];
    double x_new = grid.interface(m) + h * d + V * k;
    case_two[c] = !(x_new < grid.interface(m + 1));
    double a_l = h * d + k * V;
    u_l[c] = a_l > 0.0 ? (h * d * uh[c] - k * (f_hat[c] - V * uh[c] - F_left[c])) / a_l : uh[c];
    if (!case_two[c]) {
      double a_r = h * (1.0 - d) - k * V;
      u_r[c] = a_r > 0.0 ? (h * (1.0 - d) * uc[c] - k * (F_chk_right[c] - f_chk[c] + V * uc[c])) / a_r : uc[c];
      new_p1[c] = up1[c] - (k / h) * (F_right_out[c] - F_chk_right[c]);
    } else {
      double b = h * (2.0 - d) - k * V;
      u_next[c] = b > 0.0 ? (h * (1.0 - d) * uc[c] + h * up1[c] - k * (F_right_out[c] - f_chk[c] + V * uc[c])) / b
                          : up1[c];
    }
  }

  if (fixed_value) {
    double v_chk = right_prim.v;
    auto z_of = [&](double rho) { return rho * (v_chk + law.p(rho)); };
    if (!case_two[1]) {
      u_r.z = z_of(case_two[0] ? u_l.rho : u_r.rho);
    } else {
      if (!case_two[0]) new_p1.z = z_of(new_p1.rho);
      else u_next.z = z_of(u_next.rho);
    }
  }

  for (int c = 0; c < 2; ++c) {
    double d = fr[c];
    if (!case_two[c]) {
      double a_l = std::max(h * d + k * V, 0.0);
      double a_r = std::max(h * (1.0 - d) - k * V, 0.0);
      new_m[c] = (a_l * u_l[c] + a_r * u_r[c]) / h;
    } else {
      double b = std::max(h * (2.0 - d) - k * V, 0.0);
      double a = std::max(h * (d - 1.0) + k * V, 0.0);
      new_m[c] = u_l[c];
      new_p1[c] = (b * u_next[c] + a * u_l[c]) / h;
    }
  }
  out.cells[m] = new_m;
  out.cells[m + 1] = new_p1;
  return out;
}

}  // namespace detail

template <PressureLaw L>
CellField rs2_reconstruct_step(const L& law, const CellField& field, const UniformGrid& grid,
                               const BusCellContext& ctx, double k, EventLog* log = nullptr) {
  return detail::rs2_step_impl(law, field, grid, ctx, k, false, log);
}

template <PressureLaw L>
CellField rs2_fixed_value_step(const L& law, const CellField& field, const UniformGrid& grid,
                               const BusCellContext& ctx, double k, EventLog* log = nullptr) {
  return detail::rs2_step_impl(law, field, grid, ctx, k, true, log);
}

}  // namespace arz

#endif
