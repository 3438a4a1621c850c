#ifndef ARZ_MOVING_MESH_HPP
#define ARZ_MOVING_MESH_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "arz/capture.hpp"
#include "arz/constrained.hpp"
#include "arz/godunov.hpp"

namespace arz {

// Uniform base mesh x0 + i h0 of which only the interface next to the bus may move.
struct AdaptiveMesh {
  std::vector<double> x;
  double x0 = 0.0;
  double h0 = 1.0;
  int m = 0;  // interface carrying the bus after adapt; cell m is the first cell after it

  int n_cells() const { return static_cast<int>(x.size()) - 1; }
  double base(int i) const { return x0 + i * h0; }
  double width(int j) const { return x[j + 1] - x[j]; }
  double min_width() const {
    double w = width(0);
    for (int j = 1; j < n_cells(); ++j) w = std::min(w, width(j));
    return w;
  }
  int cell_of(double y) const {
    auto it = std::upper_bound(x.begin(), x.end(), y);
    return std::clamp(static_cast<int>(it - x.begin()) - 1, 0, n_cells() - 1);
  }
};

// Base mesh covering [x_min, x_max] shifted by less than h0/2 so that y0 is an interface.
inline AdaptiveMesh make_mesh(double x_min, double x_max, int n_cells, double y0) {
  UniformGrid g = make_grid(x_min, x_max, n_cells);
  double shift = y0 - (x_min + std::round((y0 - x_min) / g.h) * g.h);
  AdaptiveMesh mesh;
  mesh.h0 = g.h;
  mesh.x0 = x_min + shift;
  for (int i = 0; i <= n_cells; ++i) mesh.x.push_back(mesh.base(i));
  mesh.m = static_cast<int>(std::lround((y0 - mesh.x0) / g.h));
  mesh.x[mesh.m] = y0;
  return mesh;
}

inline UniformGrid base_grid(const AdaptiveMesh& mesh) { return {mesh.x0, mesh.h0, mesh.n_cells()}; }

template <PressureLaw L>
ConservedState green_update(const L& law, const ConservedState& u_bar, double h_old, double h_new, double k,
                            double lambda_l, double lambda_r, const State& u_l_trace, const State& u_r_trace) {
  if (!(h_new > 0.0)) throw MeshCollapse("green_update: non-positive cell width");
  ConservedState ul = to_conserved(law, u_l_trace), ur = to_conserved(law, u_r_trace);
  Flux fl = flux(law, u_l_trace), fr = flux(law, u_r_trace);
  return (h_old * u_bar - k * (fr - lambda_r * ur - fl + lambda_l * ul)) / h_new;
}

namespace detail {

// Move interface i to pos; the swept region keeps the value of the cell it belonged to.
inline void move_interface(AdaptiveMesh& mesh, CellField& field, int i, double pos) {
  double old = mesh.x[i];
  if (pos == old || i <= 0 || i >= mesh.n_cells()) return;
  auto& c = field.cells;
  if (pos > old) {
    double hl = mesh.width(i - 1), s = pos - old;
    c[i - 1] = (hl * c[i - 1] + s * c[i]) / (hl + s);
  } else {
    double hr = mesh.width(i), s = old - pos;
    c[i] = (hr * c[i] + s * c[i - 1]) / (hr + s);
  }
  mesh.x[i] = pos;
}

}  // namespace detail

struct AdaptResult {
  AdaptiveMesh mesh;
  CellField field;
  bool case_two = false;
  double v_frozen = 0.0;  // velocity of the bus cell before adapt
};

template <PressureLaw L>
AdaptResult adapt(const L& law, const AdaptiveMesh& mesh, const CellField& field, double y) {
  AdaptResult r{mesh, field, false, 0.0};
  int c = mesh.cell_of(y);
  r.v_frozen = to_primitive(law, field.cells[c]).v;
  for (int i = 1; i < mesh.n_cells(); ++i)
    if (i != c && i != c + 1 && r.mesh.x[i] != r.mesh.base(i)) detail::move_interface(r.mesh, r.field, i, r.mesh.base(i));
  if (r.mesh.x[c + 1] - y > 0.5 * mesh.h0) {
    detail::move_interface(r.mesh, r.field, c, y);
    r.mesh.m = c;
  } else {
    detail::move_interface(r.mesh, r.field, c + 1, y);
    detail::move_interface(r.mesh, r.field, c, r.mesh.base(c));
    r.mesh.m = c + 1;
    r.case_two = true;
  }
  return r;
}

template <PressureLaw L>
double cfl_nonuniform(const L& law, const AdaptiveMesh& mesh, const CellField& field) {
  double lam = max_speed(law, field.cells);
  if (lam == 0.0) throw Error("cfl_nonuniform: zero wave speed");
  return mesh.min_width() / (2.0 * lam);
}

struct MeshStepResult {
  AdaptiveMesh mesh;
  CellField field;
  bool violated = false;
};

namespace detail {

template <PressureLaw L>
MeshStepResult mesh_step_impl(const L& law, const AdaptiveMesh& mesh, const CellField& field,
                              const BusCellContext& ctx, double k, const double* v_imposed, EventLog* log) {
  const int n = mesh.n_cells();
  const auto& u = field.cells;
  if (!(k * max_speed(law, u) <= 0.5 * mesh.min_width() * (1.0 + 1e-12)))
    throw CflError("step_nonuniform: time step violates the CFL condition");
  std::vector<Flux> F(n + 1);
  for (int j = 0; j <= n; ++j) F[j] = numerical_flux(law, cell_at(u, j - 1), cell_at(u, j));
  MeshStepResult out{mesh, {field.t + k, u}, false};
  for (int j = 0; j < n; ++j) out.field.cells[j] -= (k / mesh.width(j)) * (F[j + 1] - F[j]);

  int b = mesh.m;
  if (b < 1 || b >= n) return out;
  Cap cap = ctx.cap();
  State sl = to_primitive(law, u[b - 1]), sr = to_primitive(law, u[b]);
  if (!violates(law, sl, sr, cap)) return out;
  auto hc = hat_check1_points(law, sl, cap);
  double v2 = v_imposed ? *v_imposed : sr.v;
  if (!hc || !(v2 > cap.v_bar)) {
    log_event(log, field.t, "mesh: hat or check2 undefined, plain Godunov");
    return out;
  }
  State chk = check2_point(State{sr.rho, v2}, cap);
  double V = cap.v_bar, hl = mesh.width(b - 1), hr = mesh.width(b);
  State tl = interface_state(law, to_primitive(law, cell_at(u, b - 2)), sl);
  State tr = interface_state(law, sr, to_primitive(law, cell_at(u, b + 1)));
  out.field.cells[b - 1] = green_update(law, u[b - 1], hl, hl + V * k, k, 0.0, V, tl, hc->hat);
  out.field.cells[b] = green_update(law, u[b], hr, hr - V * k, k, V, 0.0, chk, tr);
  out.mesh.x[b] += V * k;
  if (v_imposed) {
    double rho = out.field.cells[b].rho;
    out.field.cells[b].z = rho * (*v_imposed + law.p(rho));
  }
  out.violated = true;
  return out;
}

}  // namespace detail

template <PressureLaw L>
MeshStepResult step_nonuniform(const L& law, const AdaptiveMesh& mesh, const CellField& field,
                               const BusCellContext& ctx, double k, EventLog* log = nullptr) {
  return detail::mesh_step_impl(law, mesh, field, ctx, k, nullptr, log);
}

// v_check2 is the bus-cell velocity frozen before adapt (AdaptResult::v_frozen).
template <PressureLaw L>
MeshStepResult step_nonuniform_imposed(const L& law, const AdaptiveMesh& mesh, const CellField& field,
                                       const BusCellContext& ctx, double k, double v_check2,
                                       EventLog* log = nullptr) {
  return detail::mesh_step_impl(law, mesh, field, ctx, k, &v_check2, log);
}

// Length-weighted averages of the mesh solution over the base cells.
inline std::vector<ConservedState> resample(const AdaptiveMesh& mesh, const CellField& field) {
  int n = mesh.n_cells();
  std::vector<ConservedState> out(n);
  for (int j = 0; j < n; ++j) {
    double a = mesh.base(j), b = mesh.base(j + 1);
    ConservedState acc;
    for (int i = std::max(j - 2, 0); i <= std::min(j + 2, n - 1); ++i) {
      double len = std::min(b, mesh.x[i + 1]) - std::max(a, mesh.x[i]);
      if (len > 0.0) acc += len * field.cells[i];
    }
    out[j] = acc / (b - a);
  }
  return out;
}

inline ConservedState total(const AdaptiveMesh& mesh, const CellField& field) {
  ConservedState acc;
  for (int j = 0; j < mesh.n_cells(); ++j) acc += mesh.width(j) * field.cells[j];
  return acc;
}

}  // namespace arz

#endif
