#ifndef ARZ_GODUNOV_HPP
#define ARZ_GODUNOV_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "arz/core.hpp"
#include "arz/riemann.hpp"

namespace arz {

struct UniformGrid {
  double x_left = 0.0;
  double h = 1.0;
  int n_cells = 0;

  double interface(int j) const { return x_left + j * h; }
  double center(int j) const { return x_left + (j + 0.5) * h; }
  double x_right() const { return interface(n_cells); }
  // Cell containing x; x on an interface belongs to the cell on its right.
  int cell_of(double x) const { return static_cast<int>(std::floor((x - x_left) / h)); }
};

inline UniformGrid make_grid(double x_min, double x_max, int n_cells) {
  if (!(x_max > x_min) || n_cells <= 0) throw DomainError("grid: empty window");
  return {x_min, (x_max - x_min) / n_cells, n_cells};
}

struct Segment {
  double x_end = 0.0;
  State s;
};

// Segment i holds on (x_end[i-1], x_end[i]]; the first and last extend to infinity.
struct PiecewiseDatum {
  std::vector<Segment> segments;

  State at(double x) const {
    for (const Segment& seg : segments)
      if (x <= seg.x_end) return seg.s;
    return segments.back().s;
  }
  std::vector<double> breaks() const {
    std::vector<double> b;
    for (size_t i = 0; i + 1 < segments.size(); ++i) b.push_back(segments[i].x_end);
    return b;
  }
};

struct CellField {
  double t = 0.0;
  std::vector<ConservedState> cells;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> v;
};

template <PressureLaw L>
ConservedState datum_average(const L& law, const PiecewiseDatum& datum, double a, double b) {
  ConservedState acc;
  double lo = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < datum.segments.size(); ++i) {
    double hi = i + 1 < datum.segments.size() ? datum.segments[i].x_end
                                              : std::numeric_limits<double>::infinity();
    double len = std::min(hi, b) - std::max(lo, a);
    if (len > 0.0) {
      if (!(datum.segments[i].s.rho > 0.0)) throw VacuumError("project: vacuum segment");
      acc += len * to_conserved(law, datum.segments[i].s);
    }
    lo = hi;
  }
  return acc / (b - a);
}

template <PressureLaw L>
CellField project(const L& law, const PiecewiseDatum& datum, const UniformGrid& grid) {
  CellField f;
  f.cells.resize(grid.n_cells);
  for (int j = 0; j < grid.n_cells; ++j)
    f.cells[j] = datum_average(law, datum, grid.interface(j), grid.interface(j + 1));
  return f;
}

template <PressureLaw L>
Flux numerical_flux(const L& law, const ConservedState& a, const ConservedState& b) {
  return flux(law, interface_state(law, to_primitive(law, a), to_primitive(law, b)));
}

template <PressureLaw L>
double max_speed(const L& law, const std::vector<ConservedState>& cells) {
  double lam = 0.0;
  for (const auto& u : cells) {
    State s = to_primitive(law, u);
    lam = std::max({lam, std::abs(lambda1(law, s)), std::abs(lambda2(s))});
  }
  return lam;
}

template <PressureLaw L>
double cfl_dt(const L& law, const CellField& field, const UniformGrid& grid, double factor = 0.5) {
  if (!(factor > 0.0 && factor <= 1.0)) throw DomainError("cfl factor must lie in (0,1]");
  double lam = max_speed(law, field.cells);
  if (lam == 0.0) throw Error("cfl_dt: zero wave speed, unbounded step");
  return factor * grid.h / lam;
}

// Fluxes at interfaces 0..n with outflow ghosts; entry j sits between cells j-1 and j.
template <PressureLaw L>
std::vector<Flux> interface_fluxes(const L& law, const std::vector<ConservedState>& cells) {
  int n = static_cast<int>(cells.size());
  std::vector<Flux> F(n + 1);
  for (int j = 0; j <= n; ++j) {
    const auto& a = cells[std::max(j - 1, 0)];
    const auto& b = cells[std::min(j, n - 1)];
    F[j] = numerical_flux(law, a, b);
  }
  return F;
}

inline void check_cfl(double k, double lam, double h) {
  if (!(k > 0.0)) throw CflError("non-positive time step");
  if (k * lam > h * (1.0 + 1e-12)) throw CflError("time step violates the CFL condition");
}

template <PressureLaw L>
CellField step(const L& law, const CellField& field, const UniformGrid& grid, double k) {
  check_cfl(k, max_speed(law, field.cells), grid.h);
  auto F = interface_fluxes(law, field.cells);
  CellField out{field.t + k, field.cells};
  double r = k / grid.h;
  for (int j = 0; j < grid.n_cells; ++j) out.cells[j] -= r * (F[j + 1] - F[j]);
  return out;
}

template <PressureLaw L>
Snapshot snapshot(const L& law, const CellField& field, const UniformGrid& grid) {
  Snapshot s;
  s.t = field.t;
  for (int j = 0; j < grid.n_cells; ++j) {
    State st = to_primitive(law, field.cells[j]);
    s.x.push_back(grid.center(j));
    s.rho.push_back(st.rho);
    s.v.push_back(st.v);
  }
  return s;
}

struct RunOptions {
  double cfl_factor = 0.5;
  int snapshot_every = 0;  // steps between snapshots; 0 keeps only first and last
};

struct RunResult {
  CellField field;
  std::vector<Snapshot> snapshots;
  int steps = 0;
};

template <PressureLaw L>
RunResult run(const L& law, CellField field, const UniformGrid& grid, double t_max,
              const RunOptions& opt = {}) {
  if (t_max < field.t) throw DomainError("run: t_max before field time");
  RunResult res;
  res.snapshots.push_back(snapshot(law, field, grid));
  while (field.t < t_max) {
    double k = cfl_dt(law, field, grid, opt.cfl_factor);
    bool last = field.t + k >= t_max;
    if (last) k = t_max - field.t;
    field = step(law, field, grid, k);
    if (last) field.t = t_max;
    ++res.steps;
    if (!last && opt.snapshot_every > 0 && res.steps % opt.snapshot_every == 0)
      res.snapshots.push_back(snapshot(law, field, grid));
  }
  if (res.steps > 0) res.snapshots.push_back(snapshot(law, field, grid));
  res.field = field;
  return res;
}

inline ConservedState total(const std::vector<ConservedState>& cells, double h) {
  ConservedState acc;
  for (const auto& u : cells) acc += h * u;
  return acc;
}

}  // namespace arz

#endif
