#ifndef ARZ_SIMULATE_HPP
#define ARZ_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arz/bus.hpp"
#include "arz/capture.hpp"
#include "arz/constrained.hpp"
#include "arz/godunov.hpp"
#include "arz/moving_mesh.hpp"

namespace arz::sim {

enum class Scheme {
  RiemannRs1,
  RiemannRs2,
  RiemannRsq2,
  Godunov,
  Rs1Reconstruct,
  Rs2Reconstruct,
  Rs2Fixed,
  Rs2Mesh,
  Rs2MeshFixed,
  Wft,
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RiemannRs1: return "riemann-rs1";
    case Scheme::RiemannRs2: return "riemann-rs2";
    case Scheme::RiemannRsq2: return "riemann-rsq2";
    case Scheme::Godunov: return "godunov";
    case Scheme::Rs1Reconstruct: return "rs1-reconstruct";
    case Scheme::Rs2Reconstruct: return "rs2-reconstruct";
    case Scheme::Rs2Fixed: return "rs2-fixed";
    case Scheme::Rs2Mesh: return "rs2-mesh";
    case Scheme::Rs2MeshFixed: return "rs2-mesh-fixed";
    case Scheme::Wft: return "wft";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Scheme::Wft); ++i)
    if (name == scheme_name(static_cast<Scheme>(i))) return static_cast<Scheme>(i);
  return std::nullopt;
}

inline bool is_riemann(Scheme s) {
  return s == Scheme::RiemannRs1 || s == Scheme::RiemannRs2 || s == Scheme::RiemannRsq2;
}
inline bool is_mesh(Scheme s) { return s == Scheme::Rs2Mesh || s == Scheme::Rs2MeshFixed; }
inline bool is_finite_volume(Scheme s) { return !is_riemann(s) && s != Scheme::Wft; }

// Moving constraint: either a bus at constant speed v_bar starting at y0, or a bus
// driven by the traffic and its own free-speed profile.
struct MovingConstraint {
  double alpha = 0.0;
  double R = 0.0;
  std::optional<double> v_bar;
  double y0 = 0.0;
  std::optional<BusSpec> bus;

  double start() const { return bus ? bus->y0 : y0; }
};

struct Numerics {
  int cells = 200;
  double cfl_factor = 0.5;
  double t_max = 0.0;
  double fan_delta = 0.05;
  int snapshot_every = 0;
};

struct BusRecord {
  double t = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

struct FvOutput {
  std::vector<Snapshot> snapshots;
  std::vector<BusRecord> bus;
  EventLog log;
  int steps = 0;
  CellField field;
  std::vector<double> x;  // final cell interfaces
};

namespace detail {

class Driver {
 public:
  Driver(const MovingConstraint& mc) : mc_(mc), y_(mc.start()) {
    if (mc.bus) {
      validate(*mc.bus);
      stops_.arrivals.resize(mc.bus->stops.size());
    }
  }

  double y() const { return y_; }

  // Speed held over the next step given the traffic velocity around the bus.
  double v_bar(double t, double v_traffic) {
    if (!mc_.bus) return *mc_.v_bar;
    v_free_ = free_speed(*mc_.bus, t, y_, stops_);
    return coupled_speed(v_free_, v_traffic);
  }

  BusRecord advance(const PowerLaw& law, const std::vector<ConservedState>& cells, const std::vector<double>& x,
                    int m, double t, double k, double v_bar) {
    if (!mc_.bus) {
      y_ += v_bar * k;
      return {t + k, y_, v_bar};
    }
    BusAdvance a = advance_bus(law, cells, x, m, t, y_, k, v_bar, v_free_);
    double y1 = record_stops(*mc_.bus, stops_, t, y_, t + k, a.y);
    double speed = y1 != a.y ? 0.0 : a.speed;
    y_ = y1;
    return {t + k, y_, speed};
  }

  const StopLog& stops() const { return stops_; }

 private:
  MovingConstraint mc_;
  double y_ = 0.0;
  double v_free_ = 0.0;
  StopLog stops_;
};

inline Snapshot mesh_snapshot(const PowerLaw& law, const AdaptiveMesh& mesh, const CellField& f) {
  Snapshot s;
  s.t = f.t;
  for (int j = 0; j < mesh.n_cells(); ++j) {
    State st = to_primitive(law, f.cells[j]);
    s.x.push_back(0.5 * (mesh.x[j] + mesh.x[j + 1]));
    s.rho.push_back(st.rho);
    s.v.push_back(st.v);
  }
  return s;
}

}  // namespace detail

// Uniform-grid schemes; with a moving constraint the bus is advanced alongside the traffic.
inline FvOutput run_uniform(const PowerLaw& law, const PiecewiseDatum& datum, const UniformGrid& grid, Scheme scheme,
                            const MovingConstraint* mc, const Numerics& num) {
  FvOutput out;
  CellField f = project(law, datum, grid);
  std::vector<double> x(grid.n_cells + 1);
  for (int i = 0; i <= grid.n_cells; ++i) x[i] = grid.interface(i);
  std::optional<detail::Driver> bus;
  if (mc) bus.emplace(*mc);
  out.snapshots.push_back(snapshot(law, f, grid));
  auto cell_of = [&](double y) { return std::clamp(grid.cell_of(y + 1e-9 * grid.h), 0, grid.n_cells - 1); };
  if (bus) {
    double v0 = bus->v_bar(0.0, to_primitive(law, f.cells[cell_of(bus->y())]).v);
    out.bus.push_back({f.t, bus->y(), v0});
  }
  while (f.t < num.t_max) {
    int m = 0;
    double vb = 0.0;
    if (bus) {
      m = cell_of(bus->y());
      vb = bus->v_bar(f.t, to_primitive(law, f.cells[m]).v);
    }
    double k = cfl_dt(law, f, grid, num.cfl_factor);
    if (vb > 0.0) k = std::min(k, num.cfl_factor * grid.h / vb);
    bool last = f.t + k >= num.t_max;
    if (last) k = num.t_max - f.t;
    CellField next;
    if (bus && scheme != Scheme::Godunov) {
      BusCellContext ctx{m, bus->y(), vb, build_moving_spec(law, vb, mc->alpha, mc->R)};
      if (scheme == Scheme::Rs1Reconstruct) next = rs1_step(law, f, grid, ctx, k, &out.log);
      else if (scheme == Scheme::Rs2Reconstruct) next = rs2_reconstruct_step(law, f, grid, ctx, k, &out.log);
      else next = rs2_fixed_value_step(law, f, grid, ctx, k, &out.log);
    } else {
      next = step(law, f, grid, k);
    }
    if (bus) out.bus.push_back(bus->advance(law, f.cells, x, m, f.t, k, vb));
    f = std::move(next);
    if (last) f.t = num.t_max;
    ++out.steps;
    if (!last && num.snapshot_every > 0 && out.steps % num.snapshot_every == 0)
      out.snapshots.push_back(snapshot(law, f, grid));
  }
  if (out.steps > 0) out.snapshots.push_back(snapshot(law, f, grid));
  out.field = std::move(f);
  out.x = std::move(x);
  return out;
}

// Moving-mesh schemes: the interface next to the bus follows it at each step.
inline FvOutput run_mesh(const PowerLaw& law, const PiecewiseDatum& datum, double x_min, double x_max,
                         Scheme scheme, const MovingConstraint& mc, const Numerics& num) {
  FvOutput out;
  AdaptiveMesh mesh = make_mesh(x_min, x_max, num.cells, mc.start());
  CellField f = project(law, datum, base_grid(mesh));
  detail::Driver bus(mc);
  out.snapshots.push_back(detail::mesh_snapshot(law, mesh, f));
  out.bus.push_back({f.t, bus.y(), bus.v_bar(0.0, to_primitive(law, f.cells[mesh.cell_of(bus.y())]).v)});
  while (f.t < num.t_max) {
    if (!(bus.y() > mesh.x[1] && bus.y() < mesh.x[mesh.n_cells() - 1]))
      throw Error("moving mesh: the bus left the window");
    AdaptResult a = adapt(law, mesh, f, bus.y());
    int m = a.mesh.m;
    double vb = bus.v_bar(f.t, to_primitive(law, a.field.cells[m]).v);
    double k = cfl_nonuniform(law, a.mesh, a.field) * num.cfl_factor / 0.5;
    if (vb > 0.0) k = std::min(k, num.cfl_factor * a.mesh.min_width() / vb);
    bool last = f.t + k >= num.t_max;
    if (last) k = num.t_max - f.t;
    BusCellContext ctx{m, bus.y(), vb, build_moving_spec(law, vb, mc.alpha, mc.R)};
    MeshStepResult r = scheme == Scheme::Rs2MeshFixed
                           ? step_nonuniform_imposed(law, a.mesh, a.field, ctx, k, a.v_frozen, &out.log)
                           : step_nonuniform(law, a.mesh, a.field, ctx, k, &out.log);
    out.bus.push_back(bus.advance(law, a.field.cells, a.mesh.x, m, f.t, k, vb));
    mesh = std::move(r.mesh);
    f = std::move(r.field);
    if (last) f.t = num.t_max;
    ++out.steps;
    if (!last && num.snapshot_every > 0 && out.steps % num.snapshot_every == 0)
      out.snapshots.push_back(detail::mesh_snapshot(law, mesh, f));
  }
  if (out.steps > 0) out.snapshots.push_back(detail::mesh_snapshot(law, mesh, f));
  out.field = std::move(f);
  out.x = mesh.x;
  return out;
}

// Exact solution of a Riemann datum centred at x0 for the scheme's solver.
struct ExactRiemann {
  WaveFan fan;
  double x0 = 0.0;

  State at(const PowerLaw& law, double t, double x) const {
    if (t <= 0.0) return x <= x0 ? fan.left_state : fan.right_state;
    return sample(law, fan, (x - x0) / t);
  }
};

inline ExactRiemann exact_riemann(const PowerLaw& law, Scheme scheme, const State& l, const State& r, double x0,
                                  const MovingConstraint* mc) {
  if (!mc || scheme == Scheme::Godunov) return {solve(law, l, r), x0};
  if (!mc->v_bar) throw DomainError("exact solution needs a constant bus speed");
  Cap cap = build_moving_spec(law, *mc->v_bar, mc->alpha, mc->R);
  bool rs1 = scheme == Scheme::Rs1Reconstruct || scheme == Scheme::RiemannRs1;
  return {rs1 ? solve_rs1(law, l, r, cap).fan : solve_rs2(law, l, r, cap).fan, x0};
}

// Cell average of the exact solution; quadrature runs between consecutive wave positions.
inline ConservedState exact_average(const PowerLaw& law, const ExactRiemann& ex, double t, double a, double b) {
  std::vector<double> cuts{a, b};
  for (const Wave& w : ex.fan.waves)
    for (double s : {w.speed_lo, w.speed_hi}) {
      double xw = ex.x0 + s * t;
      if (xw > a && xw < b) cuts.push_back(xw);
    }
  std::sort(cuts.begin(), cuts.end());
  ConservedState acc;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    double mid = 0.5 * (lo + hi);
    auto comp = [&](int c) {
      auto g = [&](double x) {
        // keep evaluation points strictly inside the piece
        State s = ex.at(law, t, std::clamp(x, std::nextafter(lo, mid), std::nextafter(hi, mid)));
        return c == 0 ? s.rho : s.rho * w_of(law, s);
      };
      return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, lo, hi, 10, 1e-13);
    };
    acc.rho += comp(0);
    acc.z += comp(1);
  }
  return acc / (b - a);
}

struct L1Error {
  double rho = 0.0;
  double z = 0.0;
};

inline L1Error l1_error(const PowerLaw& law, const ExactRiemann& ex, const CellField& f, const std::vector<double>& x) {
  L1Error e;
  for (size_t j = 0; j + 1 < x.size(); ++j) {
    double h = x[j + 1] - x[j];
    if (!(h > 0.0)) continue;
    ConservedState u = exact_average(law, ex, f.t, x[j], x[j + 1]);
    e.rho += std::abs(f.cells[j].rho - u.rho) * h;
    e.z += std::abs(f.cells[j].z - u.z) * h;
  }
  return e;
}

}  // namespace arz::sim

#endif
