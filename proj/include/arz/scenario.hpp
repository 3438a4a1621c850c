#ifndef ARZ_SCENARIO_HPP
#define ARZ_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arz/simulate.hpp"
#include "arz/wft.hpp"

namespace arz::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad input: malformed file or a field failing validation. The message starts with the field path.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixedConstraint {
  double q = 0.0;
  std::optional<InvariantDomain> domain;
};

struct Scenario {
  std::string name;
  PowerLaw law{1.0};
  double x_min = 0.0;
  double x_max = 0.0;
  PiecewiseDatum datum;
  std::optional<sim::MovingConstraint> moving;
  std::optional<FixedConstraint> fixed;
  sim::Scheme scheme = sim::Scheme::Godunov;
  sim::Numerics numerics;

  // Position of the single jump of a two-segment datum.
  std::optional<double> jump() const {
    if (datum.segments.size() != 2) return std::nullopt;
    return datum.segments[0].x_end;
  }
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

inline const json& field(const json& obj, const std::string& key, const std::string& path, const std::string& why) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, why);
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

inline double req_num(const json& obj, const std::string& key, const std::string& path,
                      const std::string& why = "required") {
  return number(field(obj, key, path, why), join(path, key));
}

inline std::optional<double> opt_num(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj.at(key), join(path, key));
}

inline int opt_int(const json& obj, const std::string& key, const std::string& path, int def) {
  if (!obj.contains(key)) return def;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<int>();
}

inline std::string req_str(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path, "required");
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

inline InvariantDomain parse_domain(const json& d, const std::string& path) {
  InvariantDomain dom{req_num(d, "v1", path), req_num(d, "v2", path), req_num(d, "w1", path), req_num(d, "w2", path)};
  try {
    validate(dom);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return dom;
}

inline BusSpec parse_bus(const json& b, const std::string& path, double y0) {
  BusSpec s;
  s.v_b = req_num(b, "v_b", path);
  s.y0 = opt_num(b, "y0", path).value_or(y0);
  s.delta = opt_num(b, "delta", path).value_or(0.0);
  s.tau = opt_num(b, "tau", path).value_or(0.0);
  s.arrival_tol = opt_num(b, "arrival_tol", path).value_or(0.0);
  if (b.contains("stops")) {
    const json& st = b.at("stops");
    if (!st.is_array()) fail(join(path, "stops"), "expected an array");
    for (size_t i = 0; i < st.size(); ++i) s.stops.push_back(number(st[i], join(path, "stops") + "[" + std::to_string(i) + "]"));
  }
  try {
    validate(s);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return s;
}

}  // namespace detail

inline Scenario parse_scenario(const json& j) {
  using namespace detail;
  Scenario s;
  if (!j.is_object()) fail("(root)", "expected an object");
  s.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "scenario";

  const json& law = field(j, "law", "", "required");
  double gamma = req_num(law, "gamma", "law");
  if (!(gamma > 0.0)) fail("law.gamma", "must be positive");
  s.law = PowerLaw(gamma);

  const json& win = field(j, "window", "", "required");
  s.x_min = req_num(win, "x_min", "window");
  s.x_max = req_num(win, "x_max", "window");
  if (!(s.x_max > s.x_min)) fail("window", "x_max must exceed x_min");

  const json& init = field(j, "initial", "", "required");
  const json& segs = field(init, "segments", "initial", "required");
  if (!segs.is_array() || segs.empty()) fail("initial.segments", "expected a non-empty array");
  double prev = s.x_min;
  for (size_t i = 0; i < segs.size(); ++i) {
    std::string p = "initial.segments[" + std::to_string(i) + "]";
    Segment seg{req_num(segs[i], "x_end", p), {req_num(segs[i], "rho", p), req_num(segs[i], "v", p)}};
    if (!(seg.s.rho > 0.0)) fail(p + ".rho", "must be positive (vacuum is not supported)");
    if (!(seg.x_end > prev)) fail(p + ".x_end", "segments must be increasing and start inside the window");
    bool last = i + 1 == segs.size();
    if (last && seg.x_end < s.x_max) fail(p + ".x_end", "segments must cover the window");
    if (!last && seg.x_end >= s.x_max) fail(p + ".x_end", "only the last segment may reach x_max");
    prev = seg.x_end;
    s.datum.segments.push_back(seg);
  }

  auto scheme = sim::parse_scheme(req_str(j, "scheme", ""));
  if (!scheme) fail("scheme", "unknown scheme '" + j.at("scheme").get<std::string>() + "'");
  s.scheme = *scheme;

  const json& num = field(j, "numerics", "", "required");
  s.numerics.cells = opt_int(num, "cells", "numerics", 200);
  s.numerics.cfl_factor = opt_num(num, "cfl_factor", "numerics").value_or(0.5);
  s.numerics.t_max = req_num(num, "t_max", "numerics");
  s.numerics.fan_delta = opt_num(num, "fan_delta", "numerics").value_or(0.05);
  s.numerics.snapshot_every = opt_int(num, "snapshot_every", "numerics", 0);
  if (s.numerics.cells < 2) fail("numerics.cells", "must be at least 2");
  if (!(s.numerics.cfl_factor > 0.0 && s.numerics.cfl_factor <= 1.0)) fail("numerics.cfl_factor", "must lie in (0,1]");
  if (!(s.numerics.t_max > 0.0)) fail("numerics.t_max", "must be positive");
  if (!(s.numerics.fan_delta > 0.0 && s.numerics.fan_delta <= 1.0)) fail("numerics.fan_delta", "must lie in (0,1]");
  if (s.numerics.snapshot_every < 0) fail("numerics.snapshot_every", "must be >= 0");

  if (j.contains("constraint")) {
    const json& c = j.at("constraint");
    std::string type = req_str(c, "type", "constraint");
    if (type == "moving") {
      sim::MovingConstraint m;
      m.alpha = req_num(c, "alpha", "constraint", "required for a moving constraint");
      m.R = req_num(c, "R", "constraint", "required for a moving constraint");
      m.y0 = opt_num(c, "y0", "constraint").value_or(0.0);
      m.v_bar = opt_num(c, "v_bar", "constraint");
      if (c.contains("bus")) m.bus = parse_bus(c.at("bus"), "constraint.bus", m.y0);
      if (m.v_bar && m.bus) fail("constraint", "give either v_bar or bus, not both");
      if (!m.v_bar && !m.bus) fail("constraint.v_bar", "required for a moving constraint without a bus");
      if (!(m.alpha > 0.0 && m.alpha < 1.0)) fail("constraint.alpha", "must lie in (0,1)");
      if (!(m.R > 0.0)) fail("constraint.R", "must be positive");
      double top = m.v_bar ? *m.v_bar : m.bus->v_b;
      if (m.v_bar && !(*m.v_bar >= 0.0)) fail("constraint.v_bar", "must be >= 0");
      if (!(s.law.p(m.alpha * m.R) > top)) fail("constraint", "infeasible: p(alpha R) must exceed the bus speed");
      if (!(m.start() > s.x_min && m.start() < s.x_max)) fail("constraint.y0", "must lie inside the window");
      s.moving = m;
    } else if (type == "fixed") {
      FixedConstraint f;
      f.q = req_num(c, "q", "constraint", "required for a fixed constraint");
      if (!(f.q > 0.0)) fail("constraint.q", "must be positive");
      if (c.contains("domain")) f.domain = parse_domain(c.at("domain"), "constraint.domain");
      s.fixed = f;
    } else {
      fail("constraint.type", "expected 'moving' or 'fixed'");
    }
  }

  using sim::Scheme;
  std::string sn = sim::scheme_name(s.scheme);
  if (sim::is_riemann(s.scheme) && s.datum.segments.size() != 2)
    fail("initial.segments", sn + " needs exactly two segments");
  switch (s.scheme) {
    case Scheme::RiemannRs1:
    case Scheme::RiemannRs2:
      if (!s.moving) fail("constraint", sn + " needs a moving constraint");
      if (s.moving->bus) fail("constraint.bus", sn + " needs a constant v_bar");
      break;
    case Scheme::RiemannRsq2:
      if (!s.fixed) fail("constraint", sn + " needs a fixed constraint");
      break;
    case Scheme::Godunov:
      if (s.fixed) fail("constraint.type", "godunov takes no fixed constraint");
      break;
    case Scheme::Wft:
      if (!s.fixed) fail("constraint", "wft needs a fixed constraint");
      if (!s.fixed->domain) fail("constraint.domain", "required for wft");
      break;
    default:
      if (!s.moving) fail("constraint", sn + " needs a moving constraint");
  }
  if (s.moving && sim::is_finite_volume(s.scheme) && s.numerics.cfl_factor > 0.5)
    fail("numerics.cfl_factor", "must be <= 0.5 with a moving constraint (strong CFL)");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": parse error: " + e.what());
  }
  return parse_scenario(j);
}

// ---- output

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row_strings(header);
  }

  template <class... T>
  void row(const T&... cols) {
    std::vector<std::string> c{cell(cols)...};
    row_strings(c);
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  void row_strings(const std::vector<std::string>& c) {
    for (size_t i = 0; i < c.size(); ++i) out_ << (i ? "," : "") << c[i];
    out_ << '\n';
  }

  std::ofstream out_;
};

// Derived constants reported in meta.csv and the run header, in insertion order.
struct Meta {
  std::vector<std::pair<std::string, std::string>> rows;

  void add(const std::string& k, double v) { rows.emplace_back(k, fmt(v)); }
  void add(const std::string& k, std::string v) {
    std::replace(v.begin(), v.end(), ',', ';');  // keep meta.csv two columns wide
    rows.emplace_back(k, std::move(v));
  }
  std::optional<std::string> get(const std::string& k) const {
    for (const auto& [key, v] : rows)
      if (key == k) return v;
    return std::nullopt;
  }
};

struct Report {
  Meta meta;
  std::vector<std::string> files;
};

namespace detail {

inline void write_profiles(const fs::path& dir, const std::vector<Snapshot>& snaps) {
  Csv c(dir / "profiles.csv", {"t", "x", "rho", "v"});
  for (const Snapshot& s : snaps)
    for (size_t i = 0; i < s.x.size(); ++i) c.row(s.t, s.x[i], s.rho[i], s.v[i]);
}

inline void write_bus(const fs::path& dir, const std::vector<sim::BusRecord>& recs) {
  Csv c(dir / "bus.csv", {"t", "y", "speed"});
  for (const auto& r : recs) c.row(r.t, r.y, r.speed);
}

inline std::vector<double> centres(const Scenario& s) {
  UniformGrid g = make_grid(s.x_min, s.x_max, s.numerics.cells);
  std::vector<double> x(g.n_cells);
  for (int j = 0; j < g.n_cells; ++j) x[j] = g.center(j);
  return x;
}

inline std::optional<Cap> cap_of(const Scenario& s, Meta& m) {
  if (s.moving) {
    double vb = s.moving->v_bar ? *s.moving->v_bar : s.moving->bus->v_b;
    MovingConstraintSpec spec = build_moving_spec(s.law, vb, s.moving->alpha, s.moving->R);
    m.add("V_bar", vb);
    m.add("w_alpha", spec.w_alpha);
    m.add("rho_alpha", spec.rho_alpha);
    m.add("F_alpha", spec.F_alpha);
    return Cap(spec);
  }
  if (s.fixed) {
    m.add("q", s.fixed->q);
    return Cap{s.fixed->q, 0.0};
  }
  return std::nullopt;
}

inline void add_points(const Scenario& s, const Cap& cap, Meta& m) {
  if (s.datum.segments.size() != 2) return;
  const State& l = s.datum.segments[0].s;
  const State& r = s.datum.segments[1].s;
  if (auto hc = hat_check1_points(s.law, l, cap)) {
    m.add("rho_hat", hc->hat.rho);
    m.add("v_hat", hc->hat.v);
    m.add("rho_check1", hc->check1.rho);
    m.add("v_check1", hc->check1.v);
  }
  if (r.v > cap.v_bar) {
    State c2 = check2_point(r, cap);
    m.add("rho_check2", c2.rho);
    m.add("v_check2", c2.v);
  }
  m.add("violates", violates(s.law, l, r, cap) ? "1" : "0");
}

// Exact reference for an FV run when one is available: two segments and a bus at constant
// speed starting on the jump (or no constraint acting on the solution).
inline std::optional<sim::ExactRiemann> exact_reference(const Scenario& s) {
  auto x0 = s.jump();
  if (!x0) return std::nullopt;
  const sim::MovingConstraint* mc = s.moving ? &*s.moving : nullptr;
  if (mc && s.scheme != sim::Scheme::Godunov) {
    if (mc->bus || mc->start() != *x0) return std::nullopt;
  }
  return sim::exact_riemann(s.law, s.scheme, s.datum.segments[0].s, s.datum.segments[1].s, *x0, mc);
}

inline void run_riemann(const Scenario& s, const fs::path& dir, Report& rep) {
  const State& l = s.datum.segments[0].s;
  const State& r = s.datum.segments[1].s;
  double x0 = *s.jump(), t = s.numerics.t_max;
  WaveFan fan;
  double bus_speed = 0.0;
  if (s.scheme == sim::Scheme::RiemannRsq2) {
    fan = solve_rsq2(s.law, l, r, make_fixed_spec(s.fixed->q));
  } else {
    Cap cap = build_moving_spec(s.law, *s.moving->v_bar, s.moving->alpha, s.moving->R);
    ConstrainedSolution sol = s.scheme == sim::Scheme::RiemannRs1 ? solve_rs1(s.law, l, r, cap) : solve_rs2(s.law, l, r, cap);
    fan = sol.fan;
    bus_speed = sol.bus_speed;
    rep.meta.add("nonclassical", sol.nonclassical ? "1" : "0");
    rep.meta.add("bus_speed", bus_speed);
  }
  Snapshot snap;
  snap.t = t;
  for (double x : centres(s)) {
    State st = sample(s.law, fan, (x - x0) / t);
    snap.x.push_back(x);
    snap.rho.push_back(st.rho);
    snap.v.push_back(st.v);
  }
  write_profiles(dir, {snap});
  rep.files.push_back("profiles.csv");
  {
    Csv c(dir / "waves.csv", {"kind", "speed_lo", "speed_hi", "rho_left", "v_left", "rho_right", "v_right"});
    const char* names[] = {"shock", "rarefaction", "contact", "nonclassical"};
    for (const Wave& w : fan.waves)
      c.row(names[static_cast<int>(w.kind)], w.speed_lo, w.speed_hi, w.left.rho, w.left.v, w.right.rho, w.right.v);
    rep.files.push_back("waves.csv");
  }
  rep.meta.add("waves", static_cast<double>(fan.waves.size()));
  if (s.moving) {
    write_bus(dir, {{0.0, x0, bus_speed}, {t, x0 + bus_speed * t, bus_speed}});
    rep.files.push_back("bus.csv");
  }
}

inline sim::FvOutput run_fv(const Scenario& s) {
  const sim::MovingConstraint* mc = s.moving ? &*s.moving : nullptr;
  if (sim::is_mesh(s.scheme)) return sim::run_mesh(s.law, s.datum, s.x_min, s.x_max, s.scheme, *mc, s.numerics);
  return sim::run_uniform(s.law, s.datum, make_grid(s.x_min, s.x_max, s.numerics.cells), s.scheme, mc, s.numerics);
}

inline ConservedState field_total(const sim::FvOutput& o) {
  ConservedState acc;
  for (size_t j = 0; j < o.field.cells.size(); ++j) acc += (o.x[j + 1] - o.x[j]) * o.field.cells[j];
  return acc;
}

inline void run_finite_volume(const Scenario& s, const fs::path& dir, Report& rep) {
  sim::FvOutput o = run_fv(s);
  write_profiles(dir, o.snapshots);
  rep.files.push_back("profiles.csv");
  if (s.moving) {
    write_bus(dir, o.bus);
    rep.files.push_back("bus.csv");
  }
  {
    std::ofstream log(dir / "log.txt", std::ios::binary);
    for (const auto& line : o.log) log << line << '\n';
    rep.files.push_back("log.txt");
  }
  ConservedState tot = field_total(o);
  rep.meta.add("steps", static_cast<double>(o.steps));
  rep.meta.add("logged_events", static_cast<double>(o.log.size()));
  rep.meta.add("total_rho", tot.rho);
  rep.meta.add("total_z", tot.z);
  if (auto ex = exact_reference(s)) {
    sim::L1Error e = sim::l1_error(s.law, *ex, o.field, o.x);
    rep.meta.add("l1_rho_vs_exact", e.rho);
    rep.meta.add("l1_z_vs_exact", e.z);
  }
}

inline wft::PiecewiseConstant to_piecewise_constant(const PiecewiseDatum& d) {
  wft::PiecewiseConstant pc;
  for (size_t i = 0; i < d.segments.size(); ++i) {
    if (i + 1 < d.segments.size()) pc.breaks.push_back(d.segments[i].x_end);
    pc.states.push_back(d.segments[i].s);
  }
  return pc;
}

inline void run_wft(const Scenario& s, const fs::path& dir, Report& rep) {
  wft::Params p{*s.fixed->domain, s.fixed->q, s.numerics.fan_delta};
  wft::PiecewiseConstant datum = to_piecewise_constant(s.datum);
  wft::FrontState s0 = wft::initialize(s.law, datum, p);
  wft::RunResult res = wft::run(s.law, s0, p, s.numerics.t_max);

  std::vector<Snapshot> snaps;
  for (const wft::FrontState* st : {&s0, &res.state}) {
    Snapshot snap;
    snap.t = st->t;
    for (double x : centres(s)) {
      State v = wft::sample(*st, st->t, x);
      snap.x.push_back(x);
      snap.rho.push_back(v.rho);
      snap.v.push_back(v.v);
    }
    snaps.push_back(std::move(snap));
  }
  write_profiles(dir, snaps);
  {
    Csv c(dir / "tv.csv", {"t", "tv_rho", "tv_v", "tv_w", "n_fronts"});
    for (const auto& smp : res.tv_series) c.row(smp.t, smp.tv.rho, smp.tv.v, smp.tv.w, smp.n_fronts);
  }
  {
    Csv c(dir / "events.csv", {"t", "x", "row", "delta_n", "delta_tv_rho", "delta_tv_v", "delta_tv_w", "reference",
                               "resplit_capped"});
    for (const auto& e : res.state.tv_ledger)
      c.row(e.t, e.x, wft::row_name(e.row), e.delta_n, e.delta_tv_rho, e.delta_tv_v, e.delta_tv_w, e.reference,
            e.resplit_capped ? 1 : 0);
  }
  rep.files.insert(rep.files.end(), {"profiles.csv", "tv.csv", "events.csv"});

  wft::DomainConstants dc = wft::domain_constants(s.law, p.domain);
  int N = wft::fan_count(p.delta);
  auto [k1, k2] = wft::jump_counts(datum);
  wft::CountBounds b = wft::count_bounds(N, k1, k2);
  wft::EstimateReport er = wft::check_estimates(res.state.tv_ledger, dc, N);
  wft::TotalVariation led = wft::ledger_total_variation(res.state);
  wft::TotalVariation now = wft::total_variation(s.law, res.state.fronts);
  double mismatch = std::max({std::abs(led.rho - now.rho), std::abs(led.v - now.v), std::abs(led.w - now.w)});
  Meta& m = rep.meta;
  m.add("N", static_cast<double>(N));
  m.add("k1", dc.k1);
  m.add("k2", dc.k2);
  m.add("c1", dc.c1);
  m.add("c2", dc.c2);
  m.add("c3", dc.c3);
  m.add("lipschitz", dc.lipschitz);
  m.add("jumps_x_neg", static_cast<double>(k1));
  m.add("jumps_x_pos", static_cast<double>(k2));
  m.add("bound_waves", b.waves);
  m.add("bound_interactions", b.interactions);
  m.add("waves_appeared", static_cast<double>(res.waves_appeared));
  m.add("events", static_cast<double>(res.events));
  m.add("max_ratio_contact_v", er.max_ratio_contact_v);
  m.add("max_ratio_rarefaction_w", er.max_ratio_rarefaction_w);
  m.add("tv_ledger_mismatch", mismatch);
  m.add("estimates_ok", er.ok ? "1" : "0");
  for (const auto& f : er.failures) m.add("estimate_failure", f);
}

inline void write_meta(const fs::path& dir, const Meta& m) {
  Csv c(dir / "meta.csv", {"key", "value"});
  for (const auto& [k, v] : m.rows) c.row(k, v);
}

}  // namespace detail

// Runs the scenario and writes its CSV files into out_dir. Solver failures propagate as arz::Error.
inline Report run_scenario(const Scenario& s, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Report rep;
  rep.meta.add("scenario", s.name);
  rep.meta.add("scheme", sim::scheme_name(s.scheme));
  rep.meta.add("gamma", s.law.gamma);
  if (auto cap = detail::cap_of(s, rep.meta)) detail::add_points(s, *cap, rep.meta);
  if (s.fixed && s.fixed->domain) {
    bool inv = rs2_domain_invariant(s.law, *s.fixed->domain, Cap{s.fixed->q, 0.0});
    rep.meta.add("domain_invariant", inv ? "1" : "0");
  }
  if (sim::is_riemann(s.scheme)) detail::run_riemann(s, out_dir, rep);
  else if (s.scheme == sim::Scheme::Wft) detail::run_wft(s, out_dir, rep);
  else detail::run_finite_volume(s, out_dir, rep);
  detail::write_meta(out_dir, rep.meta);
  rep.files.push_back("meta.csv");
  return rep;
}

struct StudyRow {
  int cells = 0;
  double h = 0.0;
  double l1_rho = 0.0;
  double l1_z = 0.0;
  double order_rho = std::nan("");
  double order_z = std::nan("");
};

inline void check_study(const Scenario& s, int refinements) {
  if (!sim::is_finite_volume(s.scheme)) throw ValidationError("scheme: study needs a finite-volume scheme");
  if (refinements < 1) throw ValidationError("refinements: must be at least 1");
  if (!s.jump()) throw ValidationError("initial.segments: study needs a two-segment datum");
  if (!detail::exact_reference(s))
    throw ValidationError("constraint: study needs a constant v_bar with y0 on the jump");
}

// Runs cells * 2^i for i < refinements, each in out_dir/cells_<n>, concurrently.
inline std::vector<StudyRow> convergence_study(const Scenario& s, int refinements, const fs::path& out_dir) {
  check_study(s, refinements);
  sim::ExactRiemann ex = *detail::exact_reference(s);
  std::vector<std::future<StudyRow>> jobs;
  for (int i = 0; i < refinements; ++i) {
    Scenario r = s;
    r.numerics.cells = s.numerics.cells << i;
    jobs.push_back(std::async(std::launch::async, [r, ex, out_dir] {
      fs::path dir = out_dir / ("cells_" + std::to_string(r.numerics.cells));
      fs::create_directories(dir);
      sim::FvOutput o = detail::run_fv(r);
      detail::write_profiles(dir, o.snapshots);
      sim::L1Error e = sim::l1_error(r.law, ex, o.field, o.x);
      StudyRow row;
      row.cells = r.numerics.cells;
      row.h = (r.x_max - r.x_min) / r.numerics.cells;
      row.l1_rho = e.rho;
      row.l1_z = e.z;
      return row;
    }));
  }
  std::vector<StudyRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  for (size_t i = 1; i < rows.size(); ++i) {
    auto order = [](double a, double b) { return a > 0.0 && b > 0.0 ? std::log2(a / b) : std::nan(""); };
    rows[i].order_rho = order(rows[i - 1].l1_rho, rows[i].l1_rho);
    rows[i].order_z = order(rows[i - 1].l1_z, rows[i].l1_z);
  }
  Csv c(out_dir / "study.csv", {"cells", "h", "l1_rho", "l1_z", "order_rho", "order_z"});
  for (const auto& r : rows) c.row(r.cells, r.h, r.l1_rho, r.l1_z, r.order_rho, r.order_z);
  return rows;
}

// Least-squares slope of log(err) against log(h).
inline double regression_order(const std::vector<StudyRow>& rows, bool density = true) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    double e = density ? r.l1_rho : r.l1_z;
    if (!(e > 0.0)) continue;
    double x = std::log(r.h), y = std::log(e);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace arz::scenario

#endif
