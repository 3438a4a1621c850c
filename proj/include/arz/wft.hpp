#ifndef ARZ_WFT_HPP
#define ARZ_WFT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arz/constrained.hpp"
#include "arz/core.hpp"
#include "arz/riemann.hpp"

// Front tracking for the fixed constraint rho v <= q at x = 0.
namespace arz::wft {

struct PiecewiseConstant {
  std::vector<double> breaks;  // increasing
  std::vector<State> states;   // breaks.size() + 1 values, states[0] left of breaks[0]
};

inline State value_at(const PiecewiseConstant& d, double x) {
  auto it = std::upper_bound(d.breaks.begin(), d.breaks.end(), x);
  return d.states[it - d.breaks.begin()];
}

// Staircase approximation of f on [a, b]: piece values are samples of f, so the
// total variation cannot grow; the sup distance is <= 1/nu at the sampled points.
template <class F>
PiecewiseConstant pc_approx(F f, double a, double b, int nu, int samples = 4096) {
  if (!(b > a) || nu <= 0 || samples < 2) throw DomainError("pc_approx: bad window or refinement");
  double eps = 1.0 / nu;
  auto far = [&](const State& s, const State& c) {
    return std::max(std::abs(s.rho - c.rho), std::abs(s.v - c.v)) > eps;
  };
  PiecewiseConstant out;
  State c = f(a);
  out.states.push_back(c);
  double hx = (b - a) / samples, prev = a;
  for (int j = 1; j <= samples; ++j) {
    double xj = j == samples ? b : a + j * hx;
    State s = f(xj);
    if (far(s, c)) {
      double lo = prev, hi = xj;
      for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (far(f(mid), c)) hi = mid; else lo = mid;
      }
      c = f(hi);
      out.breaks.push_back(hi);
      out.states.push_back(c);
      if (far(s, c)) {
        c = s;
        out.breaks.push_back(xj);
        out.states.push_back(c);
      }
    }
    prev = xj;
  }
  // end on f(b) so a monotone datum keeps its full range
  State fb = f(b);
  if (fb.rho != c.rho || fb.v != c.v) {
    double xb = b - 0.5 * hx;
    if (!out.breaks.empty() && xb <= out.breaks.back()) xb = 0.5 * (out.breaks.back() + b);
    out.breaks.push_back(xb);
    out.states.push_back(fb);
  }
  return out;
}

inline int fan_count(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("fan delta must lie in (0,1]");
  return static_cast<int>(std::floor(1.0 / delta + 1e-9));
}

// Splits a first-family rarefaction into N jumps, equally spaced in density, each
// moving at its Rankine-Hugoniot speed.
template <PressureLaw L>
std::vector<Wave> fan_split(const L& law, const State& left, const State& right, double delta) {
  double w = w_of(law, left);
  if (!same_value(w, w_of(law, right), kSameCurveTol) || !(left.rho > right.rho))
    throw DomainError("fan_split: states are not joined by a rarefaction");
  int n = fan_count(delta);
  std::vector<Wave> out;
  State a = left;
  for (int i = 1; i <= n; ++i) {
    State b = right;
    if (i < n) {
      double rho = left.rho + (right.rho - left.rho) * static_cast<double>(i) / n;
      b = {rho, w - law.p(rho)};
    }
    double s = shock_speed(a, b);
    out.push_back({WaveKind::Rarefaction, a, b, s, s});
    a = b;
  }
  return out;
}

struct Front {
  double x = 0.0;
  Wave wave;
  double birth_t = 0.0;
  int resplits = 0;  // fan splits at x = 0 after t = 0 in this lineage

  double speed() const { return wave.speed_lo; }
  double pos(double t) const { return birth_t == t ? x : x + speed() * (t - birth_t); }
};

enum class Row { ContactAtZero, ShockAtZero, RarefactionAtZero, PosPos, NegNeg, NegPos };

inline const char* row_name(Row r) {
  switch (r) {
    case Row::ContactAtZero: return "contact_at_0";
    case Row::ShockAtZero: return "shock_at_0";
    case Row::RarefactionAtZero: return "rarefaction_at_0";
    case Row::PosPos: return "pos_pos";
    case Row::NegNeg: return "neg_neg";
    case Row::NegPos: return "neg_pos";
  }
  return "?";
}

struct TotalVariation {
  double rho = 0.0;
  double v = 0.0;
  double w = 0.0;
};

struct LedgerEntry {
  double t = 0.0;
  double x = 0.0;
  Row row = Row::NegNeg;
  int delta_n = 0;
  double delta_tv_rho = 0.0;
  double delta_tv_v = 0.0;
  double delta_tv_w = 0.0;
  // |w^r - w^l| of an arriving contact, |v^r - v^l| of an arriving rarefaction
  double reference = 0.0;
  bool resplit_capped = false;
};

struct FrontState {
  double t = 0.0;
  std::vector<Front> fronts;
  std::vector<LedgerEntry> tv_ledger;
  State far_left;
  TotalVariation initial_tv;
  int initial_fronts = 0;
};

struct Params {
  InvariantDomain domain;
  double q = 0.0;
  double delta = 0.05;
};

struct DomainConstants {
  double k1 = 0.0;
  double k2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double lipschitz = 0.0;  // 2 / p'(rho_min)
};

template <PressureLaw L>
DomainConstants domain_constants(const L& law, const InvariantDomain& d) {
  auto [lo, hi] = domain_extremal_densities(law, d);
  DomainConstants c;
  c.k1 = lambda1(law, hi);
  c.k2 = lambda1(law, lo);
  if (!(c.k2 < 0.0)) throw DomainError("wft: lambda1(rho_min state) must be negative");
  c.c1 = d.v2 / (-c.k2);
  c.c2 = -c.k1 / d.v1;
  c.c3 = c.c1 * (1.0 + 1.0 / c.c2);
  c.lipschitz = 2.0 / law.dp(lo.rho);
  return c;
}

template <PressureLaw L>
TotalVariation total_variation(const L& law, const std::vector<Front>& fronts) {
  TotalVariation tv;
  for (const Front& f : fronts) {
    tv.rho += std::abs(f.wave.right.rho - f.wave.left.rho);
    tv.v += std::abs(f.wave.right.v - f.wave.left.v);
    tv.w += std::abs(w_of(law, f.wave.right) - w_of(law, f.wave.left));
  }
  return tv;
}

inline TotalVariation ledger_total_variation(const FrontState& s) {
  TotalVariation tv = s.initial_tv;
  for (const LedgerEntry& e : s.tv_ledger) {
    tv.rho += e.delta_tv_rho;
    tv.v += e.delta_tv_v;
    tv.w += e.delta_tv_w;
  }
  return tv;
}

inline State sample(const FrontState& s, double t, double x) {
  for (const Front& f : s.fronts)
    if (x < f.pos(t)) return f.wave.left;
  return s.fronts.empty() ? s.far_left : s.fronts.back().wave.right;
}

namespace detail {

inline bool same_state(const State& a, const State& b) {
  return same_value(a.rho, b.rho, 1e-12) && same_value(a.v, b.v, 1e-12);
}

// Drops roundoff-sized waves and re-links the remaining ones.
inline std::vector<Wave> clean(const WaveFan& fan) {
  std::vector<Wave> out;
  State cur = fan.left_state;
  for (Wave w : fan.waves) {
    if (same_state(w.left, w.right)) continue;
    w.left = cur;
    out.push_back(w);
    cur = w.right;
  }
  if (!out.empty()) out.back().right = fan.right_state;
  return out;
}

template <PressureLaw L>
void check_front(const L& law, const Front& f, const Params& p) {
  for (const State& s : {f.wave.left, f.wave.right})
    if (!domain_contains(law, p.domain, s, 1e-9)) throw DomainError("wft: state left the invariant domain");
  bool ok = f.wave.kind == WaveKind::Contact ? f.speed() > 0.0
            : f.wave.kind == WaveKind::NonclassicalShock ? f.speed() == 0.0 && f.x == 0.0
                                                          : f.speed() < 0.0;
  if (!ok) throw DomainError("wft: wave speed sign breaks the decreasing-curve regime");
}

// Fronts for the waves of a Riemann fan centred at (t, x).
template <PressureLaw L>
std::vector<Front> emit(const L& law, const WaveFan& fan, double t, double x, int resplits, bool split,
                        const Params& p, bool& capped) {
  std::vector<Front> out;
  for (const Wave& w : clean(fan)) {
    if (w.kind == WaveKind::Rarefaction) {
      bool at_origin_time = t == 0.0;
      if (split && (at_origin_time || resplits < 1)) {
        int lineage = at_origin_time ? resplits : resplits + 1;
        for (const Wave& piece : fan_split(law, w.left, w.right, p.delta)) out.push_back({x, piece, t, lineage});
        continue;
      }
      if (split) capped = true;
      double s = shock_speed(w.left, w.right);
      out.push_back({x, {WaveKind::Rarefaction, w.left, w.right, s, s}, t, resplits});
      continue;
    }
    out.push_back({x, w, t, resplits});
  }
  for (const Front& f : out) check_front(law, f, p);
  return out;
}

template <PressureLaw L>
WaveFan solve_at_zero(const L& law, const State& l, const State& r, double q) {
  return solve_rsq2(law, l, r, FixedConstraintSpec{q});
}

}  // namespace detail

template <PressureLaw L>
FrontState initialize(const L& law, const PiecewiseConstant& datum, const Params& p) {
  if (datum.states.size() != datum.breaks.size() + 1) throw DomainError("wft: malformed datum");
  for (size_t i = 1; i < datum.breaks.size(); ++i)
    if (!(datum.breaks[i] > datum.breaks[i - 1])) throw DomainError("wft: breaks must increase");
  if (!(p.q > 0.0)) throw DomainError("wft: q must be positive");
  domain_constants(law, p.domain);  // decreasing-curve gate
  if (!rs2_domain_invariant(law, p.domain, Cap{p.q, 0.0}))
    throw DomainError("wft: domain is not invariant for the constrained solver");
  for (const State& s : datum.states) {
    if (!(s.rho > 0.0)) throw VacuumError("wft: vacuum in the datum");
    if (!domain_contains(law, p.domain, s, 1e-12)) throw DomainError("wft: datum outside the invariant domain");
  }
  FrontState st;
  st.far_left = datum.states.front();
  bool capped = false;
  bool zero_done = false;
  auto solve_zero = [&] {
    State l = value_at(datum, -0.0), r = value_at(datum, 0.0);
    auto it = std::lower_bound(datum.breaks.begin(), datum.breaks.end(), 0.0);
    if (it != datum.breaks.end() && *it == 0.0) l = datum.states[it - datum.breaks.begin()];
    auto fr = detail::emit(law, detail::solve_at_zero(law, l, r, p.q), 0.0, 0.0, 0, true, p, capped);
    st.fronts.insert(st.fronts.end(), fr.begin(), fr.end());
    zero_done = true;
  };
  for (size_t i = 0; i < datum.breaks.size(); ++i) {
    double x = datum.breaks[i];
    if (!zero_done && x >= 0.0) solve_zero();
    if (x == 0.0) continue;
    auto fr = detail::emit(law, solve(law, datum.states[i], datum.states[i + 1]), 0.0, x, 0, true, p, capped);
    st.fronts.insert(st.fronts.end(), fr.begin(), fr.end());
  }
  if (!zero_done) solve_zero();
  st.initial_tv = total_variation(law, st.fronts);
  st.initial_fronts = static_cast<int>(st.fronts.size());
  return st;
}

enum class Site { Pair, Zero };

struct Event {
  double t = 0.0;
  double x = 0.0;
  Site site = Site::Pair;
  int index = 0;  // left front of a pair, or the front arriving at x = 0
};

inline std::optional<Event> next_event(const FrontState& s) {
  std::optional<Event> best;
  auto better = [&](const Event& e) {
    if (!best) return true;
    double tol = 1e-12 * std::max(1.0, std::abs(best->t));
    if (e.t < best->t - tol) return true;
    if (e.t > best->t + tol) return false;
    if (e.site != best->site) return e.site == Site::Zero;
    return e.x < best->x;
  };
  const auto& f = s.fronts;
  int n = static_cast<int>(f.size());
  for (int i = 0; i < n; ++i) {
    bool nc = f[i].wave.kind == WaveKind::NonclassicalShock;
    if (!nc) {
      double xi = f[i].pos(s.t), si = f[i].speed();
      if ((xi < 0.0 && si > 0.0) || (xi > 0.0 && si < 0.0)) {
        Event e{s.t - xi / si, 0.0, Site::Zero, i};
        if (better(e)) best = e;
      }
    }
    if (i + 1 < n && !nc && f[i + 1].wave.kind != WaveKind::NonclassicalShock) {
      double s1 = f[i].speed(), s2 = f[i + 1].speed();
      if (s1 > s2) {
        double gap = f[i + 1].pos(s.t) - f[i].pos(s.t);
        double te = s.t + std::max(gap, 0.0) / (s1 - s2);
        Event e{te, f[i].pos(te), Site::Pair, i};
        if (better(e)) best = e;
      }
    }
  }
  return best;
}

template <PressureLaw L>
FrontState resolve_event(const L& law, FrontState s, const Event& ev, const Params& p) {
  auto& f = s.fronts;
  int lo = ev.index, hi = ev.index;  // inclusive group
  LedgerEntry entry;
  entry.t = ev.t;
  double x = 0.0;
  bool at_zero = ev.site == Site::Zero;
  if (at_zero) {
    const Front& a = f[ev.index];
    bool from_left = a.speed() > 0.0;
    int nb = from_left ? ev.index + 1 : ev.index - 1;
    if (nb >= 0 && nb < static_cast<int>(f.size()) && f[nb].wave.kind == WaveKind::NonclassicalShock) {
      lo = std::min(lo, nb);
      hi = std::max(hi, nb);
    }
    switch (a.wave.kind) {
      case WaveKind::Contact:
        entry.row = Row::ContactAtZero;
        entry.reference = std::abs(w_of(law, a.wave.right) - w_of(law, a.wave.left));
        break;
      case WaveKind::Rarefaction:
        entry.row = Row::RarefactionAtZero;
        entry.reference = std::abs(a.wave.right.v - a.wave.left.v);
        break;
      default: entry.row = Row::ShockAtZero; break;
    }
  } else {
    hi = lo + 1;
    x = 0.5 * (f[lo].pos(ev.t) + f[hi].pos(ev.t));
    bool n1 = f[lo].speed() < 0.0, n2 = f[hi].speed() < 0.0;
    entry.row = n1 && n2 ? Row::NegNeg : (!n1 && !n2 ? Row::PosPos : Row::NegPos);
  }
  entry.x = x;
  std::vector<Front> before(f.begin() + lo, f.begin() + hi + 1);
  State l = before.front().wave.left, r = before.back().wave.right;
  int lineage = 0;
  for (const Front& b : before)
    if (b.wave.kind == WaveKind::Rarefaction) lineage = std::max(lineage, b.resplits);
  WaveFan fan = at_zero ? detail::solve_at_zero(law, l, r, p.q) : solve(law, l, r);
  bool capped = false;
  // only a rarefaction reaching x = 0 may open a new fan; other rows emit single fronts
  bool split = at_zero && entry.row == Row::RarefactionAtZero;
  std::vector<Front> after = detail::emit(law, fan, ev.t, x, lineage, split, p, capped);
  TotalVariation tb = total_variation(law, before), ta = total_variation(law, after);
  entry.delta_n = static_cast<int>(after.size()) - static_cast<int>(before.size());
  entry.delta_tv_rho = ta.rho - tb.rho;
  entry.delta_tv_v = ta.v - tb.v;
  entry.delta_tv_w = ta.w - tb.w;
  entry.resplit_capped = capped;
  f.erase(f.begin() + lo, f.begin() + hi + 1);
  f.insert(f.begin() + lo, after.begin(), after.end());
  s.t = ev.t;
  s.tv_ledger.push_back(entry);
  return s;
}

struct CountBounds {
  double waves = 0.0;
  double interactions = 0.0;
};

// k1, k2: numbers of initial discontinuities left and right of x = 0.
inline CountBounds count_bounds(int N, int k1, int k2) {
  double n = N, a = k1, b = k2;
  CountBounds c;
  c.waves = n + 2 + (n + 1) * (a + b) + 2 * a + n * (n + 1) * b;
  c.interactions = a + n * b + n * n * ((a + 1) * (a + 1) + 2 * b * b) + n * (a * a + b * b + (a + 1) * b) +
                   (a + n * n * b) * (2 * a + n * n * b + n * (a + 1));
  return c;
}

inline std::pair<int, int> jump_counts(const PiecewiseConstant& d) {
  int k1 = 0, k2 = 0;
  for (size_t i = 0; i < d.breaks.size(); ++i) {
    if (d.states[i].rho == d.states[i + 1].rho && d.states[i].v == d.states[i + 1].v) continue;
    if (d.breaks[i] < 0.0) ++k1;
    if (d.breaks[i] > 0.0) ++k2;
  }
  return {k1, k2};
}

struct TvSample {
  double t = 0.0;
  TotalVariation tv;
  int n_fronts = 0;
};

struct RunResult {
  FrontState state;
  std::vector<TvSample> tv_series;
  int events = 0;
  int waves_appeared = 0;  // initial fronts plus every positive change in the count
};

// Event loop to t_max; the TV series is sampled after every event and every sample_dt.
template <PressureLaw L>
RunResult run(const L& law, FrontState s, const Params& p, double t_max, double sample_dt = 0.0,
              long max_events = 10'000'000) {
  RunResult res;
  res.waves_appeared = s.initial_fronts;
  auto push = [&](double t) {
    res.tv_series.push_back({t, total_variation(law, s.fronts), static_cast<int>(s.fronts.size())});
  };
  push(s.t);
  double next_sample = sample_dt > 0.0 ? s.t + sample_dt : std::numeric_limits<double>::infinity();
  auto flush_samples = [&](double upto) {
    while (next_sample <= upto * (1.0 + 1e-14)) {
      push(next_sample);
      next_sample += sample_dt;
    }
  };
  while (true) {
    auto ev = next_event(s);
    if (!ev || ev->t > t_max) break;
    flush_samples(ev->t);
    s = resolve_event(law, std::move(s), *ev, p);
    ++res.events;
    res.waves_appeared += std::max(s.tv_ledger.back().delta_n, 0);
    push(s.t);
    if (res.events > max_events) throw std::runtime_error("wft: event limit exceeded");
  }
  flush_samples(t_max);
  s.t = t_max;
  res.state = std::move(s);
  return res;
}

struct EstimateReport {
  bool ok = true;
  std::vector<std::string> failures;
  int counts[6] = {0, 0, 0, 0, 0, 0};
  double max_ratio_contact_v = 0.0;  // delta TV_v / |w^r - w^l| for contacts at 0
  double max_ratio_rarefaction_w = 0.0;  // delta TV_w / |v^r - v^l| for rarefactions at 0
  int capped = 0;
};

// Table checks: the wave-count bound of every row and the rows whose TV bound is zero.
inline EstimateReport check_estimates(const std::vector<LedgerEntry>& ledger, const DomainConstants& c, int N,
                                      double tol = 1e-10) {
  (void)c;
  EstimateReport rep;
  auto fail = [&](const LedgerEntry& e, const std::string& what) {
    rep.ok = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "t=%.17g x=%.17g %s: ", e.t, e.x, row_name(e.row));
    rep.failures.push_back(buf + what);
  };
  for (const LedgerEntry& e : ledger) {
    rep.counts[static_cast<int>(e.row)]++;
    if (e.resplit_capped) rep.capped++;
    switch (e.row) {
      case Row::ContactAtZero:
        if (e.delta_n > 2) fail(e, "delta_n > 2");
        if (e.delta_tv_w > tol) fail(e, "TV_w increased");
        if (e.reference > 0.0) rep.max_ratio_contact_v = std::max(rep.max_ratio_contact_v, e.delta_tv_v / e.reference);
        break;
      case Row::ShockAtZero:
        if (e.delta_n > 1) fail(e, "delta_n > 1");
        if (e.delta_tv_v > tol) fail(e, "TV_v increased");
        if (e.delta_tv_w > tol) fail(e, "TV_w increased");
        if (e.delta_tv_rho > tol) fail(e, "TV_rho increased");
        break;
      case Row::RarefactionAtZero:
        if (e.delta_n > N + 1) fail(e, "delta_n > N+1");
        if (e.delta_tv_v > tol) fail(e, "TV_v increased");
        if (e.reference > 0.0)
          rep.max_ratio_rarefaction_w = std::max(rep.max_ratio_rarefaction_w, e.delta_tv_w / e.reference);
        break;
      case Row::PosPos: fail(e, "two positive-speed waves interacted"); break;
      case Row::NegNeg:
        if (e.delta_n > 0) fail(e, "delta_n > 0");
        if (e.delta_tv_v > tol) fail(e, "TV_v increased");
        if (e.delta_tv_w > tol) fail(e, "TV_w increased");
        break;
      case Row::NegPos:
        if (e.delta_n != 0) fail(e, "delta_n != 0");
        if (e.delta_tv_v > tol) fail(e, "TV_v increased");
        if (std::abs(e.delta_tv_w) > tol) fail(e, "TV_w changed");
        break;
    }
  }
  return rep;
}

}  // namespace arz::wft

#endif
