#include <doctest.h>

#include <cmath>

#include "arz/wft.hpp"
#include "oracles.hpp"
#include "wft_random.hpp"

using namespace arz;
using namespace arz::wft;

namespace {

const InvariantDomain kDomain{1.0, 2.0, 5.0, 8.0};

Params params(double q = 9.0, double delta = 0.05) { return {kDomain, q, delta}; }

double tv_samples(const std::vector<double>& v) {
  double s = 0;
  for (size_t i = 1; i < v.size(); ++i) s += std::abs(v[i] - v[i - 1]);
  return s;
}

Front manual(double x, double speed, WaveKind kind) {
  return {x, {kind, State{1, 1}, State{1, 1}, speed, speed}, 0.0, 0};
}

// First-order scheme with the constrained Riemann solver at the interface x = 0.
std::vector<State> constrained_godunov(const PowerLaw& law, const PiecewiseConstant& d, double q, double a, int n,
                                       double t_end) {
  double h = 2 * a / n;
  std::vector<ConservedState> u(n);
  for (int j = 0; j < n; ++j) {
    // cell averages of the datum by fine midpoint sums
    ConservedState s;
    for (int i = 0; i < 64; ++i) {
      State st = value_at(d, -a + (j + (i + 0.5) / 64) * h);
      s.rho += st.rho / 64;
      s.z += st.rho * w_of(law, st) / 64;
    }
    u[j] = s;
  }
  double t = 0;
  while (t < t_end) {
    double lam = 0;
    for (auto& c : u) {
      State s = to_primitive(law, c);
      lam = std::max({lam, std::abs(lambda1(law, s)), std::abs(s.v)});
    }
    double k = std::min(0.5 * h / lam, t_end - t);
    std::vector<Flux> fl(n + 1), fr(n + 1);
    for (int i = 0; i <= n; ++i) {
      State l = to_primitive(law, u[std::max(i - 1, 0)]), r = to_primitive(law, u[std::min(i, n - 1)]);
      if (i == n / 2) {
        WaveFan fan = solve_rsq2(law, l, r, FixedConstraintSpec{q});
        fl[i] = flux(law, arz::sample(law, fan, -1e-300));
        fr[i] = flux(law, arz::sample(law, fan, 0.0));
      } else {
        fl[i] = fr[i] = flux(law, interface_state(law, l, r));
      }
    }
    for (int j = 0; j < n; ++j) {
      u[j].rho -= k / h * (fl[j + 1].rho - fr[j].rho);
      u[j].z -= k / h * (fl[j + 1].z - fr[j].z);
    }
    t += k;
  }
  std::vector<State> out;
  for (auto& c : u) out.push_back(to_primitive(law, c));
  return out;
}

}  // namespace

TEST_CASE("pc_approx") {
  PiecewiseConstant step{{-0.3, 0.4}, {{5, 1.5}, {4, 1.2}, {6, 1.8}}};
  auto same = pc_approx([&](double x) { return value_at(step, x); }, -1, 1, 10);
  REQUIRE(same.breaks.size() == 2);
  CHECK(std::abs(same.breaks[0] + 0.3) < 1e-12);
  CHECK(std::abs(same.breaks[1] - 0.4) < 1e-12);
  for (int i = 0; i < 3; ++i) {
    CHECK(same.states[i].rho == step.states[i].rho);
    CHECK(same.states[i].v == step.states[i].v);
  }

  auto ramp = pc_approx([](double x) { return State{2 + x, 1.5}; }, 0, 1, 20);
  std::vector<double> rho;
  for (auto& s : ramp.states) rho.push_back(s.rho);
  CHECK(tv_samples(rho) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ramp.states.size() > 10);

  auto g = oracle::rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    double a1 = oracle::uniform(g, 0.1, 1), f1 = oracle::uniform(g, 1, 8), jump = oracle::uniform(g, -0.5, 0.5);
    double xj = oracle::uniform(g, -0.9, 0.9);
    auto f = [&](double x) {
      return State{3 + a1 * std::sin(f1 * x) + (x > xj ? jump : 0.0), 1.5 + 0.3 * std::cos(2 * f1 * x)};
    };
    int nu = 5 + trial % 20;
    auto pc = pc_approx(f, -1, 1, nu);
    std::vector<double> r, v, fr, fv;
    for (auto& s : pc.states) {
      r.push_back(s.rho);
      v.push_back(s.v);
    }
    for (int i = 0; i <= 20000; ++i) {
      State s = f(-1 + i * 1e-4);
      fr.push_back(s.rho);
      fv.push_back(s.v);
      State a = value_at(pc, -1 + i * 1e-4);
      if (std::abs(-1 + i * 1e-4 - xj) > 1e-3) {
        CHECK(std::abs(a.rho - s.rho) <= 1.0 / nu + 1e-3);
        CHECK(std::abs(a.v - s.v) <= 1.0 / nu + 1e-3);
      }
    }
    CHECK(tv_samples(r) <= tv_samples(fr) + 1e-12);
    CHECK(tv_samples(v) <= tv_samples(fv) + 1e-12);
  }
}

TEST_CASE("fan split") {
  CHECK(fan_count(0.3) == 3);
  CHECK(fan_count(0.05) == 20);
  CHECK(fan_count(1.0) == 1);
  for (double g : {1.0, 2.0}) {
    PowerLaw law(g);
    State l{6, 1.2};
    double w = w_of(law, l);
    State r{law.p_inv(w - 1.9), 1.9};
    auto fan = fan_split(law, l, r, 0.3);
    REQUIRE(fan.size() == 3);
    double tr = 0, tv = 0;
    for (size_t i = 0; i < fan.size(); ++i) {
      const Wave& x = fan[i];
      tr += std::abs(x.right.rho - x.left.rho);
      tv += std::abs(x.right.v - x.left.v);
      CHECK(std::abs(w_of(law, x.right) - w) < 1e-12);
      CHECK(x.right.rho <= x.left.rho);
      CHECK(x.right.v >= x.left.v);
      double rh = (x.right.rho * x.right.v - x.left.rho * x.left.v) / (x.right.rho - x.left.rho);
      CHECK(x.speed_lo == doctest::Approx(rh).epsilon(1e-14));
      if (i > 0) CHECK(x.speed_lo > fan[i - 1].speed_lo);
    }
    CHECK(fan.front().left.rho == l.rho);
    CHECK(fan.back().right.rho == r.rho);
    CHECK(std::abs(tr - (l.rho - r.rho)) < 1e-12);
    CHECK(std::abs(tv - (r.v - l.v)) < 1e-12);
    CHECK_THROWS_AS(fan_split(law, r, l, 0.3), DomainError);
    CHECK_THROWS_AS(fan_split(law, l, State{5, 1.2}, 0.3), DomainError);
  }
}

TEST_CASE("domain constants") {
  PowerLaw law(1);
  auto c = domain_constants(law, kDomain);
  // p = rho: lambda1 = v - rho, rho_min = w1 - v2, rho_max = w2 - v1
  double k1 = kDomain.v1 - (kDomain.w2 - kDomain.v1), k2 = kDomain.v2 - (kDomain.w1 - kDomain.v2);
  CHECK(c.k1 == doctest::Approx(k1));
  CHECK(c.k2 == doctest::Approx(k2));
  CHECK(c.c1 == doctest::Approx(kDomain.v2 / -k2));
  CHECK(c.c2 == doctest::Approx(-k1 / kDomain.v1));
  CHECK(c.c3 == doctest::Approx(c.c1 * (1 + 1 / c.c2)));
  CHECK(c.lipschitz == doctest::Approx(2.0));
  CHECK((c.c1 > 0 && c.c2 > 0 && c.c3 > 0));
  // lambda1(rho_min state) >= 0 is refused
  CHECK_THROWS_AS(domain_constants(law, InvariantDomain{1, 2, 3.5, 8}), DomainError);
}

TEST_CASE("initialize") {
  PowerLaw law(1);
  PiecewiseConstant below{{}, {{5, 1.5}}};
  CHECK(initialize(law, below, params()).fronts.empty());

  // constant datum above the cap: the constraint alone creates waves
  PiecewiseConstant above{{}, {{5, 2}}};
  CHECK(initialize(law, above, params()).fronts.size() == 3);

  State l{5, 2}, r{4, 2};
  PiecewiseConstant jump{{0.0}, {l, r}};
  auto st = initialize(law, jump, params());
  WaveFan fan = solve_rsq2(law, l, r, FixedConstraintSpec{9});
  REQUIRE(fan.waves.size() == st.fronts.size());
  bool has_nc = false;
  for (size_t i = 0; i < fan.waves.size(); ++i) {
    CHECK(st.fronts[i].wave.kind == fan.waves[i].kind);
    CHECK(st.fronts[i].wave.right.rho == doctest::Approx(fan.waves[i].right.rho));
    CHECK(st.fronts[i].x == 0.0);
    has_nc |= fan.waves[i].kind == WaveKind::NonclassicalShock;
  }
  CHECK(has_nc);
  // hat point: rho (w_l - rho) = q on the congested side
  double wl = 7;
  CHECK(st.fronts[1].wave.left.rho == doctest::Approx((wl + std::sqrt(wl * wl - 36)) / 2).epsilon(1e-12));
  CHECK(st.fronts[1].wave.right.rho == doctest::Approx(9 / 2.0).epsilon(1e-14));

  for (unsigned long seed = 1; seed <= 20; ++seed) {
    auto sc = wft_random::make(seed);
    auto s0 = initialize(sc.law, sc.datum, sc.params);
    auto [k1, k2] = jump_counts(sc.datum);
    CHECK(s0.fronts.size() <= count_bounds(fan_count(sc.params.delta), k1, k2).waves);
    for (size_t i = 1; i < s0.fronts.size(); ++i) {
      CHECK(s0.fronts[i].x >= s0.fronts[i - 1].x);
      CHECK(s0.fronts[i].wave.left.rho == s0.fronts[i - 1].wave.right.rho);
    }
  }

  CHECK_THROWS_AS(initialize(law, PiecewiseConstant{{}, {{1, 1.5}}}, params()), DomainError);
  CHECK_THROWS_AS(initialize(law, below, params(5)), DomainError);
}

TEST_CASE("next event") {
  FrontState s;
  s.fronts = {manual(0.2, 1.5, WaveKind::Contact), manual(0.6, 1.5, WaveKind::Contact)};
  CHECK_FALSE(next_event(s));

  s.fronts = {manual(1.0, -1.0, WaveKind::Shock)};
  auto e = next_event(s);
  REQUIRE(e);
  CHECK(e->t == 1.0);
  CHECK(e->site == Site::Zero);

  auto g = oracle::rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    FrontState r;
    r.t = oracle::uniform(g, 0, 1);
    int n = 2 + trial % 12;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(oracle::uniform(g, -2, 2));
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      double sp = oracle::uniform(g, -3, 3);
      Front f = manual(x - sp * r.t, sp, sp > 0 ? WaveKind::Contact : WaveKind::Shock);
      r.fronts.push_back(f);
    }
    double best = 1e300;
    for (int i = 0; i < n; ++i) {
      double xi = r.fronts[i].pos(r.t), si = r.fronts[i].speed();
      if (xi * si < 0) best = std::min(best, r.t - xi / si);
      for (int j = i + 1; j < n; ++j) {
        double sj = r.fronts[j].speed();
        if (si > sj) best = std::min(best, r.t + (r.fronts[j].pos(r.t) - xi) / (si - sj));
      }
    }
    auto ev = next_event(r);
    REQUIRE(bool(ev) == (best < 1e300));
    if (ev) CHECK(ev->t == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("resolve: two first-family waves merge") {
  PowerLaw law(1);
  State a{4, 2}, b{4.5, 1.5}, c{5, 1};
  auto st = initialize(law, PiecewiseConstant{{-0.5, -0.2}, {a, b, c}}, params());
  REQUIRE(st.fronts.size() == 2);
  auto ev = next_event(st);
  REQUIRE(ev);
  CHECK(ev->site == Site::Pair);
  CHECK(ev->t == doctest::Approx(0.3).epsilon(1e-12));
  st = resolve_event(law, st, *ev, params());
  REQUIRE(st.fronts.size() == 1);
  CHECK(st.tv_ledger.back().row == Row::NegNeg);
  CHECK(st.tv_ledger.back().delta_n == -1);
  CHECK(st.fronts[0].speed() == doctest::Approx((c.rho * c.v - a.rho * a.v) / (c.rho - a.rho)).epsilon(1e-12));
  CHECK(st.fronts[0].x == doctest::Approx(-0.5 - 2.5 * 0.3).epsilon(1e-12));
}

TEST_CASE("resolve: contact reaching the constraint") {
  PowerLaw law(1);
  State l{6, 1.8}, r{4, 1.8};
  REQUIRE(l.rho * l.v > 9);
  auto st = initialize(law, PiecewiseConstant{{-0.5}, {l, r}}, params());
  REQUIRE(st.fronts.size() == 1);
  auto ev = next_event(st);
  REQUIRE(ev);
  CHECK(ev->t == doctest::Approx(0.5 / 1.8).epsilon(1e-14));
  st = resolve_event(law, st, *ev, params());
  const auto& e = st.tv_ledger.back();
  CHECK(e.row == Row::ContactAtZero);
  CHECK(e.delta_n == 2);
  REQUIRE(st.fronts.size() == 3);
  CHECK(st.fronts[0].wave.kind == WaveKind::Shock);
  CHECK(st.fronts[1].wave.kind == WaveKind::NonclassicalShock);
  CHECK(st.fronts[2].wave.kind == WaveKind::Contact);
  double wl = w_of(law, l), rho_hat = (wl + std::sqrt(wl * wl - 36)) / 2;
  CHECK(st.fronts[1].wave.left.rho == doctest::Approx(rho_hat).epsilon(1e-12));
  CHECK(st.fronts[1].wave.right.rho == doctest::Approx(9 / 1.8).epsilon(1e-14));
  CHECK(std::abs(e.delta_tv_w) < 1e-12);
  double v_hat = wl - rho_hat;
  CHECK(e.delta_tv_v == doctest::Approx(2 * (l.v - v_hat)).epsilon(1e-12));
}

TEST_CASE("resolve: contact crosses a first-family shock") {
  PowerLaw law(1);
  State a{4, 1.5}, b{5, 1.5}, c{5.3, 1.2};
  auto st = initialize(law, PiecewiseConstant{{-0.9, -0.5}, {a, b, c}}, params());
  REQUIRE(st.fronts.size() == 2);
  auto ev = next_event(st);
  REQUIRE(ev);
  st = resolve_event(law, st, *ev, params());
  const auto& e = st.tv_ledger.back();
  CHECK(e.row == Row::NegPos);
  CHECK(e.delta_n == 0);
  CHECK(e.delta_tv_v <= 1e-12);
  CHECK(std::abs(e.delta_tv_w) < 1e-12);
  REQUIRE(st.fronts.size() == 2);
  // the middle state carries w of the left state and v of the right one
  CHECK(st.fronts[0].wave.right.rho == doctest::Approx(w_of(law, a) - c.v).epsilon(1e-12));
  CHECK(st.fronts[0].wave.right.v == c.v);
}

TEST_CASE("run: no events") {
  PowerLaw law(1);
  State a{4, 1.5}, b{5, 1.5};
  auto st = initialize(law, PiecewiseConstant{{0.5}, {a, b}}, params());
  auto res = run(law, st, params(), 1.0, 0.25);
  CHECK(res.events == 0);
  REQUIRE(res.state.fronts.size() == 1);
  CHECK(res.state.fronts[0].pos(1.0) == doctest::Approx(2.0));
  CHECK(res.tv_series.size() == 5);
  for (auto& s : res.tv_series) CHECK(s.tv.rho == doctest::Approx(1.0));
  CHECK(wft::sample(res.state, 1.0, 1.9).rho == 4);
  CHECK(wft::sample(res.state, 1.0, 2.1).rho == 5);
}

TEST_CASE("run: random scenarios respect the interaction tables") {
  int zero_events = 0, total_events = 0;
  for (unsigned long seed = 1; seed <= 30; ++seed) {
    CAPTURE(seed);
    auto sc = wft_random::make(seed);
    auto st = initialize(sc.law, sc.datum, sc.params);
    auto res = run(sc.law, st, sc.params, 3.0, 0.1);
    int N = fan_count(sc.params.delta);
    auto [k1, k2] = jump_counts(sc.datum);
    auto bounds = count_bounds(N, k1, k2);
    CHECK(res.events <= bounds.interactions);
    CHECK(res.waves_appeared <= bounds.waves);
    auto rep = check_estimates(res.state.tv_ledger, domain_constants(sc.law, sc.params.domain), N);
    CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures.front()));
    auto rec = total_variation(sc.law, res.state.fronts);
    auto led = ledger_total_variation(res.state);
    CHECK(std::abs(rec.rho - led.rho) < 1e-10);
    CHECK(std::abs(rec.v - led.v) < 1e-10);
    CHECK(std::abs(rec.w - led.w) < 1e-10);
    for (auto& e : res.state.tv_ledger)
      if (e.row == Row::NegNeg || e.row == Row::NegPos) CHECK(e.delta_tv_w <= 1e-10);
    // adjacency and ordering at the end of the run
    for (size_t i = 1; i < res.state.fronts.size(); ++i) {
      CHECK(res.state.fronts[i].wave.left.rho == res.state.fronts[i - 1].wave.right.rho);
      CHECK(res.state.fronts[i].pos(3.0) >= res.state.fronts[i - 1].pos(3.0) - 1e-12);
    }
    // empirical constant of the TV bound is finite
    double g0 = res.tv_series.front().tv.v + res.tv_series.front().tv.w, worst = 0;
    for (auto& s : res.tv_series) worst = std::max(worst, s.tv.v);
    if (g0 > 0) CHECK(std::isfinite(worst / g0));
    total_events += res.events;
    for (auto& e : res.state.tv_ledger) zero_events += e.row <= Row::RarefactionAtZero;
  }
  CHECK(zero_events > 0);
  CHECK(total_events > zero_events);
}

TEST_CASE("front tracking agrees with a constrained first-order scheme") {
  PowerLaw law(1);
  PiecewiseConstant d{{-0.4, 0.3}, {{4.5, 1.8}, {6, 1.8}, {5.2, 1.1}}};
  Params p = params(9.0, 0.02);
  double t_end = 0.4, a = 3.0;
  auto res = run(law, initialize(law, d, p), p, t_end);
  CHECK(res.events > 0);
  std::vector<double> err;
  for (int n : {200, 800, 3200}) {
    auto cells = constrained_godunov(law, d, 9.0, a, n, t_end);
    double h = 2 * a / n, e = 0;
    for (int j = 0; j < n; ++j) {
      double x = -a + (j + 0.5) * h;
      e += std::abs(cells[j].rho - wft::sample(res.state, t_end, x).rho) * h;
    }
    err.push_back(e);
  }
  // contacts dominate: first-order smearing gives the sqrt(h) rate
  CHECK(err[0] / err[1] > 1.6);
  CHECK(err[1] / err[2] > 1.6);
  CHECK(err[2] < 0.15);
}
