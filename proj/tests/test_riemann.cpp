#include <doctest.h>

#include <cmath>

#include "arz/riemann.hpp"
#include "oracles.hpp"

using namespace arz;

namespace {

State random_state(std::mt19937_64& g, const PowerLaw& law, const InvariantDomain& d) {
  for (;;) {
    State s{oracle::uniform(g, 0.01, 12), oracle::uniform(g, d.v1, d.v2)};
    if (domain_contains(law, d, s, 0.0)) return s;
  }
}

}  // namespace

TEST_CASE("middle state") {
  PowerLaw law(1);
  State m = middle_state(law, State{7, 3}, State{6, 4});
  CHECK(m.rho == 6);
  CHECK(m.v == 4);
  m = middle_state(law, State{2, 5}, State{2, 5});
  CHECK(m.rho == 2);
  m = middle_state(law, State{9, 1}, State{2, 8});
  CHECK(m.rho == 2);
  CHECK(m.v == 8);
  CHECK_THROWS_AS(middle_state(law, State{1, 1}, State{1, 5}), VacuumError);
  PowerLaw l2(2);
  State l{2, 1}, r{1, 2};
  m = middle_state(l2, l, r);
  CHECK(w_of(l2, m) == doctest::Approx(w_of(l2, l)).epsilon(1e-12));
  CHECK(m.v == r.v);
}

TEST_CASE("shock speed") {
  double s52 = std::sqrt(52.0);
  State hat{(8.5 + s52) / 2, (11.5 - s52) / 2};
  double s = shock_speed(State{7, 3}, hat);
  CHECK(std::abs(s - (-4.85)) < 1e-2);
  CHECK_THROWS_AS(shock_speed(State{1, 2}, State{1, 3}), DegenerateError);

  auto g = oracle::rng(3);
  for (double gamma : {1.0, 2.0}) {
    PowerLaw law(gamma);
    for (int i = 0; i < 200; ++i) {
      State a{oracle::uniform(g, 0.5, 3), oracle::uniform(g, 0.5, 3)};
      double rb = a.rho + oracle::uniform(g, 0.1, 1);
      State b{rb, lax1(law, rb, a)};
      double lam = shock_speed(a, b);
      CHECK(std::abs(b.rho * b.v - a.rho * a.v - lam * (b.rho - a.rho)) < 1e-10);
    }
  }
}

TEST_CASE("solve: examples") {
  PowerLaw law(1);
  WaveFan fan = solve(law, State{9, 1}, State{2, 8});
  REQUIRE(fan.waves.size() == 1);
  CHECK(fan.waves[0].kind == WaveKind::Rarefaction);
  CHECK(fan.waves[0].speed_lo == -8);
  CHECK(fan.waves[0].speed_hi == 6);
  CHECK(solve(law, State{3, 2}, State{3, 2}).waves.empty());

  double eps = 1e-3;
  State l{2, 8}, r{2, 8 - eps};
  fan = solve(law, l, r);
  REQUIRE(fan.waves.size() == 2);
  CHECK(fan.waves[0].kind == WaveKind::Shock);
  CHECK(fan.waves[1].kind == WaveKind::Contact);
  // intersection of w = 10 with v = 8 - eps by bisection
  double rho_m = oracle::bisect([&](double rho) { return 8 - eps + rho - 10; }, 0, 10);
  double rh = (rho_m * (8 - eps) - 2 * 8) / (rho_m - 2);
  CHECK(fan.waves[0].speed_lo == doctest::Approx(rh).epsilon(1e-10));
}

TEST_CASE("sample") {
  PowerLaw law(1);
  WaveFan fan = solve(law, State{9, 1}, State{2, 8});
  CHECK(sample(law, fan, -100).rho == 9);
  State s = sample(law, fan, 0.0);
  double rho0 = oracle::bisect([](double rho) { return 10 - 2 * rho; }, 0, 10);
  CHECK(s.rho == doctest::Approx(rho0).epsilon(1e-12));
  CHECK(s.v == doctest::Approx(5).epsilon(1e-12));
  for (double xi = -8; xi <= 6; xi += 0.25) CHECK(std::abs(w_of(law, sample(law, fan, xi)) - 10) < 1e-10);
  // at a discontinuity speed the right state is returned
  WaveFan sh = solve(law, State{2, 8}, State{5, 5});
  State at = sample(law, sh, sh.waves[0].speed_lo);
  CHECK(at.rho == 5);
}

TEST_CASE("solve: structural invariants") {
  auto g = oracle::rng(4);
  InvariantDomain d{0.5, 4, 5, 12};
  for (double gamma : {1.0, 1.5, 2.0}) {
    PowerLaw law(gamma);
    for (int i = 0; i < 2000; ++i) {
      State l = random_state(g, law, d), r = random_state(g, law, d);
      WaveFan fan = solve(law, l, r);
      State m = middle_state(law, l, r);
      for (size_t k = 0; k < fan.waves.size(); ++k) {
        const Wave& w = fan.waves[k];
        if (k + 1 < fan.waves.size()) {
          REQUIRE(w.speed_hi <= fan.waves[k + 1].speed_lo + 1e-12);
          REQUIRE(w.right.rho == fan.waves[k + 1].left.rho);
        }
        switch (w.kind) {
          case WaveKind::Shock:
            REQUIRE(w.left.rho < w.right.rho);
            REQUIRE(std::abs(w_of(law, w.left) - w_of(law, w.right)) < 1e-10);
            REQUIRE(lambda1(law, w.right) <= w.speed_lo + 1e-10);
            REQUIRE(w.speed_lo <= lambda1(law, w.left) + 1e-10);
            REQUIRE(l.rho < m.rho);
            break;
          case WaveKind::Rarefaction:
            REQUIRE(w.speed_lo <= w.speed_hi);
            REQUIRE(std::abs(w_of(law, w.left) - w_of(law, w.right)) < 1e-10);
            REQUIRE(l.rho >= m.rho);
            break;
          case WaveKind::Contact:
            REQUIRE(std::abs(w.left.v - w.right.v) < 1e-10);
            REQUIRE(w.speed_lo == w.right.v);
            break;
          default:
            FAIL("unexpected wave kind");
        }
      }
      if (!fan.waves.empty()) {
        REQUIRE(fan.waves.front().left.rho == l.rho);
        REQUIRE(fan.waves.back().right.rho == r.rho);
      }
    }
  }
}

TEST_CASE("interface state matches sampling at zero") {
  PowerLaw law(1);
  State s = interface_state(law, State{7, 3}, State{6, 4});
  CHECK(s.rho == 6);
  CHECK(s.v == 4);
  s = interface_state(law, State{2, 3}, State{2, 3});
  CHECK(s.rho == 2);

  auto g = oracle::rng(5);
  InvariantDomain d{0.2, 6, 7, 14};
  for (double gamma : {1.0, 2.0}) {
    PowerLaw l2(gamma);
    for (int i = 0; i < 10000; ++i) {
      State a = random_state(g, l2, d), b = random_state(g, l2, d);
      State x = interface_state(l2, a, b);
      State y = sample(l2, solve(l2, a, b), 0.0);
      REQUIRE(x.rho == doctest::Approx(y.rho).epsilon(1e-12));
      REQUIRE(x.v == doctest::Approx(y.v).epsilon(1e-12));
    }
  }
}

TEST_CASE("near-equal invariants are snapped onto the left curve") {
  PowerLaw law(1);
  State l{4, 2};
  State r{2, 4 + 1e-12};
  WaveFan fan = solve(law, l, r);
  REQUIRE(fan.waves.size() == 1);
  CHECK(fan.waves[0].kind == WaveKind::Rarefaction);
}
