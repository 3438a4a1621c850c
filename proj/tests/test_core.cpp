#include <doctest.h>

#include <cmath>

#include "arz/core.hpp"
#include "oracles.hpp"

using namespace arz;

TEST_CASE("pressure values") {
  CHECK(PowerLaw(1).p(7) == 7);
  CHECK(PowerLaw(2).p(0) == 0);
  CHECK(PowerLaw(1.5).p(4) == doctest::Approx(std::exp(1.5 * std::log(4.0))).epsilon(1e-14));
  CHECK(PowerLaw(1.5).p(4) == doctest::Approx(8).epsilon(1e-14));
  CHECK_THROWS_AS(PowerLaw(1).p(-1), DomainError);
  CHECK_THROWS_AS(PowerLaw(0.5), DomainError);
}

TEST_CASE("pressure derivatives") {
  CHECK(PowerLaw(1).dp(2.25) == 1);
  CHECK(PowerLaw(2).dp(0) == 0);
  CHECK(PowerLaw(1).dp(0) == 1);
  PowerLaw law(3);
  double fd = oracle::central_diff([&](double r) { return law.p(r); }, 2.0, 1e-6);
  CHECK(std::abs(fd - 12.0) < 1e-5);
  CHECK(law.dp(2) == doctest::Approx(12));
  double fdd = oracle::central_diff([&](double r) { return law.dp(r); }, 2.0, 1e-6);
  CHECK(std::abs(fdd - law.ddp(2)) < 1e-5);
}

TEST_CASE("phi and its inverse") {
  CHECK(PowerLaw(1).phi_inv(6 - 1.5) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(PowerLaw(2.5).phi(0) == 0);
  CHECK(PowerLaw(1).phi(5) == 10);
  CHECK(PowerLaw(1).phi_inv(10) == 5);
  CHECK_THROWS_AS(PowerLaw(1).phi_inv(-1), DomainError);
  for (double g : {1.0, 1.5, 2.0, 3.0}) {
    PowerLaw law(g);
    for (double r : {0.1, 1.0, 3.7}) {
      CHECK(law.phi(r) == doctest::Approx(law.p(r) + r * law.dp(r)).epsilon(1e-13));
      CHECK(law.phi_inv(law.phi(r)) == doctest::Approx(r).epsilon(1e-13));
    }
  }
}

TEST_CASE("conversions") {
  PowerLaw law(1);
  CHECK(to_conserved(law, State{7, 3}).z == 70);
  CHECK(to_conserved(law, State{1, 0}).z == 1);
  CHECK_THROWS_AS(to_primitive(law, ConservedState{0, 1}), VacuumError);
  auto g = oracle::rng(1);
  for (int i = 0; i < 10000; ++i) {
    PowerLaw l(oracle::uniform(g, 1, 3));
    State s{oracle::uniform(g, 0.01, 10), oracle::uniform(g, 0, 10)};
    State b = to_primitive(l, to_conserved(l, s));
    REQUIRE(std::abs(b.rho - s.rho) <= 1e-12 * s.rho);
    REQUIRE(std::abs(b.v - s.v) <= 1e-12 * std::max(1.0, s.rho * l.p(s.rho)));
  }
}

TEST_CASE("eigenvalues and invariants") {
  PowerLaw law(1);
  CHECK(lambda1(law, State{6, 4}) == -2);
  CHECK(lambda1(law, State{0, 5}) == 5);
  CHECK(lambda2(State{0, 5}) == 5);
  CHECK(lambda1(law, State{9, 1}) == -8);
  auto ri = riemann_invariants(law, State{7, 3});
  CHECK(ri.v == 3);
  CHECK(ri.w == 10);
  CHECK(riemann_invariants(PowerLaw(2), State{0, 4}).w == 4);
  PowerLaw l2(2);
  double prev = -1;
  for (double r = 0.1; r < 5; r += 0.1) {
    double w = w_of(l2, State{r, 1.0});
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("lax curves") {
  PowerLaw law(1);
  CHECK(lax1(law, 6, State{7, 3}) == 4);
  CHECK(lax1(law, 7, State{7, 3}) == 3);
  CHECK(lax2(2.0, State{7, 3}) == 3);
  for (double g : {1.0, 2.0, 2.5}) {
    PowerLaw l(g);
    State anchor{2.0, 3.0};
    auto q = [&](double r) { return r * lax1(l, r, anchor); };
    for (double r1 : {0.5, 1.0, 1.5}) {
      double slope = oracle::central_diff(q, r1, 1e-6);
      CHECK(std::abs(slope - lambda1(l, State{r1, lax1(l, r1, anchor)})) < 1e-6);
      // strict concavity
      double e = 1e-3;
      CHECK(q(r1 + e) - 2 * q(r1) + q(r1 - e) < 0);
    }
  }
}

TEST_CASE("domain membership") {
  PowerLaw law(1);
  InvariantDomain d{1, 4, 3, 10};
  CHECK(domain_contains(law, d, State{6, 4}));
  CHECK(domain_contains(law, d, State{3, 1}));
  CHECK_FALSE(domain_contains(law, d, State{0.1, 5}));
  CHECK_FALSE(domain_contains(law, d, State{6, 4 + 1e-9}));
  CHECK(domain_contains(law, d, State{6, 4 + 1e-11}));
}

TEST_CASE("extremal densities") {
  PowerLaw law(1);
  InvariantDomain d{1, 4, 6, 10};
  auto [lo, hi] = domain_extremal_densities(law, d);
  CHECK(lo.rho == 2);
  CHECK(lo.v == 4);
  CHECK(hi.rho == 9);
  CHECK(hi.v == 1);
  CHECK_THROWS_AS(domain_extremal_densities(law, InvariantDomain{1, 4, 3.5, 10}), VacuumError);
  CHECK_THROWS_AS(validate(InvariantDomain{2, 1, 3, 10}), DomainError);

  auto g = oracle::rng(2);
  PowerLaw l2(2);
  InvariantDomain d2{1, 2, 5, 9};
  auto [lo2, hi2] = domain_extremal_densities(l2, d2);
  bool decreasing = lambda1(l2, lo2) < 0;
  int hits = 0;
  while (hits < 2000) {
    State s{oracle::uniform(g, 0.01, 5), oracle::uniform(g, 0, 3)};
    if (!domain_contains(l2, d2, s, 0.0)) continue;
    ++hits;
    REQUIRE(s.rho >= lo2.rho - 1e-12);
    REQUIRE(s.rho <= hi2.rho + 1e-12);
    if (decreasing) REQUIRE(lambda1(l2, s) < 0);
  }
}

TEST_CASE("pressure monotonicity and bi-Lipschitz bounds") {
  for (double g : {1.0, 1.7, 3.0}) {
    PowerLaw law(g);
    for (double a = 0.2; a < 4; a += 0.3) {
      double b = a + 0.25;
      CHECK(law.p(b) > law.p(a));
      CHECK(law.phi(b) > law.phi(a));
      double diff = law.p(b) - law.p(a);
      CHECK(diff >= law.dp(a) * (b - a) - 1e-12);
      CHECK(diff <= law.dp(b) * (b - a) + 1e-12);
    }
  }
}
