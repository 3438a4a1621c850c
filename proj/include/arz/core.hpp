#ifndef ARZ_CORE_HPP
#define ARZ_CORE_HPP

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

namespace arz {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct VacuumError : Error {
  using Error::Error;
};
struct DegenerateError : Error {
  using Error::Error;
};
struct InfeasibleConstraint : Error {
  using Error::Error;
};
struct MeshCollapse : Error {
  using Error::Error;
};
struct CflError : Error {
  using Error::Error;
};

// Anything providing p, p', p'', p^{-1}, phi = (rho p)' and phi^{-1} can
// drive the solvers.
template <class L>
concept PressureLaw = requires(const L& law, double x) {
  { law.p(x) } -> std::convertible_to<double>;
  { law.dp(x) } -> std::convertible_to<double>;
  { law.ddp(x) } -> std::convertible_to<double>;
  { law.p_inv(x) } -> std::convertible_to<double>;
  { law.phi(x) } -> std::convertible_to<double>;
  { law.phi_inv(x) } -> std::convertible_to<double>;
};

struct PowerLaw {
  double gamma = 1.0;

  PowerLaw() = default;
  explicit PowerLaw(double g) : gamma(g) {
    if (!(g >= 1.0)) throw DomainError("gamma must be >= 1");
  }

  double p(double rho) const {
    check(rho, "p");
    return std::pow(rho, gamma);
  }
  double dp(double rho) const {
    check(rho, "dp");
    if (gamma == 1.0) return 1.0;
    return gamma * std::pow(rho, gamma - 1.0);
  }
  double ddp(double rho) const {
    check(rho, "ddp");
    if (gamma == 1.0) return 0.0;
    return gamma * (gamma - 1.0) * std::pow(rho, gamma - 2.0);
  }
  double p_inv(double x) const {
    check(x, "p_inv");
    return std::pow(x, 1.0 / gamma);
  }
  double phi(double rho) const {
    check(rho, "phi");
    return (gamma + 1.0) * std::pow(rho, gamma);
  }
  double phi_inv(double tau) const {
    check(tau, "phi_inv");
    return std::pow(tau / (gamma + 1.0), 1.0 / gamma);
  }

 private:
  static void check(double x, const char* what) {
    if (!(x >= 0.0)) throw DomainError(std::string(what) + ": negative argument");
  }
};

static_assert(PressureLaw<PowerLaw>);

struct State {
  double rho = 0.0;
  double v = 0.0;
};

struct ConservedState {
  double rho = 0.0;
  double z = 0.0;

  double& operator[](int c) { return c == 0 ? rho : z; }
  double operator[](int c) const { return c == 0 ? rho : z; }

  ConservedState& operator+=(const ConservedState& o) {
    rho += o.rho;
    z += o.z;
    return *this;
  }
  ConservedState& operator-=(const ConservedState& o) {
    rho -= o.rho;
    z -= o.z;
    return *this;
  }
  ConservedState& operator*=(double s) {
    rho *= s;
    z *= s;
    return *this;
  }
};

inline ConservedState operator+(ConservedState a, const ConservedState& b) { return a += b; }
inline ConservedState operator-(ConservedState a, const ConservedState& b) { return a -= b; }
inline ConservedState operator*(double s, ConservedState a) { return a *= s; }
inline ConservedState operator*(ConservedState a, double s) { return a *= s; }
inline ConservedState operator/(ConservedState a, double s) { return a *= 1.0 / s; }

// Flux of (rho, z); same two-component layout.
using Flux = ConservedState;

struct Invariants {
  double v = 0.0;
  double w = 0.0;
};

template <PressureLaw L>
ConservedState to_conserved(const L& law, const State& s) {
  if (!(s.rho >= 0.0)) throw DomainError("negative density");
  return {s.rho, s.rho * (s.v + law.p(s.rho))};
}

template <PressureLaw L>
State to_primitive(const L& law, const ConservedState& u) {
  if (!(u.rho > 0.0)) throw VacuumError("to_primitive: rho <= 0");
  return {u.rho, u.z / u.rho - law.p(u.rho)};
}

template <PressureLaw L>
double w_of(const L& law, const State& s) {
  return s.v + law.p(s.rho);
}

template <PressureLaw L>
Invariants riemann_invariants(const L& law, const State& s) {
  return {s.v, w_of(law, s)};
}

template <PressureLaw L>
double lambda1(const L& law, const State& s) {
  return s.v - s.rho * law.dp(s.rho);
}

inline double lambda2(const State& s) { return s.v; }

template <PressureLaw L>
std::pair<double, double> eigenvalues(const L& law, const State& s) {
  return {lambda1(law, s), lambda2(s)};
}

template <PressureLaw L>
Flux flux(const L& law, const State& s) {
  ConservedState u = to_conserved(law, s);
  return {u.rho * s.v, u.z * s.v};
}

template <PressureLaw L>
Flux flux(const L& law, const ConservedState& u) {
  return flux(law, to_primitive(law, u));
}

// Velocity on the first-family curve through the anchor.
template <PressureLaw L>
double lax1(const L& law, double rho, const State& anchor) {
  return anchor.v + law.p(anchor.rho) - law.p(rho);
}

inline double lax2(double /*rho*/, const State& anchor) { return anchor.v; }

struct InvariantDomain {
  double v1 = 0.0;
  double v2 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
};

inline void validate(const InvariantDomain& d) {
  if (!(d.v1 > 0.0 && d.v1 < d.v2 && d.w1 > 0.0 && d.w1 < d.w2 && d.v2 < d.w2))
    throw DomainError("invariant domain: need 0 < v1 < v2, 0 < w1 < w2, v2 < w2");
}

template <PressureLaw L>
bool domain_contains(const L& law, const InvariantDomain& d, const State& s,
                     double slack = 1e-10) {
  double w = w_of(law, s);
  return s.v >= d.v1 - slack && s.v <= d.v2 + slack && w >= d.w1 - slack &&
         w <= d.w2 + slack;
}

// (rho_min state, rho_max state): corners (v2, w1) and (v1, w2).
template <PressureLaw L>
std::pair<State, State> domain_extremal_densities(const L& law, const InvariantDomain& d) {
  validate(d);
  if (!(d.w1 > d.v2)) throw VacuumError("invariant domain: w1 <= v2, rho_min corner is vacuum");
  State lo{law.p_inv(d.w1 - d.v2), d.v2};
  State hi{law.p_inv(d.w2 - d.v1), d.v1};
  return {lo, hi};
}

}  // namespace arz

#endif
