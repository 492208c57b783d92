#include <cmath>
#include <limits>
#include <random>

#include "davydov/dynamics.hpp"
#include "doctest.h"

using namespace davydov;

namespace {

constexpr complex I{0.0, 1.0};

BathModes one_mode(double omega_cm, double g) {
  BathModes b;
  b.n_sites = 1;
  b.modes_per_site = 1;
  b.omega = {kUnits.to_angular(omega_cm)};
  b.g = {g};
  return b;
}

struct Random3 {
  Hamiltonian h;
  D2State state;
};

Random3 random_aggregate(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const ExcitonModel model = ExcitonModel::chain({0.0, 180.0, 420.0}, 90.0);
  const BathModes bath = build_bath(BathSpec{5, 10.0, 40.0, 2.0, 100.0, 400.0}, 3);
  Random3 r{make_hamiltonian(model, bath), D2State(3, 5)};
  double nrm = 0.0;
  for (auto& a : r.state.alpha) {
    a = {n01(rng), n01(rng)};
    nrm += std::norm(a);
  }
  for (auto& a : r.state.alpha) a /= std::sqrt(nrm);
  for (auto& l : r.state.lambda) l = {n01(rng), n01(rng)};
  return r;
}

D2State shifted(const D2State& s, const DerivativeBuffer& d, double eps) {
  D2State out = s;
  for (std::size_t i = 0; i < s.alpha.size(); ++i) out.alpha[i] += eps * d.dalpha[i];
  for (std::size_t i = 0; i < s.lambda.size(); ++i) out.lambda[i] += eps * d.dlambda[i];
  return out;
}

}  // namespace

TEST_CASE("RHS for a single site and mode, worked by hand") {
  const double eps_cm = 120.0, g = 0.4;
  const Hamiltonian h = make_hamiltonian(ExcitonModel::chain({eps_cm}, 0.0), one_mode(80.0, g));
  D2State s(1, 1);
  s.alpha[0] = complex(0.6, -0.3);
  s.lambda[0] = complex(0.25, 0.9);
  const DerivativeBuffer d = eom_rhs(s, h);

  const double w = kUnits.to_angular(80.0), eps = kUnits.to_angular(eps_cm);
  const double pop = std::norm(s.alpha[0]);
  const double force = w * g * s.lambda[0].real();
  const double v = 2.0 * force - pop * force;
  const complex dalpha = -I * eps * s.alpha[0] + I * v * s.alpha[0];
  const complex dlambda = -I * w * (s.lambda[0] - g * pop);
  CHECK(std::abs(d.dalpha[0] - dalpha) < 1e-13);
  CHECK(std::abs(d.dlambda[0] - dlambda) < 1e-13);
  CHECK(drive_strength(s, h.bath, 0, 0) == doctest::Approx(g * pop));
}

TEST_CASE("RHS conserves norm and energy to first order") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Random3 r = random_aggregate(seed);
    const DerivativeBuffer d = eom_rhs(r.state, r.h);
    complex dnorm = 0.0;
    for (std::size_t i = 0; i < 3; ++i) dnorm += std::conj(r.state.alpha[i]) * d.dalpha[i];
    CHECK(std::abs(dnorm.real()) < 1e-12);

    // Central difference of E along the flow direction.
    const double e = 1e-5;
    const double dEdt = (total_energy(shifted(r.state, d, e), r.h) -
                         total_energy(shifted(r.state, d, -e), r.h)) / (2 * e);
    double scale = 0.0;
    for (const auto& x : d.dlambda) scale += std::abs(x);
    CHECK(std::abs(dEdt) < 1e-6 * scale * 100.0);
  }
}

TEST_CASE("a site-local reading of the phase term breaks energy conservation") {
  // Replacing the common term sum_m P_m S_m by the site's own P_n S_n makes the
  // phase site dependent; the energy check above must then fail.
  const Random3 r = random_aggregate(5);
  DerivativeBuffer d = eom_rhs(r.state, r.h);
  double common = 0.0;
  for (std::size_t m = 0; m < 3; ++m) common += std::norm(r.state.alpha[m]) * d.site_force[m];
  for (std::size_t i = 0; i < 3; ++i) {
    const double local = std::norm(r.state.alpha[i]) * d.site_force[i];
    d.dalpha[i] += I * (common - local) * r.state.alpha[i];
  }
  const double e = 1e-5;
  const double dEdt = (total_energy(shifted(r.state, d, e), r.h) -
                       total_energy(shifted(r.state, d, -e), r.h)) / (2 * e);
  CHECK(std::abs(dEdt) > 1e-2);
}

TEST_CASE("displaced oscillator closed form") {
  // N = 1, |alpha| = 1: lambda(t) = g + (lambda0 - g) exp(-i w t).
  const double g = 0.3;
  const Hamiltonian h = make_hamiltonian(ExcitonModel::chain({0.0}, 0.0), one_mode(50.0, g));
  D2State s(1, 1);
  s.alpha[0] = 1.0;
  s.lambda[0] = complex(1.0, 0.5);
  const double w = kUnits.to_angular(50.0);
  const D2State out = propagate_segment(s, h, 1.0, 1e-3);
  const complex exact = g + (s.lambda[0] - g) * std::exp(-I * w * 1.0);
  CHECK(std::abs(out.lambda[0] - exact) < 1e-9);
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  CHECK(out.t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary polaron is a fixed point of the bath") {
  const double g = 0.8;
  const Hamiltonian h = make_hamiltonian(ExcitonModel::chain({100.0}, 0.0), one_mode(120.0, g));
  D2State s(1, 1);
  s.alpha[0] = 1.0;
  s.lambda[0] = g;
  const DerivativeBuffer d = eom_rhs(s, h);
  CHECK(std::abs(d.dlambda[0]) < 1e-15);
  const D2State out = propagate_segment(s, h, 0.5, 1e-3);
  CHECK(std::abs(out.lambda[0] - g) < 1e-9);
  // alpha only rotates, at the polaron-shifted frequency eps - w g^2
  const double freq = kUnits.to_angular(100.0) - kUnits.to_angular(120.0) * g * g;
  CHECK(std::abs(out.alpha[0] - std::exp(-I * freq * 0.5)) < 1e-9);
}

TEST_CASE("RK4 is fourth order") {
  const double g = 0.3;
  const Hamiltonian h = make_hamiltonian(ExcitonModel::chain({0.0}, 0.0), one_mode(200.0, g));
  D2State s(1, 1);
  s.alpha[0] = 1.0;
  s.lambda[0] = complex(1.0, 0.5);
  const double w = kUnits.to_angular(200.0);
  const complex exact = g + (s.lambda[0] - g) * std::exp(-I * w * 0.2);
  const double e1 = std::abs(propagate_segment(s, h, 0.2, 4e-3).lambda[0] - exact);
  const double e2 = std::abs(propagate_segment(s, h, 0.2, 2e-3).lambda[0] - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("norm and energy drift over a picosecond") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Random3 r = random_aggregate(seed);
    const double e0 = total_energy(r.state, r.h);
    const D2State out = propagate_segment(r.state, r.h, 1.0, 2e-4);
    CHECK(std::abs(out.norm() - 1.0) < 1e-7);
    CHECK(std::abs(total_energy(out, r.h) - e0) < 1e-6 * std::max(1.0, std::abs(e0)));
  }
}

TEST_CASE("propagation is deterministic and segment-additive") {
  const Random3 r = random_aggregate(3);
  const D2State a = propagate_segment(r.state, r.h, 0.1, 1e-3);
  const D2State b = propagate_segment(r.state, r.h, 0.1, 1e-3);
  CHECK(a == b);
  D2State c = r.state;
  Propagator p(r.h);
  p.advance(c, 1e-3, 40);
  p.advance(c, 1e-3, 60);
  CHECK(c.alpha == a.alpha);
  CHECK(c.lambda == a.lambda);
  const D2State one = rk4_step(r.state, r.h, 1e-3);
  D2State two = r.state;
  p.step(two, 1e-3);
  CHECK(one == two);
}

TEST_CASE("non-finite state is reported with its time") {
  const Random3 r = random_aggregate(4);
  D2State s = r.state;
  s.lambda[7] = complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  s.t = 2.0;
  Propagator p(r.h);
  try {
    p.step(s, 1e-3);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.time == doctest::Approx(2.001));
  }
  D2State inf = r.state;
  inf.alpha[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(p.step(inf, 1e-3), NonFiniteError);
}

TEST_CASE("step counting and integrator validation") {
  CHECK(steps_in(1.0, 1e-3, "x") == 1000);
  CHECK(steps_in(0.01, 1e-3, "x") == 10);
  CHECK(steps_in(0.0, 1e-3, "x") == 0);
  CHECK_THROWS_AS(steps_in(0.0105, 1e-3, "x"), Error);
  CHECK_THROWS_AS(steps_in(1.0, 0.0, "x"), Error);
  CHECK_THROWS_AS(steps_in(-1.0, 1e-3, "x"), Error);

  IntegratorConfig ok{1e-3, 2.0, 10};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.total_steps() == 2000);
  CHECK_THROWS_AS((IntegratorConfig{0.0, 1.0, 10}.validate()), Error);
  CHECK_THROWS_AS((IntegratorConfig{1e-3, 1.00005, 10}.validate()), Error);
  CHECK_THROWS_AS((IntegratorConfig{1e-3, 1.0, 0}.validate()), Error);

  const Random3 r = random_aggregate(1);
  CHECK_THROWS_AS(rk4_step(r.state, r.h, 0.0), Error);
  CHECK_THROWS_AS(propagate_segment(D2State(2, 5), r.h, 0.1, 1e-3), Error);
}
