#include <cmath>

#include "davydov/thermalization.hpp"
#include "doctest.h"

using namespace davydov;

namespace {

struct Fixture {
  BathModes bath = build_bath(BathSpec{50, 5.0, 10.0, 2.0, 100.0, 100.0}, 2);
  D2State state{2, 50};

  Fixture() {
    RandomStream rng(99);
    state.alpha = {complex(0.6, 0.1), complex(-0.2, 0.77)};
    for (std::size_t k = 0; k < bath.size(); ++k) state.lambda[k] = sample_displacement({300.0}, bath.omega[k], rng);
  }
};

}  // namespace

TEST_CASE("no scattering leaves the state untouched and consumes one coin per mode") {
  Fixture f;
  const D2State before = f.state;
  RandomStream rng(5), mirror(5);
  CHECK(scatter(f.state, f.bath, ThermalizationParams{0.0, 0.01, 200.0}, rng) == 0);
  CHECK(f.state == before);
  for (std::size_t k = 0; k < f.bath.size(); ++k) mirror.uniform();
  CHECK(rng.uniform() == mirror.uniform());
}

TEST_CASE("certain scattering redraws every momentum and nothing else") {
  Fixture f;
  const D2State before = f.state;
  RandomStream rng(6);
  const ThermalizationParams params{100.0, 0.01, 200.0};
  CHECK(params.flip_probability() == doctest::Approx(1.0));
  CHECK(scatter(f.state, f.bath, params, rng) == f.bath.size());
  CHECK(f.state.alpha == before.alpha);
  for (std::size_t k = 0; k < f.bath.size(); ++k) {
    CHECK(f.state.lambda[k].real() == before.lambda[k].real());
    CHECK(f.state.lambda[k].imag() != before.lambda[k].imag());
  }
}

TEST_CASE("redrawn momenta follow the secondary-bath marginal") {
  BathModes bath;
  bath.n_sites = 1;
  bath.modes_per_site = 1;
  bath.omega = {kUnits.to_angular(100.0)};
  bath.g = {0.1};
  const ThermalizationParams params{1.0, 1.0, 200.0};
  const double var = ThermalLaw{200.0}.quadrature_variance(bath.omega[0]);
  RandomStream rng(31);
  D2State s(1, 1);
  s.lambda[0] = complex(3.0, 0.0);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    scatter(s, bath, params, rng);
    m1 += s.lambda[0].imag();
    m2 += s.lambda[0].imag() * s.lambda[0].imag();
    CHECK(s.lambda[0].real() == 3.0);
  }
  CHECK(std::abs(m1 / n) < 5 * std::sqrt(var / n));
  CHECK(std::abs(m2 / n - var) < 5 * var * std::sqrt(2.0 / n));
}

TEST_CASE("zero secondary temperature quenches the momenta") {
  Fixture f;
  RandomStream rng(8);
  scatter(f.state, f.bath, ThermalizationParams{1.0, 1.0, 0.0}, rng);
  for (const auto& l : f.state.lambda) CHECK(l.imag() == 0.0);
}

TEST_CASE("event counts are binomial") {
  Fixture f;
  const ThermalizationParams params{2.5, 0.01, 200.0};
  RandomStream rng(12);
  const int rounds = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < rounds; ++r) {
    const double k = static_cast<double>(scatter(f.state, f.bath, params, rng));
    sum += k;
    sum2 += k * k;
  }
  const double p = params.flip_probability();
  const double n = static_cast<double>(f.bath.size());
  const double mean = sum / rounds;
  const double var = sum2 / rounds - mean * mean;
  CHECK(std::abs(mean - n * p) < 5 * std::sqrt(n * p * (1 - p) / rounds));
  CHECK(var == doctest::Approx(n * p * (1 - p)).epsilon(0.1));
  CHECK(expected_event_count(2.5, 10.0) == doctest::Approx(25.0));
  CHECK_THROWS_AS(expected_event_count(-1.0, 1.0), Error);
}

TEST_CASE("scattering is reproducible from the seed") {
  Fixture a, b;
  RandomStream r1(40), r2(40);
  const ThermalizationParams params{10.0, 0.01, 150.0};
  for (int i = 0; i < 10; ++i) {
    CHECK(scatter(a.state, a.bath, params, r1) == scatter(b.state, b.bath, params, r2));
  }
  CHECK(a.state == b.state);
}

TEST_CASE("parameter validation and warnings") {
  CHECK_NOTHROW((ThermalizationParams{10.0, 0.01, 200.0}.validate()));
  CHECK_NOTHROW((ThermalizationParams{0.0, 0.01, 0.0}.validate()));
  CHECK_THROWS_AS((ThermalizationParams{-1.0, 0.01, 200.0}.validate()), Error);
  CHECK_THROWS_AS((ThermalizationParams{1.0, 0.0, 200.0}.validate()), Error);
  CHECK_THROWS_AS((ThermalizationParams{200.0, 0.01, 200.0}.validate()), Error);
  CHECK_THROWS_AS((ThermalizationParams{1.0, 0.01, -5.0}.validate()), Error);
  CHECK((ThermalizationParams{10.0, 0.01, 200.0}.warnings()).empty());
  CHECK((ThermalizationParams{50.0, 0.01, 200.0}.warnings()).size() == 1);

  Fixture f;
  RandomStream rng(1);
  D2State wrong(2, 10);
  CHECK_THROWS_AS(scatter(wrong, f.bath, ThermalizationParams{1.0, 0.01, 1.0}, rng), Error);
}
