#include "davydov/state.hpp"

#include <cmath>
#include <sstream>

namespace davydov {

std::pair<double, double> RandomStream::normal_pair() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double D2State::norm() const {
  double s = 0.0;
  for (const auto& a : alpha) s += std::norm(a);
  return s;
}

double ThermalLaw::occupancy(double omega, const UnitSystem& units) const {
  if (!(omega > 0.0)) throw Error("occupancy: mode frequency must be positive");
  if (temperature_K < 0.0) throw Error("thermal law: temperature must be non-negative");
  if (temperature_K == 0.0) return 0.0;
  const double x = omega * units.beta(temperature_K);
  return 1.0 / std::expm1(x);
}

complex sample_displacement(const ThermalLaw& law, double omega, RandomStream& rng,
                            const UnitSystem& units) {
  // Both quadratures of the Glauber-Sudarshan density are independent Gaussians
  // with variance nbar / 2. The T = 0 point mass consumes no draws.
  const double variance = law.quadrature_variance(omega, units);
  if (variance == 0.0) return {0.0, 0.0};
  const double sigma = std::sqrt(variance);
  const auto [re, im] = rng.normal_pair();
  return {sigma * re, sigma * im};
}

void check_dimensions(const D2State& state, const Hamiltonian& h) {
  if (state.n_sites() != h.n_sites() || state.modes_per_site != h.modes_per_site() ||
      state.lambda.size() != h.bath.size()) {
    std::ostringstream os;
    os << "state has " << state.n_sites() << " sites x " << state.modes_per_site
       << " modes, model has " << h.n_sites() << " x " << h.modes_per_site();
    throw Error(os.str());
  }
}

D2State init_state(const Hamiltonian& h, const EigenBasis& basis, const std::vector<ThermalLaw>& laws,
                   const Excitation& excitation, RandomStream& rng) {
  const std::size_t n = h.n_sites();
  const std::size_t Q = h.modes_per_site();
  if (laws.size() != n) throw Error("init_state: one thermal law per site is required");
  if (excitation.index >= n) {
    std::ostringstream os;
    os << "excitation.index: " << excitation.index << " out of range for " << n << " sites";
    throw Error(os.str());
  }

  D2State state(n, Q);
  if (excitation.kind == Excitation::Kind::Site) {
    state.alpha[excitation.index] = 1.0;
  } else {
    if (basis.size() != n) throw Error("init_state: exciton basis does not match the model");
    for (std::size_t k = 0; k < n; ++k) state.alpha[k] = basis.vectors(k, excitation.index);
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t k = h.bath.index(m, q);
      state.lambda[k] = sample_displacement(laws[m], h.bath.omega[k], rng, h.units);
    }
  }
  return state;
}

double total_energy(const D2State& state, const Hamiltonian& h) {
  check_dimensions(state, h);
  const std::size_t n = h.n_sites();
  const std::size_t Q = h.modes_per_site();

  double electronic = 0.0;
  double residue = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    electronic += h.epsilon[i] * std::norm(state.alpha[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const complex term = h.coupling(i, j) * std::conj(state.alpha[i]) * state.alpha[j];
      electronic += term.real();
      residue += term.imag();
    }
  }
  if (std::abs(residue) > 1e-10 * std::max(1.0, std::abs(electronic))) {
    throw Error("total_energy: coupling term is not real; J must be symmetric");
  }

  double bath = 0.0, coupling = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    double site = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      const std::size_t k = h.bath.index(m, q);
      const double w = h.bath.omega[k];
      bath += w * std::norm(state.lambda[k]);
      site += w * h.bath.g[k] * 2.0 * state.lambda[k].real();
    }
    coupling -= std::norm(state.alpha[m]) * site;
  }
  return h.units.to_wavenumber(electronic + bath + coupling);
}

} // namespace davydov
