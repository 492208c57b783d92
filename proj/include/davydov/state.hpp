#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "davydov/model.hpp"
#include "davydov/random.hpp"

namespace davydov {

using complex = std::complex<double>;

/// Davydov D2 variational parameters at one instant. lambda is site-major
/// (site * Q + mode). Coordinates are x = sqrt(2) Re(lambda), momenta
/// p = sqrt(2) Im(lambda). alpha is never renormalized.
struct D2State {
  std::vector<complex> alpha;
  std::vector<complex> lambda;
  std::size_t modes_per_site = 0;
  double t = 0.0;  // ps

  D2State() = default;
  D2State(std::size_t n_sites, std::size_t modes)
      : alpha(n_sites), lambda(n_sites * modes), modes_per_site(modes) {}

  std::size_t n_sites() const { return alpha.size(); }
  double norm() const;  // sum_n |alpha_n|^2

  bool operator==(const D2State&) const = default;
};

/// Canonical (Bose-Einstein) statistics of one bath at a fixed temperature.
struct ThermalLaw {
  double temperature_K = 0.0;

  /// Mean occupancy 1 / (exp(beta omega) - 1), omega in rad/ps. Zero at T = 0.
  double occupancy(double omega, const UnitSystem& units = kUnits) const;
  /// Variance of each quadrature (Re and Im) of the displacement: occupancy / 2.
  double quadrature_variance(double omega, const UnitSystem& units = kUnits) const {
    return 0.5 * occupancy(omega, units);
  }
};

/// Which electronic state is populated at t = 0.
struct Excitation {
  enum class Kind { Site, Exciton };
  Kind kind = Kind::Site;
  std::size_t index = 0;
};

/// One Glauber-Sudarshan draw for a mode of frequency omega (rad/ps).
complex sample_displacement(const ThermalLaw& law, double omega, RandomStream& rng,
                            const UnitSystem& units = kUnits);

/// Thermal bath displacements (one law per site) plus the chosen electronic state.
/// `basis` is only consulted for exciton excitations.
D2State init_state(const Hamiltonian& h, const EigenBasis& basis, const std::vector<ThermalLaw>& laws,
                   const Excitation& excitation, RandomStream& rng);

/// <Psi|H|Psi> in cm^-1.
double total_energy(const D2State& state, const Hamiltonian& h);

void check_dimensions(const D2State& state, const Hamiltonian& h);

} // namespace davydov
