#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "davydov/units.hpp"

namespace davydov {

/// Raised for any invalid model, configuration or runtime input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major real matrix, small sizes only (N sites).
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static RealMatrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Electronic part of the aggregate: site energies and resonant couplings, cm^-1.
struct ExcitonModel {
  std::vector<double> epsilon_cm;
  RealMatrix coupling_cm;  // symmetric, zero diagonal

  std::size_t n_sites() const { return epsilon_cm.size(); }

  /// Throws Error if N < 1, shapes disagree, J is asymmetric or has a nonzero diagonal.
  void validate() const;

  /// Linear chain with uniform nearest-neighbour coupling.
  static ExcitonModel chain(std::vector<double> epsilon_cm, double nn_coupling_cm);
};

/// Discretization of the super-Ohmic spectral density onto an equidistant grid.
struct BathSpec {
  std::size_t modes_per_site = 1;  // Q
  double omega0_cm = 0.01;
  double delta_omega_cm = 1.0;
  double ohmicity = 2.0;           // s
  double omega_c_cm = 100.0;
  double reorganization_cm = 0.0;  // Lambda per site

  void validate() const;
};

/// Per-(site, mode) frequencies (rad/ps) and dimensionless couplings.
/// Storage is site-major: index = site * modes_per_site + mode.
struct BathModes {
  std::size_t n_sites = 0;
  std::size_t modes_per_site = 0;
  std::vector<double> omega;
  std::vector<double> g;

  std::size_t size() const { return omega.size(); }
  std::size_t index(std::size_t site, std::size_t mode) const {
    return site * modes_per_site + mode;
  }
  double omega_at(std::size_t site, std::size_t mode) const { return omega[index(site, mode)]; }
  double g_at(std::size_t site, std::size_t mode) const { return g[index(site, mode)]; }

  /// Sum over modes of omega * g^2 for one site, rad/ps.
  double reorganization(std::size_t site) const;
  /// Mode index on `site` whose frequency is closest to `omega_cm`.
  std::size_t nearest_mode(std::size_t site, double omega_cm, const UnitSystem& units = kUnits) const;
};

/// Exciton eigenpairs of the system Hamiltonian. energies ascending (cm^-1),
/// vectors(n, e) is the amplitude of site n in exciton e.
struct EigenBasis {
  std::vector<double> energies_cm;
  RealMatrix vectors;

  std::size_t size() const { return energies_cm.size(); }
};

/// Model in internal units, ready for propagation. Immutable after build.
struct Hamiltonian {
  ExcitonModel model;
  BathModes bath;
  std::vector<double> epsilon;  // rad/ps
  RealMatrix coupling;          // rad/ps
  UnitSystem units;

  std::size_t n_sites() const { return epsilon.size(); }
  std::size_t modes_per_site() const { return bath.modes_per_site; }
};

/// omega^s * exp(-omega / omega_c); any consistent frequency unit.
double spectral_density(double omega, double s, double omega_c);

BathModes build_bath(const BathSpec& spec, std::size_t n_sites, const UnitSystem& units = kUnits);

/// Cyclic Jacobi eigensolver for the N x N system Hamiltonian.
EigenBasis diagonalize(const ExcitonModel& model);
/// Same solver on an arbitrary symmetric matrix (energies in the matrix's units).
EigenBasis diagonalize_symmetric(const RealMatrix& matrix);

/// Harmonic oscillator heat capacity in units of kB; x = beta * omega.
double specific_heat(double beta, double omega);

Hamiltonian make_hamiltonian(ExcitonModel model, BathModes bath, const UnitSystem& units = kUnits);

} // namespace davydov
