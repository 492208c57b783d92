#pragma once

#include <cstddef>
#include <vector>

#include "davydov/accumulator.hpp"
#include "davydov/model.hpp"
#include "davydov/state.hpp"

namespace davydov {

/// Uniformly strided series of per-snapshot vectors.
struct TimeSeries {
  std::vector<double> times;                // ps
  std::vector<std::vector<double>> values;  // values[snapshot][component]
  std::size_t n_trajectories = 0;

  std::size_t size() const { return times.size(); }
  std::vector<double> column(std::size_t component) const;
};

/// Per-site transient bath temperature.
struct TemperatureEstimate {
  std::vector<double> times;                // ps
  std::vector<std::vector<double>> kelvin;  // kelvin[snapshot][site]
  double window = 0.0;                      // ps
};

/// Ensemble coherence matrix <alpha_n^* alpha_m> of one snapshot, row-major N x N.
using CoherenceMatrix = std::vector<complex>;

std::vector<CoherenceMatrix> coherence_series(const EnsembleAccumulator& acc);

/// rho_e = sum_{n,m} psi_ne <alpha_n^* alpha_m> psi_me for every snapshot.
/// Rejects coherence matrices that are not Hermitian to 1e-10.
TimeSeries exciton_populations(const std::vector<CoherenceMatrix>& coherence, const EigenBasis& basis,
                               const std::vector<double>& times, std::size_t n_trajectories = 0);
TimeSeries exciton_populations(const EnsembleAccumulator& acc, const EigenBasis& basis);

/// Standard error of each exciton population from the per-trajectory second moment.
TimeSeries exciton_population_stderr(const EnsembleAccumulator& acc);

/// Site populations <|alpha_n|^2>.
TimeSeries site_populations(const EnsembleAccumulator& acc);

/// Ensemble mean of (Im lambda)^2 per (site, mode): values[snapshot][site * Q + mode].
TimeSeries momentum_second_moment(const EnsembleAccumulator& acc);

/// K_mq = w_mq <(Im lambda_mq)^2>, averaged over a centered window of width
/// `window` (ps), truncated at the ends of the series. Window below the
/// snapshot stride is rejected.
TimeSeries windowed_kinetic_energy(const TimeSeries& im_squared, const BathModes& bath, double window);

/// Inverts the Bose-Einstein occupancy mode by mode and averages per site:
/// T_m = (1 / (kB Q)) sum_q w_mq / ln(1 + w_mq / (2 K_mq)). K = 0 gives T = 0.
TemperatureEstimate bath_temperature(const TimeSeries& kinetic, const BathModes& bath, double window,
                                     const UnitSystem& units = kUnits);

/// Convenience: windowed kinetic energy followed by the temperature estimate.
TemperatureEstimate bath_temperature(const EnsembleAccumulator& acc, const BathModes& bath, double window,
                                     const UnitSystem& units = kUnits);

/// Temperature of one mode from its kinetic energy (both in rad/ps), K.
double mode_temperature(double omega, double kinetic, const UnitSystem& units = kUnits);

/// (<x>, <p>) = sqrt(2) (<Re lambda>, <Im lambda>) for one mode: values[snapshot] = {x, p}.
TimeSeries phase_space_mean(const EnsembleAccumulator& acc, std::size_t site, std::size_t mode);

/// Ensemble mean energy <H> per snapshot, cm^-1.
TimeSeries mean_energy(const EnsembleAccumulator& acc);

/// Bath revival time 2 pi / delta_omega, ps.
double recursion_time(double delta_omega_cm, const UnitSystem& units = kUnits);

} // namespace davydov
