#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "davydov/model.hpp"
#include "davydov/random.hpp"
#include "davydov/state.hpp"

namespace davydov {

/// Contact with the implicit secondary bath.
struct ThermalizationParams {
  double nu = 0.0;       // scattering rate per mode, 1/ps
  double tau = 0.01;     // interval between coin flips, ps
  double t_inf = 0.0;    // secondary bath temperature, K

  double flip_probability() const { return nu * tau; }

  /// Throws on nu < 0, tau <= 0, nu * tau > 1 or T_inf < 0.
  void validate() const;
  /// Human-readable warnings (empty when none), e.g. a degraded Poisson limit.
  std::vector<std::string> warnings() const;
};

/// nu * tau above this makes the Bernoulli process a poor Poisson approximation.
inline constexpr double kPoissonWarnThreshold = 0.1;

/// One Bernoulli scattering round, applied at a tau boundary. For every mode
/// (site-major, mode-minor) one coin is drawn; on heads the momentum
/// quadrature Im(lambda) is redrawn from the T_inf thermal marginal while
/// Re(lambda) and alpha are left untouched. Returns the number of heads.
std::size_t scatter(D2State& state, const BathModes& bath, const ThermalizationParams& params,
                    RandomStream& rng, const UnitSystem& units = kUnits);

/// Poisson mean of scattering events per mode over t_total.
double expected_event_count(double nu, double t_total);

} // namespace davydov
