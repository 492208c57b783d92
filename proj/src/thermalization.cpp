#include "davydov/thermalization.hpp"

#include <cmath>
#include <sstream>

namespace davydov {

void ThermalizationParams::validate() const {
  if (!(nu >= 0.0)) throw Error("thermal.nu_per_ps: must be >= 0");
  if (!(tau > 0.0)) throw Error("thermal.tau_ps: must be > 0");
  if (nu * tau > 1.0) throw Error("thermal.nu_per_ps: nu * tau exceeds 1 and is not a probability");
  if (!(t_inf >= 0.0)) throw Error("thermal.T_inf_K: must be >= 0");
}

std::vector<std::string> ThermalizationParams::warnings() const {
  std::vector<std::string> out;
  if (nu * tau > kPoissonWarnThreshold) {
    std::ostringstream os;
    os << "Poisson limit degraded: nu * tau = " << nu * tau << " > " << kPoissonWarnThreshold;
    out.push_back(os.str());
  }
  return out;
}

std::size_t scatter(D2State& state, const BathModes& bath, const ThermalizationParams& params,
                    RandomStream& rng, const UnitSystem& units) {
  if (state.lambda.size() != bath.size()) throw Error("scatter: state does not match bath");
  const double p = params.flip_probability();
  const ThermalLaw law{params.t_inf};
  std::size_t heads = 0;
  for (std::size_t k = 0; k < bath.size(); ++k) {
    // The coin is always drawn so the stream position never depends on outcomes.
    const double coin = rng.uniform();
    if (coin >= p) continue;
    ++heads;
    const double sigma = std::sqrt(law.quadrature_variance(bath.omega[k], units));
    const double draw = rng.normal();
    state.lambda[k].imag(sigma * draw);
  }
  return heads;
}

double expected_event_count(double nu, double t_total) {
  if (nu < 0.0) throw Error("expected_event_count: nu must be >= 0");
  return nu * t_total;
}

} // namespace davydov
