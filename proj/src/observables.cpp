#include "davydov/observables.hpp"

#include <cmath>
#include <numbers>

namespace davydov {

namespace {

void require_snapshots(const EnsembleAccumulator& acc) {
  if (acc.count() == 0) throw Error("observables: ensemble has no successful trajectories");
}

}  // namespace

std::vector<double> TimeSeries::column(std::size_t component) const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].at(component);
  return out;
}

std::vector<CoherenceMatrix> coherence_series(const EnsembleAccumulator& acc) {
  require_snapshots(acc);
  const auto& l = acc.layout();
  const std::size_t n = l.n_sites;
  std::vector<CoherenceMatrix> out(acc.n_snapshots(), CoherenceMatrix(n * n));
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) {
    for (std::size_t k = 0; k < n * n; ++k) {
      out[s][k] = {acc.mean(s, l.coherence() + 2 * k), acc.mean(s, l.coherence() + 2 * k + 1)};
    }
  }
  return out;
}

TimeSeries exciton_populations(const std::vector<CoherenceMatrix>& coherence, const EigenBasis& basis,
                               const std::vector<double>& times, std::size_t n_trajectories) {
  const std::size_t n = basis.size();
  if (coherence.size() != times.size()) throw Error("exciton_populations: times and data disagree");
  TimeSeries out{times, {}, n_trajectories};
  out.values.reserve(coherence.size());
  for (const auto& rho : coherence) {
    if (rho.size() != n * n) throw Error("exciton_populations: coherence matrix has the wrong size");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        if (std::abs(rho[i * n + j] - std::conj(rho[j * n + i])) > 1e-10) {
          throw Error("exciton_populations: coherence matrix is not Hermitian");
        }
      }
    }
    std::vector<double> pops(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
      complex acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          acc += basis.vectors(i, e) * rho[i * n + j] * basis.vectors(j, e);
        }
      }
      pops[e] = acc.real();
    }
    out.values.push_back(std::move(pops));
  }
  return out;
}

TimeSeries exciton_populations(const EnsembleAccumulator& acc, const EigenBasis& basis) {
  return exciton_populations(coherence_series(acc), basis, acc.times(), acc.count());
}

TimeSeries exciton_population_stderr(const EnsembleAccumulator& acc) {
  require_snapshots(acc);
  const auto& l = acc.layout();
  const double count = static_cast<double>(acc.count());
  TimeSeries out{acc.times(), {}, acc.count()};
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) {
    std::vector<double> err(l.n_sites, 0.0);
    for (std::size_t e = 0; e < l.n_sites; ++e) {
      const double m1 = acc.mean(s, l.exciton_population() + e);
      const double m2 = acc.mean(s, l.exciton_population_sq() + e);
      const double var = count > 1 ? std::max(0.0, m2 - m1 * m1) * count / (count - 1) : 0.0;
      err[e] = std::sqrt(var / count);
    }
    out.values.push_back(std::move(err));
  }
  return out;
}

TimeSeries site_populations(const EnsembleAccumulator& acc) {
  require_snapshots(acc);
  const auto& l = acc.layout();
  const std::size_t n = l.n_sites;
  TimeSeries out{acc.times(), {}, acc.count()};
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = acc.mean(s, l.coherence() + 2 * (i * n + i));
    out.values.push_back(std::move(p));
  }
  return out;
}

TimeSeries momentum_second_moment(const EnsembleAccumulator& acc) {
  require_snapshots(acc);
  const auto& l = acc.layout();
  TimeSeries out{acc.times(), {}, acc.count()};
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) {
    std::vector<double> v(l.n_modes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = acc.mean(s, l.lambda_im2() + k);
    out.values.push_back(std::move(v));
  }
  return out;
}

TimeSeries windowed_kinetic_energy(const TimeSeries& im_squared, const BathModes& bath, double window) {
  const std::size_t S = im_squared.size();
  TimeSeries out{im_squared.times, {}, im_squared.n_trajectories};
  if (S == 0) return out;
  const double stride = S > 1 ? im_squared.times[1] - im_squared.times[0] : window;
  if (window < stride * (1.0 - 1e-9)) throw Error("windowed_kinetic_energy: window shorter than snapshot stride");
  const auto half = static_cast<std::size_t>(std::floor(window / (2.0 * stride) + 1e-9));
  const std::size_t nq = bath.size();

  out.values.assign(S, std::vector<double>(nq, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    if (im_squared.values[s].size() != nq) throw Error("windowed_kinetic_energy: series does not match bath");
    const std::size_t lo = s >= half ? s - half : 0;
    const std::size_t hi = std::min(S - 1, s + half);
    const double width = static_cast<double>(hi - lo + 1);
    for (std::size_t k = 0; k < nq; ++k) {
      CompensatedSum sum;
      for (std::size_t j = lo; j <= hi; ++j) sum.add(im_squared.values[j][k]);
      out.values[s][k] = bath.omega[k] * sum.value() / width;
    }
  }
  return out;
}

double mode_temperature(double omega, double kinetic, const UnitSystem& units) {
  if (!(kinetic > 0.0)) return 0.0;
  return omega / (units.kB_angular() * std::log1p(omega / (2.0 * kinetic)));
}

TemperatureEstimate bath_temperature(const TimeSeries& kinetic, const BathModes& bath, double window,
                                     const UnitSystem& units) {
  TemperatureEstimate out;
  out.times = kinetic.times;
  out.window = window;
  const std::size_t Q = bath.modes_per_site;
  for (const auto& row : kinetic.values) {
    if (row.size() != bath.size()) throw Error("bath_temperature: series does not match bath");
    std::vector<double> temps(bath.n_sites, 0.0);
    for (std::size_t m = 0; m < bath.n_sites; ++m) {
      CompensatedSum sum;
      for (std::size_t q = 0; q < Q; ++q) {
        const std::size_t k = bath.index(m, q);
        sum.add(mode_temperature(bath.omega[k], row[k], units));
      }
      temps[m] = sum.value() / static_cast<double>(Q);
    }
    out.kelvin.push_back(std::move(temps));
  }
  return out;
}

TemperatureEstimate bath_temperature(const EnsembleAccumulator& acc, const BathModes& bath, double window,
                                     const UnitSystem& units) {
  return bath_temperature(windowed_kinetic_energy(momentum_second_moment(acc), bath, window), bath, window,
                          units);
}

TimeSeries phase_space_mean(const EnsembleAccumulator& acc, std::size_t site, std::size_t mode) {
  require_snapshots(acc);
  const auto& l = acc.layout();
  if (site >= l.n_sites || mode >= l.modes_per_site) throw Error("phase_space_mean: index out of range");
  const std::size_t k = site * l.modes_per_site + mode;
  TimeSeries out{acc.times(), {}, acc.count()};
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) {
    out.values.push_back({std::numbers::sqrt2 * acc.mean(s, l.lambda_re() + k),
                          std::numbers::sqrt2 * acc.mean(s, l.lambda_im() + k)});
  }
  return out;
}

TimeSeries mean_energy(const EnsembleAccumulator& acc) {
  require_snapshots(acc);
  TimeSeries out{acc.times(), {}, acc.count()};
  for (std::size_t s = 0; s < acc.n_snapshots(); ++s) out.values.push_back({acc.mean(s, acc.layout().energy())});
  return out;
}

double recursion_time(double delta_omega_cm, const UnitSystem& units) {
  if (!(delta_omega_cm > 0.0)) throw Error("recursion_time: delta_omega must be > 0");
  return 2.0 * std::numbers::pi / units.to_angular(delta_omega_cm);
}

} // namespace davydov
