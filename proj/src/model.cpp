#include "davydov/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace davydov {

double UnitSystem::beta(double temperature_K) const {
  if (temperature_K < 0.0) throw Error("temperature must be non-negative");
  if (temperature_K == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kB_angular() * temperature_K);
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void ExcitonModel::validate() const {
  const std::size_t n = n_sites();
  if (n < 1) throw Error("model.epsilon: at least one site is required");
  if (coupling_cm.rows != n || coupling_cm.cols != n) {
    std::ostringstream os;
    os << "model.J: expected " << n << "x" << n << " matrix, got " << coupling_cm.rows << "x"
       << coupling_cm.cols;
    throw Error(os.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (coupling_cm(i, i) != 0.0) throw Error("model.J: diagonal entries must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coupling_cm(i, j) != coupling_cm(j, i)) throw Error("model.J: matrix must be symmetric");
    }
  }
  for (double e : epsilon_cm) {
    if (!std::isfinite(e)) throw Error("model.epsilon: non-finite site energy");
  }
}

ExcitonModel ExcitonModel::chain(std::vector<double> epsilon_cm, double nn_coupling_cm) {
  const std::size_t n = epsilon_cm.size();
  ExcitonModel m{std::move(epsilon_cm), RealMatrix(n, n)};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m.coupling_cm(i, i + 1) = nn_coupling_cm;
    m.coupling_cm(i + 1, i) = nn_coupling_cm;
  }
  return m;
}

void BathSpec::validate() const {
  if (modes_per_site < 1) throw Error("bath.Q: must be >= 1");
  if (!(delta_omega_cm > 0.0)) throw Error("bath.delta_omega_cm: must be > 0");
  if (!(omega0_cm > 0.0)) throw Error("bath.omega0_cm: must be > 0");
  if (!(omega_c_cm > 0.0)) throw Error("bath.omega_c_cm: must be > 0");
  if (!(reorganization_cm >= 0.0)) throw Error("bath.lambda_reorg_cm: must be >= 0");
  if (!std::isfinite(ohmicity)) throw Error("bath.s: must be finite");
}

double BathModes::reorganization(std::size_t site) const {
  double sum = 0.0;
  for (std::size_t q = 0; q < modes_per_site; ++q) {
    const std::size_t k = index(site, q);
    sum += omega[k] * g[k] * g[k];
  }
  return sum;
}

std::size_t BathModes::nearest_mode(std::size_t site, double omega_cm, const UnitSystem& units) const {
  if (site >= n_sites) throw Error("site index out of range");
  const double target = units.to_angular(omega_cm);
  std::size_t best = 0;
  for (std::size_t q = 1; q < modes_per_site; ++q) {
    if (std::abs(omega_at(site, q) - target) < std::abs(omega_at(site, best) - target)) best = q;
  }
  return best;
}

double spectral_density(double omega, double s, double omega_c) {
  if (omega == 0.0) return s > 0.0 ? 0.0 : (s == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return std::pow(omega, s) * std::exp(-omega / omega_c);
}

BathModes build_bath(const BathSpec& spec, std::size_t n_sites, const UnitSystem& units) {
  spec.validate();
  if (n_sites < 1) throw Error("bath: at least one site is required");
  const std::size_t Q = spec.modes_per_site;

  // Couplings are shaped in cm^-1, where g^2 ~ C''(w) / w^2, then scaled so that
  // sum_q w_q g_q^2 equals the reorganization energy.
  std::vector<double> w_cm(Q), shape(Q);
  double norm = 0.0;
  for (std::size_t q = 0; q < Q; ++q) {
    w_cm[q] = spec.omega0_cm + static_cast<double>(q) * spec.delta_omega_cm;
    const double c = spectral_density(w_cm[q], spec.ohmicity, spec.omega_c_cm);
    shape[q] = c / (w_cm[q] * w_cm[q]);
    norm += c / w_cm[q];
  }

  std::vector<double> g(Q, 0.0);
  if (spec.reorganization_cm > 0.0) {
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error("bath: spectral density has no weight on the grid; cannot normalize couplings");
    }
    for (std::size_t q = 0; q < Q; ++q) g[q] = std::sqrt(spec.reorganization_cm * shape[q] / norm);
  }

  BathModes bath;
  bath.n_sites = n_sites;
  bath.modes_per_site = Q;
  bath.omega.reserve(n_sites * Q);
  bath.g.reserve(n_sites * Q);
  for (std::size_t n = 0; n < n_sites; ++n) {
    for (std::size_t q = 0; q < Q; ++q) {
      bath.omega.push_back(units.to_angular(w_cm[q]));
      bath.g.push_back(g[q]);
    }
  }
  return bath;
}

EigenBasis diagonalize_symmetric(const RealMatrix& matrix) {
  const std::size_t n = matrix.rows;
  if (matrix.cols != n) throw Error("diagonalize: matrix must be square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = matrix(i, j), b = matrix(j, i);
      if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
        throw Error("diagonalize: matrix is not symmetric");
      }
    }
  }

  RealMatrix a = matrix;
  RealMatrix v = RealMatrix::identity(n);
  double scale = 0.0;
  for (double x : a.data) scale += x * x;
  scale = std::sqrt(scale);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > 1e-12 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenBasis basis;
  basis.energies_cm.resize(n);
  basis.vectors = RealMatrix(n, n);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t src = order[e];
    basis.energies_cm[e] = a(src, src);
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (std::abs(v(k, src)) > std::abs(v(big, src)) + 1e-12) big = k;
    }
    const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) basis.vectors(k, e) = sign * v(k, src);
  }
  return basis;
}

EigenBasis diagonalize(const ExcitonModel& model) {
  model.validate();
  const std::size_t n = model.n_sites();
  RealMatrix h = model.coupling_cm;
  for (std::size_t i = 0; i < n; ++i) h(i, i) = model.epsilon_cm[i];
  return diagonalize_symmetric(h);
}

double specific_heat(double beta, double omega) {
  if (!(beta > 0.0) || !(omega > 0.0)) throw Error("specific_heat: beta and omega must be positive");
  const double x = beta * omega;
  if (x < 1e-6) return 1.0 - x * x / 12.0;
  const double em = std::exp(-x);
  const double denom = -std::expm1(-x);
  return x * x * em / (denom * denom);
}

Hamiltonian make_hamiltonian(ExcitonModel model, BathModes bath, const UnitSystem& units) {
  model.validate();
  if (bath.n_sites != model.n_sites()) throw Error("bath and model disagree on the number of sites");
  Hamiltonian h;
  const std::size_t n = model.n_sites();
  h.epsilon.resize(n);
  h.coupling = RealMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h.epsilon[i] = units.to_angular(model.epsilon_cm[i]);
    for (std::size_t j = 0; j < n; ++j) h.coupling(i, j) = units.to_angular(model.coupling_cm(i, j));
  }
  h.model = std::move(model);
  h.bath = std::move(bath);
  h.units = units;
  return h;
}

} // namespace davydov
