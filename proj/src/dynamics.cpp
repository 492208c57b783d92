#include "davydov/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace davydov {

namespace {

constexpr complex kI{0.0, 1.0};

void resize_like(DerivativeBuffer& buf, const D2State& s) {
  buf.dalpha.resize(s.alpha.size());
  buf.dlambda.resize(s.lambda.size());
}

// out = base + c * k, for both alpha and lambda blocks.
void axpy(const D2State& base, double c, const DerivativeBuffer& k, D2State& out) {
  const std::size_t na = base.alpha.size();
  for (std::size_t i = 0; i < na; ++i) out.alpha[i] = base.alpha[i] + c * k.dalpha[i];
  const std::size_t nl = 2 * base.lambda.size();
  const double* src = reinterpret_cast<const double*>(base.lambda.data());
  const double* dk = reinterpret_cast<const double*>(k.dlambda.data());
  double* dst = reinterpret_cast<double*>(out.lambda.data());
  for (std::size_t i = 0; i < nl; ++i) dst[i] = src[i] + c * dk[i];
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw Error("run.dt_fs: must be > 0");
  if (!(t_total >= dt)) throw Error("run.t_total_ps: must be >= dt");
  if (record_stride < 1) throw Error("run.snapshot_fs: must be at least one step");
  steps_in(t_total, dt, "run.t_total_ps");
}

std::size_t IntegratorConfig::total_steps() const { return steps_in(t_total, dt, "run.t_total_ps"); }

std::size_t steps_in(double duration, double dt, const char* what) {
  if (!(dt > 0.0)) throw Error("dt must be > 0");
  if (duration < 0.0) {
    std::ostringstream os;
    os << what << ": duration must be non-negative";
    throw Error(os.str());
  }
  const double ratio = duration / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << what << ": " << duration << " ps is not an integer multiple of dt = " << dt << " ps";
    throw Error(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

double drive_strength(const D2State& state, const BathModes& bath, std::size_t site, std::size_t mode) {
  if (site >= bath.n_sites || mode >= bath.modes_per_site || site >= state.n_sites()) {
    throw Error("drive_strength: index out of range");
  }
  return bath.g_at(site, mode) * std::norm(state.alpha[site]);
}

void eom_rhs(const D2State& state, const Hamiltonian& h, DerivativeBuffer& out) {
  const std::size_t n = h.n_sites();
  const std::size_t Q = h.modes_per_site();
  resize_like(out, state);

  const double* w = h.bath.omega.data();
  const double* g = h.bath.g.data();
  // std::complex guarantees array-of-two-doubles layout; the flat view lets the
  // mode loop vectorize.
  const double* lam = reinterpret_cast<const double*>(state.lambda.data());
  double* dlam = reinterpret_cast<double*>(out.dlambda.data());

  // Per site: population and S_m = sum_q w g Re(lambda). Common phase term C = sum_m P_m S_m.
  double common = 0.0;
  out.site_force.resize(n);
  double* S = out.site_force.data();
  for (std::size_t m = 0; m < n; ++m) {
    const double pop = std::norm(state.alpha[m]);
    const std::size_t off = m * Q;
    const double* __restrict wm = w + off;
    const double* __restrict gm = g + off;
    const double* __restrict lm = lam + 2 * off;
    double* __restrict dm = dlam + 2 * off;
    for (std::size_t q = 0; q < Q; ++q) {
      // -i w (lambda - h) = w Im(lambda) - i w (Re(lambda) - g P)
      dm[2 * q] = wm[q] * lm[2 * q + 1];
      dm[2 * q + 1] = -wm[q] * (lm[2 * q] - gm[q] * pop);
    }
    // Four partial sums in a fixed order: pipelined and still bit-reproducible.
    double part[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t q = 0;
    for (; q + 4 <= Q; q += 4) {
      part[0] += wm[q] * gm[q] * lm[2 * q];
      part[1] += wm[q + 1] * gm[q + 1] * lm[2 * q + 2];
      part[2] += wm[q + 2] * gm[q + 2] * lm[2 * q + 4];
      part[3] += wm[q + 3] * gm[q + 3] * lm[2 * q + 6];
    }
    for (; q < Q; ++q) part[q & 3] += wm[q] * gm[q] * lm[2 * q];
    S[m] = (part[0] + part[1]) + (part[2] + part[3]);
    common += pop * S[m];
  }

  for (std::size_t i = 0; i < n; ++i) {
    complex hal = h.epsilon[i] * state.alpha[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) hal += h.coupling(i, j) * state.alpha[j];
    }
    const double v = 2.0 * S[i] - common;
    out.dalpha[i] = -kI * hal + kI * v * state.alpha[i];
  }
}

DerivativeBuffer eom_rhs(const D2State& state, const Hamiltonian& h) {
  check_dimensions(state, h);
  DerivativeBuffer out;
  eom_rhs(state, h, out);
  return out;
}

Propagator::Propagator(const Hamiltonian& h) : h_(h), stage_(h.n_sites(), h.modes_per_site()) {}

void Propagator::step(D2State& state, double dt) {
  eom_rhs(state, h_, k1_);
  axpy(state, 0.5 * dt, k1_, stage_);
  eom_rhs(stage_, h_, k2_);
  axpy(state, 0.5 * dt, k2_, stage_);
  eom_rhs(stage_, h_, k3_);
  axpy(state, dt, k3_, stage_);
  eom_rhs(stage_, h_, k4_);

  const double c1 = dt / 6.0;
  const double c2 = dt / 3.0;
  double guard = 0.0;
  for (std::size_t i = 0; i < state.alpha.size(); ++i) {
    state.alpha[i] += c1 * (k1_.dalpha[i] + k4_.dalpha[i]) + c2 * (k2_.dalpha[i] + k3_.dalpha[i]);
    guard += state.alpha[i].real() + state.alpha[i].imag();
  }
  double* lam = reinterpret_cast<double*>(state.lambda.data());
  const double* d1 = reinterpret_cast<const double*>(k1_.dlambda.data());
  const double* d2 = reinterpret_cast<const double*>(k2_.dlambda.data());
  const double* d3 = reinterpret_cast<const double*>(k3_.dlambda.data());
  const double* d4 = reinterpret_cast<const double*>(k4_.dlambda.data());
  const std::size_t nl = 2 * state.lambda.size();
  double part[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < nl; ++i) {
    lam[i] += c1 * (d1[i] + d4[i]) + c2 * (d2[i] + d3[i]);
    part[i & 3] += lam[i];
  }
  guard += (part[0] + part[1]) + (part[2] + part[3]);
  state.t += dt;
  if (!std::isfinite(guard)) {
    std::ostringstream os;
    os << "non-finite state at t = " << state.t << " ps";
    throw NonFiniteError(state.t, os.str());
  }
}

void Propagator::advance(D2State& state, double dt, std::size_t n_steps) {
  for (std::size_t s = 0; s < n_steps; ++s) step(state, dt);
}

D2State rk4_step(const D2State& state, const Hamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw Error("rk4_step: dt must be > 0");
  check_dimensions(state, h);
  D2State next = state;
  Propagator(h).step(next, dt);
  return next;
}

D2State propagate_segment(const D2State& state, const Hamiltonian& h, double duration, double dt) {
  check_dimensions(state, h);
  const std::size_t n = steps_in(duration, dt, "segment duration");
  D2State next = state;
  Propagator(h).advance(next, dt, n);
  return next;
}

} // namespace davydov
