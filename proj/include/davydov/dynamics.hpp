#pragma once

#include <cstddef>
#include <vector>

#include "davydov/model.hpp"
#include "davydov/state.hpp"

namespace davydov {

/// Time derivatives of a D2State, rad/ps.
struct DerivativeBuffer {
  std::vector<complex> dalpha;
  std::vector<complex> dlambda;
  std::vector<double> site_force;  // sum_q w_nq g_nq Re(lambda_nq) per site
};

struct IntegratorConfig {
  double dt = 1e-3;        // ps
  double t_total = 1.0;    // ps
  std::size_t record_stride = 10;  // steps between snapshots

  void validate() const;
  std::size_t total_steps() const;
};

/// Thrown when a step produces NaN or Inf.
class NonFiniteError : public Error {
 public:
  NonFiniteError(double time_ps, const std::string& what) : Error(what), time(time_ps) {}
  double time;
};

/// Number of whole steps of size dt in `duration`; throws if not an integer multiple.
std::size_t steps_in(double duration, double dt, const char* what);

/// h_mq = g_mq |alpha_m|^2 (site-local baths).
double drive_strength(const D2State& state, const BathModes& bath, std::size_t site, std::size_t mode);

/// Dirac-Frenkel equations of motion of the D2 ansatz:
///   dalpha_n/dt  = -i eps_n alpha_n - i sum_m J_nm alpha_m + i alpha_n V_n
///   dlambda_mq/dt = -i w_mq (lambda_mq - h_mq)
/// with V_n = 2 sum_q w_nq g_nq Re(lambda_nq) - sum_{m,q} w_mq h_mq Re(lambda_mq).
/// The second part of V_n is common to all sites (a global phase), and keeps
/// <H> exactly conserved.
void eom_rhs(const D2State& state, const Hamiltonian& h, DerivativeBuffer& out);
DerivativeBuffer eom_rhs(const D2State& state, const Hamiltonian& h);

/// Classical fourth-order Runge-Kutta with preallocated stages. One instance
/// per trajectory; not shareable across threads.
class Propagator {
 public:
  explicit Propagator(const Hamiltonian& h);

  /// Advances `state` in place by dt. Throws NonFiniteError on NaN/Inf.
  void step(D2State& state, double dt);
  /// n_steps consecutive steps.
  void advance(D2State& state, double dt, std::size_t n_steps);

 private:
  const Hamiltonian& h_;
  D2State stage_;
  DerivativeBuffer k1_, k2_, k3_, k4_;
};

D2State rk4_step(const D2State& state, const Hamiltonian& h, double dt);

/// Propagates for `duration` (an integer multiple of dt) with no scattering.
D2State propagate_segment(const D2State& state, const Hamiltonian& h, double duration, double dt);

} // namespace davydov
