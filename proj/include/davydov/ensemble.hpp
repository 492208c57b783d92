#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "davydov/accumulator.hpp"
#include "davydov/dynamics.hpp"
#include "davydov/model.hpp"
#include "davydov/state.hpp"
#include "davydov/thermalization.hpp"

namespace davydov {

/// Everything that determines an ensemble run.
struct RunConfig {
  ExcitonModel model;
  BathSpec bath;
  std::vector<ThermalLaw> initial;  // one per site
  ThermalizationParams thermalization;
  bool thermalize = true;           // false skips scattering entirely
  IntegratorConfig integrator;
  std::uint64_t n_trajectories = 1;
  std::uint64_t master_seed = 0;
  Excitation excitation;

  /// Full validation: shapes, units, tau/dt and t_total/tau alignment.
  void validate() const;
  std::size_t steps_per_interval() const;
  std::size_t n_snapshots() const;
  std::vector<double> snapshot_times() const;
};

/// Model objects derived once from a RunConfig and shared read-only by workers.
struct Setup {
  Hamiltonian hamiltonian;
  EigenBasis basis;
};

Setup prepare(const RunConfig& config);

/// Seed of trajectory `index`: mix64(master_seed + mix64(index)). A bijection in
/// `index` for fixed master_seed, so distinct indices never share a stream.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Called with (snapshot number, state) at every recorded time.
using SnapshotSink = std::function<void(std::size_t, const D2State&)>;

/// Propagates one trajectory: thermal initial state, then alternating
/// tau-segments of RK4 propagation and a scattering round. Returns the total
/// number of scattering events. Throws NonFiniteError on divergence.
std::size_t run_trajectory(const RunConfig& config, const Setup& setup, std::uint64_t index,
                           const SnapshotSink& sink);

/// All snapshots of one trajectory (debugging, tests).
struct TrajectoryRecord {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<D2State> snapshots;
  std::size_t scatter_events = 0;
};
TrajectoryRecord run_trajectory(const RunConfig& config, const Setup& setup, std::uint64_t index);

/// Moments of a single trajectory in the ensemble layout.
TrajectoryMoments trajectory_moments(const RunConfig& config, const Setup& setup, std::uint64_t index);

struct EnsembleOptions {
  std::size_t threads = 0;  // 0: DAVYDOV_THREADS or hardware concurrency
  std::uint64_t first = 0;  // trajectory index range [first, last)
  std::optional<std::uint64_t> last;
  /// Optional per-trajectory observer (serialized under a lock).
  std::function<void(std::uint64_t, const TrajectoryMoments&)> observer;
};

/// Default worker count: DAVYDOV_THREADS if set, otherwise hardware concurrency.
std::size_t default_threads();

/// Runs trajectories [first, last) on a static contiguous partition and merges
/// worker accumulators in worker order. Throws if more than 1% fail.
EnsembleAccumulator run_ensemble(const RunConfig& config, const Setup& setup,
                                 const EnsembleOptions& options = {});
EnsembleAccumulator run_ensemble(const RunConfig& config, const EnsembleOptions& options = {});

/// Maximum failed fraction tolerated by run_ensemble.
inline constexpr double kMaxFailureFraction = 0.01;

} // namespace davydov
