#include "davydov/ensemble.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace davydov {

void RunConfig::validate() const {
  model.validate();
  bath.validate();
  if (initial.size() != model.n_sites()) {
    throw Error("thermal.T0_K: expected one temperature per site (or a scalar)");
  }
  for (const auto& law : initial) {
    if (!(law.temperature_K >= 0.0)) throw Error("thermal.T0_K: temperatures must be >= 0");
  }
  thermalization.validate();
  integrator.validate();
  if (n_trajectories < 1) throw Error("run.trajectories: must be >= 1");
  if (excitation.index >= model.n_sites()) throw Error("excitation.index: out of range");
  if (integrator.total_steps() % integrator.record_stride != 0) {
    throw Error("run.snapshot_fs: t_total must be an integer multiple of the snapshot interval");
  }
  if (thermalize) {
    const std::size_t interval = steps_per_interval();
    if (interval == 0) throw Error("thermal.tau_ps: must be at least one step");
    if (integrator.total_steps() % interval != 0) {
      throw Error("thermal.tau_ps: t_total must be an integer multiple of tau");
    }
  }
}

std::size_t RunConfig::steps_per_interval() const {
  return steps_in(thermalization.tau, integrator.dt, "thermal.tau_ps");
}

std::size_t RunConfig::n_snapshots() const {
  return integrator.total_steps() / integrator.record_stride + 1;
}

std::vector<double> RunConfig::snapshot_times() const {
  std::vector<double> t(n_snapshots());
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = static_cast<double>(k * integrator.record_stride) * integrator.dt;
  }
  return t;
}

Setup prepare(const RunConfig& config) {
  config.validate();
  Setup s;
  auto modes = build_bath(config.bath, config.model.n_sites());
  s.hamiltonian = make_hamiltonian(config.model, std::move(modes));
  s.basis = diagonalize(config.model);
  return s;
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed + mix64(index));
}

std::size_t run_trajectory(const RunConfig& config, const Setup& setup, std::uint64_t index,
                           const SnapshotSink& sink) {
  const Hamiltonian& h = setup.hamiltonian;
  RandomStream rng(trajectory_seed(config.master_seed, index));
  D2State state = init_state(h, setup.basis, config.initial, config.excitation, rng);
  if (sink) sink(0, state);

  const double dt = config.integrator.dt;
  const std::size_t total = config.integrator.total_steps();
  const std::size_t stride = config.integrator.record_stride;
  const std::size_t interval = config.thermalize ? config.steps_per_interval() : total;

  Propagator propagator(h);
  std::size_t events = 0;
  std::size_t step = 0;
  while (step < total) {
    const std::size_t next_scatter = (step / interval + 1) * interval;
    const std::size_t next_snapshot = (step / stride + 1) * stride;
    const std::size_t next = std::min({next_scatter, next_snapshot, total});
    propagator.advance(state, dt, next - step);
    step = next;
    state.t = static_cast<double>(step) * dt;
    if (config.thermalize && step % interval == 0) {
      events += scatter(state, h.bath, config.thermalization, rng, h.units);
    }
    if (step % stride == 0 && sink) sink(step / stride, state);
  }
  return events;
}

TrajectoryRecord run_trajectory(const RunConfig& config, const Setup& setup, std::uint64_t index) {
  TrajectoryRecord record;
  record.index = index;
  record.seed = trajectory_seed(config.master_seed, index);
  record.snapshots.reserve(config.n_snapshots());
  record.scatter_events = run_trajectory(
      config, setup, index, [&](std::size_t, const D2State& s) { record.snapshots.push_back(s); });
  return record;
}

TrajectoryMoments trajectory_moments(const RunConfig& config, const Setup& setup, std::uint64_t index) {
  const Hamiltonian& h = setup.hamiltonian;
  const MomentLayout layout{h.n_sites(), h.modes_per_site()};
  TrajectoryMoments m(layout, config.n_snapshots());
  const std::size_t n = layout.n_sites;
  const std::size_t nq = layout.n_modes();
  const RealMatrix& psi = setup.basis.vectors;

  m.scatter_events = run_trajectory(config, setup, index, [&](std::size_t snap, const D2State& s) {
    double* row = m.row(snap);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const complex c = std::conj(s.alpha[i]) * s.alpha[j];
        row[layout.coherence() + 2 * (i * n + j)] = c.real();
        row[layout.coherence() + 2 * (i * n + j) + 1] = c.imag();
      }
    }
    for (std::size_t e = 0; e < n; ++e) {
      complex amp = 0.0;
      for (std::size_t k = 0; k < n; ++k) amp += psi(k, e) * s.alpha[k];
      const double pop = std::norm(amp);
      row[layout.exciton_population() + e] = pop;
      row[layout.exciton_population_sq() + e] = pop * pop;
    }
    for (std::size_t k = 0; k < nq; ++k) {
      const double re = s.lambda[k].real();
      const double im = s.lambda[k].imag();
      row[layout.lambda_re() + k] = re;
      row[layout.lambda_im() + k] = im;
      row[layout.lambda_re2() + k] = re * re;
      row[layout.lambda_im2() + k] = im * im;
    }
    row[layout.energy()] = total_energy(s, h);
  });
  return m;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("DAVYDOV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

EnsembleAccumulator run_ensemble(const RunConfig& config, const Setup& setup, const EnsembleOptions& options) {
  const std::uint64_t first = options.first;
  const std::uint64_t last = options.last.value_or(config.n_trajectories);
  if (last < first) throw Error("run_ensemble: empty or inverted trajectory range");
  const std::uint64_t count = last - first;

  const MomentLayout layout{setup.hamiltonian.n_sites(), setup.hamiltonian.modes_per_site()};
  const auto times = config.snapshot_times();

  std::size_t workers = options.threads == 0 ? default_threads() : options.threads;
  workers = static_cast<std::size_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, count)));

  std::vector<EnsembleAccumulator> partial(workers, EnsembleAccumulator(layout, times));
  std::mutex observer_lock;
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](std::size_t w) {
    // Static contiguous partition: worker w owns [begin, end).
    const std::uint64_t begin = first + count * w / workers;
    const std::uint64_t end = first + count * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) {
      try {
        TrajectoryMoments moments = trajectory_moments(config, setup, i);
        partial[w].add(moments);
        if (options.observer) {
          std::lock_guard lock(observer_lock);
          options.observer(i, moments);
        }
      } catch (const NonFiniteError& e) {
        partial[w].record_failure({i, trajectory_seed(config.master_seed, i), e.time, e.what()});
      } catch (...) {
        errors[w] = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EnsembleAccumulator total(layout, times);
  for (const auto& p : partial) total.merge(p);

  const double failed = static_cast<double>(total.failures().size());
  if (count > 0 && failed > kMaxFailureFraction * static_cast<double>(count)) {
    std::ostringstream os;
    os << total.failures().size() << " of " << count << " trajectories diverged (first: index "
       << total.failures().front().index << ", seed " << total.failures().front().seed << ", t = "
       << total.failures().front().time << " ps)";
    throw Error(os.str());
  }
  return total;
}

EnsembleAccumulator run_ensemble(const RunConfig& config, const EnsembleOptions& options) {
  const Setup setup = prepare(config);
  return run_ensemble(config, setup, options);
}

} // namespace davydov
