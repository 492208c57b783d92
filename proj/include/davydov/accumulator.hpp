#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace davydov {

/// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum);
    add(other.comp);
  }
  double value() const { return sum + comp; }
};

/// Offsets of each moment inside one snapshot row. N sites, Q modes per site.
struct MomentLayout {
  std::size_t n_sites = 0;
  std::size_t modes_per_site = 0;

  std::size_t n_modes() const { return n_sites * modes_per_site; }
  // <alpha_n^* alpha_m>, interleaved re/im, row-major (n, m)
  std::size_t coherence() const { return 0; }
  std::size_t exciton_population() const { return 2 * n_sites * n_sites; }
  std::size_t exciton_population_sq() const { return exciton_population() + n_sites; }
  std::size_t lambda_re() const { return exciton_population_sq() + n_sites; }
  std::size_t lambda_im() const { return lambda_re() + n_modes(); }
  std::size_t lambda_re2() const { return lambda_im() + n_modes(); }
  std::size_t lambda_im2() const { return lambda_re2() + n_modes(); }
  std::size_t energy() const { return lambda_im2() + n_modes(); }
  std::size_t width() const { return energy() + 1; }
};

/// Snapshot moments of a single trajectory, plain doubles (row-major, one row per snapshot).
struct TrajectoryMoments {
  MomentLayout layout;
  std::size_t n_snapshots = 0;
  std::vector<double> rows;
  std::size_t scatter_events = 0;

  TrajectoryMoments() = default;
  TrajectoryMoments(const MomentLayout& l, std::size_t snapshots)
      : layout(l), n_snapshots(snapshots), rows(snapshots * l.width(), 0.0) {}

  double* row(std::size_t snapshot) { return rows.data() + snapshot * layout.width(); }
  const double* row(std::size_t snapshot) const { return rows.data() + snapshot * layout.width(); }
};

struct TrajectoryFailure {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  double time = 0.0;
  std::string message;
};

/// Ensemble sums of the per-snapshot moments. Memory is independent of the
/// number of trajectories.
class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  EnsembleAccumulator(const MomentLayout& layout, std::vector<double> times);

  void add(const TrajectoryMoments& moments);
  void record_failure(TrajectoryFailure failure);
  /// Adds all sums of `other`; layouts and time grids must agree.
  void merge(const EnsembleAccumulator& other);

  const MomentLayout& layout() const { return layout_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t n_snapshots() const { return times_.size(); }
  std::uint64_t count() const { return count_; }
  std::uint64_t scatter_events() const { return scatter_events_; }
  const std::vector<TrajectoryFailure>& failures() const { return failures_; }

  /// Ensemble mean of entry `offset` of snapshot `snapshot`.
  double mean(std::size_t snapshot, std::size_t offset) const;
  const CompensatedSum& sum(std::size_t snapshot, std::size_t offset) const {
    return sums_[snapshot * layout_.width() + offset];
  }

  /// Versioned binary checkpoint; see README for the layout.
  void save(std::ostream& os) const;
  static EnsembleAccumulator load(std::istream& is);
  void save(const std::string& path) const;
  static EnsembleAccumulator load(const std::string& path);

  bool operator==(const EnsembleAccumulator& other) const;

 private:
  MomentLayout layout_;
  std::vector<double> times_;
  std::vector<CompensatedSum> sums_;
  std::uint64_t count_ = 0;
  std::uint64_t scatter_events_ = 0;
  std::vector<TrajectoryFailure> failures_;
};

} // namespace davydov
