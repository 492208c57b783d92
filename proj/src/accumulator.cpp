#include "davydov/accumulator.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "davydov/model.hpp"

namespace davydov {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian");

constexpr char kMagic[8] = {'D', '2', 'A', 'C', 'C', 'U', 'M', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("checkpoint: truncated file");
  return v;
}

}  // namespace

EnsembleAccumulator::EnsembleAccumulator(const MomentLayout& layout, std::vector<double> times)
    : layout_(layout), times_(std::move(times)), sums_(times_.size() * layout.width()) {}

void EnsembleAccumulator::add(const TrajectoryMoments& moments) {
  if (moments.n_snapshots != n_snapshots() || moments.layout.width() != layout_.width()) {
    throw Error("accumulator: trajectory moments do not match the ensemble layout");
  }
  const std::size_t total = sums_.size();
  for (std::size_t i = 0; i < total; ++i) sums_[i].add(moments.rows[i]);
  ++count_;
  scatter_events_ += moments.scatter_events;
}

void EnsembleAccumulator::record_failure(TrajectoryFailure failure) {
  failures_.push_back(std::move(failure));
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
  if (other.layout_.n_sites != layout_.n_sites || other.layout_.modes_per_site != layout_.modes_per_site ||
      other.times_ != times_) {
    throw Error("accumulator: cannot merge ensembles with different layouts or time grids");
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i].merge(other.sums_[i]);
  count_ += other.count_;
  scatter_events_ += other.scatter_events_;
  failures_.insert(failures_.end(), other.failures_.begin(), other.failures_.end());
}

double EnsembleAccumulator::mean(std::size_t snapshot, std::size_t offset) const {
  if (count_ == 0) throw Error("accumulator: no successful trajectories");
  return sum(snapshot, offset).value() / static_cast<double>(count_);
}

void EnsembleAccumulator::save(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put<std::uint64_t>(os, layout_.n_sites);
  put<std::uint64_t>(os, layout_.modes_per_site);
  put<std::uint64_t>(os, times_.size());
  put<std::uint64_t>(os, count_);
  put<std::uint64_t>(os, scatter_events_);
  for (double t : times_) put(os, t);
  for (const auto& s : sums_) {
    put(os, s.sum);
    put(os, s.comp);
  }
  put<std::uint64_t>(os, failures_.size());
  for (const auto& f : failures_) {
    put(os, f.index);
    put(os, f.seed);
    put(os, f.time);
    put<std::uint64_t>(os, f.message.size());
    os.write(f.message.data(), static_cast<std::streamsize>(f.message.size()));
  }
  if (!os) throw Error("checkpoint: write failed");
}

EnsembleAccumulator EnsembleAccumulator::load(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("checkpoint: bad magic");
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw Error("checkpoint: unsupported version " + std::to_string(version));
  MomentLayout layout;
  layout.n_sites = get<std::uint64_t>(is);
  layout.modes_per_site = get<std::uint64_t>(is);
  const auto n_snap = get<std::uint64_t>(is);
  std::vector<double> times(n_snap);
  const auto count = get<std::uint64_t>(is);
  const auto events = get<std::uint64_t>(is);
  for (auto& t : times) t = get<double>(is);
  EnsembleAccumulator acc(layout, std::move(times));
  for (auto& s : acc.sums_) {
    s.sum = get<double>(is);
    s.comp = get<double>(is);
  }
  acc.count_ = count;
  acc.scatter_events_ = events;
  const auto n_fail = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < n_fail; ++i) {
    TrajectoryFailure f;
    f.index = get<std::uint64_t>(is);
    f.seed = get<std::uint64_t>(is);
    f.time = get<double>(is);
    f.message.resize(get<std::uint64_t>(is));
    is.read(f.message.data(), static_cast<std::streamsize>(f.message.size()));
    if (!is) throw Error("checkpoint: truncated file");
    acc.failures_.push_back(std::move(f));
  }
  return acc;
}

void EnsembleAccumulator::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("checkpoint: cannot open " + path + " for writing");
  save(os);
}

EnsembleAccumulator EnsembleAccumulator::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("checkpoint: cannot open " + path);
  return load(is);
}

bool EnsembleAccumulator::operator==(const EnsembleAccumulator& other) const {
  if (layout_.n_sites != other.layout_.n_sites || layout_.modes_per_site != other.layout_.modes_per_site ||
      times_ != other.times_ || count_ != other.count_ || scatter_events_ != other.scatter_events_ ||
      failures_.size() != other.failures_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    if (sums_[i].sum != other.sums_[i].sum || sums_[i].comp != other.sums_[i].comp) return false;
  }
  return true;
}

} // namespace davydov
