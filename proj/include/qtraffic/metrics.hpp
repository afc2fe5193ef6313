#pragma once

// Spatio-temporal traffic metrics of a mapped program.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtraffic/circuit.hpp"
#include "qtraffic/mapper.hpp"

namespace qtraffic {

struct MetricsOptions {
  bool count_measure = true;        // MEASURE counts as a computation operation
  bool include_idle_qubits = true;  // zero-op physical qubits join the hotspotness population
  bool virtual_lifespan = false;    // measure lifespan on virtual slices instead of the physical timeline

  friend bool operator==(const MetricsOptions&, const MetricsOptions&) = default;
};

/// Population variance divided by mean. Empty when the mean is zero.
template <class T>
std::optional<double> variance_to_mean(std::span<const T> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const T v : values) sum += static_cast<double>(v);
  const double mean = sum / static_cast<double>(values.size());
  if (mean == 0.0) return std::nullopt;
  double sq = 0.0;
  for (const T v : values) {
    const double d = static_cast<double>(v) - mean;
    sq += d * d;
  }
  return (sq / static_cast<double>(values.size())) / mean;
}

template <class T>
std::optional<double> variance_to_mean(const std::vector<T>& values) {
  return variance_to_mean(std::span<const T>(values));
}

/// (ops - telep) / (ops + telep); empty when both are zero.
inline std::optional<double> ccr(double mean_ops, double mean_telep) {
  const double total = mean_ops + mean_telep;
  if (total == 0.0) return std::nullopt;
  return (mean_ops - mean_telep) / total;
}

enum class SliceKind : std::uint8_t { Idle, Computation, Communication, Parallel };

struct WorkloadSeries {
  std::vector<SliceKind> kinds;              // per physical timeslice
  std::vector<std::size_t> gates_per_slice;  // computation gates executing
  std::vector<std::size_t> telep_per_slice;  // teleports starting
  std::size_t communication = 0;
  std::size_t parallel = 0;
  std::size_t computation = 0;
  std::size_t idle = 0;
};

namespace detail {

inline bool counted(const Gate& g, const MetricsOptions& opt) {
  return opt.count_measure || g.kind != GateKind::Measure;
}

}  // namespace detail

/// Computation operations executed on each physical qubit.
inline std::vector<std::size_t> computation_ops_per_phys(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  if (opt.count_measure) return mp.counters.ops_per_phys;
  std::vector<std::size_t> ops(mp.arch.physical_qubits(), 0);
  const auto gs = mp.circuit().gates();
  for (std::size_t g = 0; g < gs.size(); ++g) {
    if (!detail::counted(gs[g], opt)) continue;
    for (int k = 0; k < gs[g].arity(); ++k) ++ops[mp.placements[g].phys[k]];
  }
  return ops;
}

/// Computation plus teleportation operations per physical qubit.
inline std::vector<std::size_t> ops_per_qubit(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  auto ops = computation_ops_per_phys(mp, opt);
  for (std::size_t p = 0; p < ops.size(); ++p) ops[p] += mp.counters.telep_per_phys[p];
  if (!opt.include_idle_qubits) std::erase(ops, std::size_t{0});
  return ops;
}

inline std::optional<double> compute_ccr(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  const auto ops = computation_ops_per_phys(mp, opt);
  double total_ops = 0.0;
  for (const auto v : ops) total_ops += static_cast<double>(v);
  const double qubits = static_cast<double>(mp.arch.physical_qubits());
  return ccr(total_ops / qubits, static_cast<double>(mp.teleports.size()) / qubits);
}

inline std::optional<double> qubit_hotspotness(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  return variance_to_mean(ops_per_qubit(mp, opt));
}

inline std::optional<double> core_hotspotness(const MappedProgram& mp) {
  return variance_to_mean(mp.counters.telep_per_core);
}

/// Most gates touching any one virtual qubit.
inline std::size_t longest_gate_sequence(const Circuit& circuit, const MetricsOptions& opt = {}) {
  const auto counts = circuit.gates_per_qubit(opt.count_measure);
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

inline std::size_t longest_gate_sequence(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  return longest_gate_sequence(mp.circuit(), opt);
}

/// Longest span between the first and last gate on a virtual qubit.
inline std::size_t qubit_lifespan(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  const std::size_t n = mp.sliced.width();
  std::vector<std::size_t> first(n, SIZE_MAX);
  std::vector<std::size_t> last(n, 0);
  const auto gs = mp.circuit().gates();
  for (std::size_t g = 0; g < gs.size(); ++g) {
    if (!detail::counted(gs[g], opt)) continue;
    const std::size_t t = opt.virtual_lifespan ? mp.sliced.slice_of(g) : mp.placements[g].time;
    for (const Qubit q : gs[g].operands()) {
      first[q] = std::min(first[q], t);
      last[q] = std::max(last[q], t);
    }
  }
  std::size_t span = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (first[q] != SIZE_MAX) span = std::max(span, last[q] - first[q]);
  }
  return span;
}

inline std::optional<double> burstiness(const MappedProgram& mp) {
  return variance_to_mean(mp.counters.telep_per_slice);
}

inline std::size_t temporal_locality(const MappedProgram& mp) {
  std::size_t total = 0;
  for (const auto v : mp.counters.telep_per_slice) total += v;
  return total;
}

/// Core-residency interval lengths of every virtual qubit on the physical
/// timeline. A move splits residency at the start of its wave; empty
/// intervals (moves at time 0) are dropped.
inline std::vector<std::size_t> residency_intervals(const MappedProgram& mp) {
  std::vector<std::vector<std::size_t>> moves(mp.sliced.width());
  for (const auto& e : mp.teleports) moves[e.qubit].push_back(e.start);
  std::vector<std::size_t> out;
  for (auto& m : moves) {
    std::sort(m.begin(), m.end());
    std::size_t from = 0;
    for (const std::size_t s : m) {
      if (s > from) out.push_back(s - from);
      from = s;
    }
    if (mp.t_exec > from) out.push_back(mp.t_exec - from);
  }
  return out;
}

/// Mean core stay-time over the execution time; empty when t_exec is 0.
inline std::optional<double> spatial_locality(const MappedProgram& mp) {
  if (mp.t_exec == 0) return std::nullopt;
  const auto intervals = residency_intervals(mp);
  if (intervals.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto v : intervals) sum += static_cast<double>(v);
  return sum / static_cast<double>(intervals.size()) / static_cast<double>(mp.t_exec);
}

inline WorkloadSeries workload_series(const MappedProgram& mp) {
  WorkloadSeries w;
  const std::size_t cols = mp.t_exec;
  w.gates_per_slice.assign(cols, 0);
  w.telep_per_slice = mp.counters.telep_per_slice;
  for (const auto& pl : mp.placements) ++w.gates_per_slice[pl.time];
  std::vector<bool> comm(cols, false);
  for (const auto& e : mp.teleports) {
    for (std::size_t s = e.start; s < e.start + mp.tau && s < cols; ++s) comm[s] = true;
  }
  w.kinds.resize(cols);
  for (std::size_t s = 0; s < cols; ++s) {
    const bool compute = w.gates_per_slice[s] > 0;
    if (compute && comm[s]) {
      w.kinds[s] = SliceKind::Parallel;
      ++w.parallel;
    } else if (comm[s]) {
      w.kinds[s] = SliceKind::Communication;
      ++w.communication;
    } else if (compute) {
      w.kinds[s] = SliceKind::Computation;
      ++w.computation;
    } else {
      w.kinds[s] = SliceKind::Idle;
      ++w.idle;
    }
  }
  return w;
}

/// All metrics of one run. Metrics with a zero denominator are empty
/// (reported as not applicable).
struct MetricsReport {
  std::string circuit;
  std::size_t width = 0;
  std::size_t cores = 0;
  std::size_t capacity = 0;
  double sigma = 0.0;
  std::size_t tau = 1;
  std::size_t gates = 0;
  std::size_t two_qubit_gates = 0;
  std::size_t depth = 0;
  std::size_t t_exec = 0;

  std::optional<double> ccr;
  std::optional<double> qubit_hotspotness;
  std::optional<double> core_hotspotness;
  std::size_t longest_gate_sequence = 0;
  std::size_t qubit_lifespan = 0;
  std::optional<double> burstiness;
  std::size_t temporal_locality = 0;
  std::optional<double> spatial_locality;

  std::vector<std::size_t> ops_per_qubit;
  std::vector<std::size_t> telep_per_core;
  std::vector<std::size_t> telep_per_slice;
  std::vector<std::size_t> gates_per_slice;
  std::size_t communication_slices = 0;
  std::size_t parallel_slices = 0;
  std::size_t computation_slices = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline MetricsReport compute_metrics(const MappedProgram& mp, const MetricsOptions& opt = {}) {
  MetricsReport r;
  r.circuit = mp.circuit().name();
  r.width = mp.sliced.width();
  r.cores = mp.arch.cores;
  r.capacity = mp.arch.capacity;
  r.sigma = mp.sigma;
  r.tau = mp.tau;
  r.gates = mp.circuit().size();
  r.two_qubit_gates = mp.circuit().two_qubit_count();
  r.depth = mp.sliced.depth();
  r.t_exec = mp.t_exec;

  r.ccr = compute_ccr(mp, opt);
  r.qubit_hotspotness = qubit_hotspotness(mp, opt);
  r.core_hotspotness = core_hotspotness(mp);
  r.longest_gate_sequence = longest_gate_sequence(mp, opt);
  r.qubit_lifespan = qubit_lifespan(mp, opt);
  r.burstiness = burstiness(mp);
  r.temporal_locality = temporal_locality(mp);
  r.spatial_locality = spatial_locality(mp);

  r.ops_per_qubit = ops_per_qubit(mp, opt);
  r.telep_per_core = mp.counters.telep_per_core;
  const auto w = workload_series(mp);
  r.telep_per_slice = w.telep_per_slice;
  r.gates_per_slice = w.gates_per_slice;
  r.communication_slices = w.communication;
  r.parallel_slices = w.parallel;
  r.computation_slices = w.computation;
  return r;
}

}  // namespace qtraffic
