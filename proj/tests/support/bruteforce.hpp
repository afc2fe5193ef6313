#pragma once

// Exact minimum teleport count for tiny instances.
//
// Cost of a run = sum over slice transitions of the qubits whose core
// changes, starting from the identity fill before slice 0. The minimum over
// per-slice valid assignments (capacity respected, interacting pairs
// co-located) is found by dynamic programming. The transition
//   next[s] = min over s' of cost[s'] + hamming(s', s)
// is a multi-source BFS on the graph of all C^N assignments where edges
// change one qubit's core; intermediate assignments need not be valid.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qtraffic/circuit.hpp"
#include "qtraffic/mapper.hpp"

namespace qtraffic::testing {

struct BruteForce {
  std::size_t n = 0;
  std::size_t cores = 0;
  std::size_t capacity = 0;
  std::size_t states = 1;

  BruteForce(std::size_t width, const Architecture& arch) : n(width), cores(arch.cores), capacity(arch.capacity) {
    for (std::size_t i = 0; i < n; ++i) states *= cores;
  }

  std::size_t core_of(std::size_t s, std::size_t q) const {
    for (std::size_t i = 0; i < q; ++i) s /= cores;
    return s % cores;
  }

  std::size_t encode(const CoreMap& m) const {
    std::size_t s = 0;
    for (std::size_t q = n; q-- > 0;) s = s * cores + m[q];
    return s;
  }

  bool valid(std::size_t s, std::span<const QubitPair> pairs) const {
    std::vector<std::size_t> occ(cores, 0);
    for (std::size_t q = 0; q < n; ++q) {
      if (++occ[core_of(s, q)] > capacity) return false;
    }
    for (const auto& [a, b] : pairs) {
      if (core_of(s, a) != core_of(s, b)) return false;
    }
    return true;
  }

  void relax(std::vector<std::size_t>& cost) const {
    constexpr auto kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<std::size_t>> buckets(n + 2);
    std::size_t base = kInf;
    for (std::size_t s = 0; s < states; ++s) base = std::min(base, cost[s]);
    if (base == kInf) return;
    // Every state is within n moves of the cheapest one, so only costs in
    // [base, base + n] matter.
    for (std::size_t s = 0; s < states; ++s) {
      if (cost[s] != kInf && cost[s] - base <= n) buckets[cost[s] - base].push_back(s);
      else cost[s] = kInf;
    }
    std::size_t pow = 1;
    std::vector<std::size_t> weight(n);
    for (std::size_t q = 0; q < n; ++q, pow *= cores) weight[q] = pow;
    for (std::size_t d = 0; d <= n; ++d) {
      for (std::size_t i = 0; i < buckets[d].size(); ++i) {
        const std::size_t s = buckets[d][i];
        if (cost[s] != base + d) continue;
        for (std::size_t q = 0; q < n; ++q) {
          const std::size_t c = core_of(s, q);
          for (std::size_t c2 = 0; c2 < cores; ++c2) {
            if (c2 == c) continue;
            const std::size_t t = s - c * weight[q] + c2 * weight[q];
            if (cost[t] > base + d + 1) {
              cost[t] = base + d + 1;
              buckets[d + 1].push_back(t);
            }
          }
        }
      }
    }
  }

  /// Minimum teleports, or empty when some slice has no valid assignment.
  std::optional<std::size_t> solve(const SlicedCircuit& sliced) const {
    constexpr auto kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> cost(states, kInf);
    cost[encode(identity_fill(n, Architecture{cores, capacity}))] = 0;
    for (std::size_t t = 0; t < sliced.depth(); ++t) {
      relax(cost);
      const auto pairs = sliced.interactions(t);
      bool any = false;
      for (std::size_t s = 0; s < states; ++s) {
        if (cost[s] == kInf) continue;
        if (!valid(s, pairs)) cost[s] = kInf;
        else any = true;
      }
      if (!any) return std::nullopt;
    }
    std::size_t best = kInf;
    for (const auto c : cost) best = std::min(best, c);
    return best;
  }
};

inline std::optional<std::size_t> brute_force_teleports(const SlicedCircuit& sliced, const Architecture& arch) {
  return BruteForce(sliced.width(), arch).solve(sliced);
}

/// True when every two-qubit gate already lies inside one core of the identity fill.
inline bool separable_under_identity(const SlicedCircuit& sliced, const Architecture& arch) {
  const auto m = identity_fill(sliced.width(), arch);
  for (std::size_t t = 0; t < sliced.depth(); ++t) {
    for (const auto& [a, b] : sliced.interactions(t)) {
      if (m[a] != m[b]) return false;
    }
  }
  return true;
}

}  // namespace qtraffic::testing
