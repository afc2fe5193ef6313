#pragma once

// Small random layered circuits for oracle comparisons: N <= 8, C <= 3,
// at most 6 layers, each layer a random matching plus single-qubit gates,
// so ASAP depth never exceeds the layer count. Every fourth seed keeps all
// interactions inside the cores of the identity fill.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "qtraffic/circuit.hpp"
#include "qtraffic/mapper.hpp"
#include "qtraffic/random_graph.hpp"

namespace qtraffic::testing {

struct Instance {
  Circuit circuit;
  Architecture arch;
};

inline Instance random_instance(std::uint64_t seed) {
  PortableRng rng(seed * 7919 + 17);
  const std::size_t n = 3 + rng.below(6);
  const std::size_t cores = 1 + rng.below(3);
  const std::size_t min_cap = (n + cores - 1) / cores;
  const std::size_t cap = std::max<std::size_t>(min_cap + rng.below(2), 1);
  const std::size_t layers = 1 + rng.below(6);
  const bool local = seed % 4 == 0;
  const Architecture arch{cores, cap};
  const auto home = identity_fill(n, arch);

  Circuit c("random_" + std::to_string(seed), n);
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<Qubit> order(n);
    for (Qubit q = 0; q < n; ++q) order[q] = q;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<bool> used(n, false);
    const std::size_t want = rng.below(n / 2 + 1);
    std::size_t made = 0;
    for (std::size_t i = 0; i < n && made < want; ++i) {
      for (std::size_t j = i + 1; j < n && made < want; ++j) {
        const Qubit a = order[i];
        const Qubit b = order[j];
        if (used[a] || used[b]) continue;
        if (local && home[a] != home[b]) continue;
        c.append(gates::cz(a, b));
        used[a] = used[b] = true;
        ++made;
      }
    }
    for (Qubit q = 0; q < n; ++q) {
      if (!used[q] && rng.bernoulli(0.5)) c.append(gates::h(q));
    }
  }
  return {c, arch};
}

}  // namespace qtraffic::testing
