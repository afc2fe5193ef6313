#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qtraffic/circuit.hpp"
#include "qtraffic/error.hpp"

namespace qtraffic {

/// Seedable generator with platform-independent output.
///
/// Raw words come from std::mt19937_64, whose sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so the
/// conversions to doubles and bounded integers are done here:
///   uniform()    -> top 53 bits scaled into [0, 1)
///   below(n)     -> rejection sampling on the raw word, no modulo bias
///   bernoulli(p) -> uniform() < p  (one word per trial)
/// Every generator below consumes words in a documented order, so a seed
/// fully determines its graph.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Simple undirected graph over vertices 0..vertices-1. Edges are stored
/// as (u, v) with u < v, sorted.
struct ProblemGraph {
  std::size_t vertices = 0;
  std::vector<QubitPair> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }
  friend bool operator==(const ProblemGraph&, const ProblemGraph&) = default;
};

inline ProblemGraph make_graph(std::size_t vertices, std::vector<QubitPair> edges) {
  for (auto& e : edges) {
    if (e.first == e.second) throw InvalidArgument("self-loop on vertex " + std::to_string(e.first));
    if (e.first >= vertices || e.second >= vertices) throw InvalidArgument("edge endpoint out of range");
    e = ordered_pair(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) throw InvalidArgument("duplicate edge");
  return {vertices, std::move(edges)};
}

/// G(n, p): pairs visited in row-major order (0,1), (0,2), ..., (n-2,n-1),
/// one Bernoulli draw each.
inline ProblemGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("Erdos-Renyi graph needs at least 2 vertices");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("edge probability must lie in [0, 1]");
  PortableRng rng(seed);
  ProblemGraph g{n, {}};
  for (Qubit u = 0; u + 1 < n; ++u) {
    for (Qubit v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

/// Watts-Strogatz small world. Ring lattice where every vertex joins its
/// `ring_degree`/2 nearest neighbours on each side; then, for offset
/// j = 1..ring_degree/2 and vertex u = 0..n-1, the lattice edge (u, u+j mod n)
/// is rewired with probability `beta` to (u, w), w drawn uniformly until it
/// is neither u nor an existing neighbour. Vertices already adjacent to all
/// others are skipped without drawing a replacement.
inline ProblemGraph watts_strogatz(std::size_t n, std::size_t ring_degree, double beta, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("Watts-Strogatz graph needs at least 2 vertices");
  if (ring_degree % 2 != 0 || ring_degree >= n) throw InvalidArgument("ring degree must be even and smaller than n");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("rewiring probability must lie in [0, 1]");

  std::vector<std::set<Qubit>> adj(n);
  const auto link = [&](Qubit a, Qubit b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  for (Qubit u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= ring_degree / 2; ++j) link(u, static_cast<Qubit>((u + j) % n));
  }

  PortableRng rng(seed);
  for (std::size_t j = 1; j <= ring_degree / 2; ++j) {
    for (Qubit u = 0; u < n; ++u) {
      const auto v = static_cast<Qubit>((u + j) % n);
      if (!rng.bernoulli(beta)) continue;
      if (adj[u].size() >= n - 1) continue;
      if (!adj[u].contains(v)) continue;  // already rewired away from this lattice slot
      Qubit w = 0;
      do {
        w = static_cast<Qubit>(rng.below(n));
      } while (w == u || adj[u].contains(w));
      adj[u].erase(v);
      adj[v].erase(u);
      link(u, w);
    }
  }

  ProblemGraph g{n, {}};
  for (Qubit u = 0; u < n; ++u) {
    for (const Qubit v : adj[u]) {
      if (u < v) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

}  // namespace qtraffic
