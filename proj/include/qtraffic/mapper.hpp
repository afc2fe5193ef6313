#pragma once

// Timesliced qubit-to-core mapping for modular architectures with all-to-all
// connectivity, plus teleportation scheduling and physical trace building.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qtraffic/circuit.hpp"
#include "qtraffic/error.hpp"

namespace qtraffic {

using Core = std::uint32_t;
using PhysicalQubit = std::uint32_t;

/// Virtual qubit -> core.
using CoreMap = std::vector<Core>;

struct Architecture {
  std::size_t cores = 1;
  std::size_t capacity = 1;

  std::size_t physical_qubits() const noexcept { return cores * capacity; }

  void validate(std::size_t width) const {
    if (cores < 1 || capacity < 1) throw InvalidArgument("architecture needs at least one core of capacity >= 1");
    if (width > physical_qubits()) {
      throw InvalidArgument("circuit width " + std::to_string(width) + " exceeds " + std::to_string(cores) + " cores x " +
                            std::to_string(capacity) + " qubits");
    }
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Qubit i -> core floor(i / capacity).
inline CoreMap identity_fill(std::size_t width, const Architecture& arch) {
  CoreMap m(width);
  for (std::size_t q = 0; q < width; ++q) m[q] = static_cast<Core>(q / arch.capacity);
  return m;
}

// ---------------------------------------------------------------------------
// Lookahead

struct WeightedEdge {
  Qubit a = 0;  // a < b
  Qubit b = 0;
  double weight = 0.0;
};

struct LookaheadWeights {
  std::size_t slice = 0;
  std::vector<WeightedEdge> edges;   // sorted by (a, b)
  std::vector<QubitPair> must_link;  // interactions of `slice`, sorted

  double weight(Qubit i, Qubit j) const {
    const auto key = ordered_pair(i, j);
    const auto it = std::lower_bound(edges.begin(), edges.end(), key, [](const WeightedEdge& e, const QubitPair& k) {
      return std::pair{e.a, e.b} < k;
    });
    return it != edges.end() && it->a == key.first && it->b == key.second ? it->weight : 0.0;
  }
};

/// weight(i, j) = sum over m >= t of [i, j interact in m] * sigma^(m - t).
/// `horizon` limits m to t + horizon.
inline LookaheadWeights lookahead_weights(const SlicedCircuit& sliced, std::size_t t, double sigma,
                                          std::optional<std::size_t> horizon = std::nullopt) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw InvalidArgument("lookahead decay must lie in (0, 1]");
  LookaheadWeights out;
  out.slice = t;
  if (t >= sliced.depth()) return out;
  const auto cur = sliced.interactions(t);
  out.must_link.assign(cur.begin(), cur.end());

  std::size_t last = sliced.depth() - 1;
  if (horizon && *horizon < last - t) last = t + *horizon;

  std::unordered_map<std::uint64_t, double> acc;
  double decay = 1.0;
  for (std::size_t m = t; m <= last; ++m, decay *= sigma) {
    for (const auto& [i, j] : sliced.interactions(m)) {
      acc[(static_cast<std::uint64_t>(i) << 32) | j] += decay;
    }
  }
  out.edges.reserve(acc.size());
  for (const auto& [key, w] : acc) {
    out.edges.push_back({static_cast<Qubit>(key >> 32), static_cast<Qubit>(key & 0xffffffffu), w});
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::pair{x.a, x.b} < std::pair{y.a, y.b}; });
  return out;
}

/// Slices past which sigma^d drops below `cutoff`; empty (no limit) for sigma = 1.
inline std::optional<std::size_t> default_horizon(double sigma, double cutoff = 1e-6) {
  if (sigma >= 1.0) return std::nullopt;
  return static_cast<std::size_t>(std::ceil(std::log(cutoff) / std::log(sigma)));
}

// ---------------------------------------------------------------------------
// Per-slice partitioning

struct PartitionResult {
  CoreMap map;
  std::size_t swaps = 0;  // local-search moves applied
};

namespace detail {

/// Relaxed pairwise-exchange local search over one slice.
///
/// Objective, compared lexicographically: (must-link violations, cut weight
/// plus move_cost per qubit placed away from its core in `prev`). Without the
/// movement term an idle qubit whose interactions are all behind it is free to
/// shuttle around, which costs real teleports for no future benefit.
/// Repair phase: while a must-link pair is split, apply the best move that
/// brings one endpoint into its partner's core, by swapping with a qubit
/// that is unlinked or itself split, or by taking a free slot. When no such
/// single move exists (odd capacities can box a pair in), both endpoints are
/// moved into a third core with two available places.
/// Refine phase: apply the best positive-gain swap or free-slot move of
/// unlinked qubits until none is left.
/// Ties break on (lowest moved qubit, next moved qubit, target core).
class SlicePartitioner {
 public:
  SlicePartitioner(const CoreMap& prev, const LookaheadWeights& weights, const Architecture& arch, double move_cost)
      : n_(prev.size()),
        cores_(arch.cores),
        capacity_(arch.capacity),
        move_cost_(move_cost),
        origin_(prev),
        core_of_(prev),
        weights_(weights) {
    if (!(move_cost >= 0.0) || !std::isfinite(move_cost)) throw InvalidArgument("move cost must be finite and >= 0");
    members_.assign(cores_, {});
    for (Qubit q = 0; q < n_; ++q) {
      if (core_of_[q] >= cores_) throw InvalidArgument("core map references core " + std::to_string(core_of_[q]));
      members_[core_of_[q]].push_back(q);
    }
    for (Core c = 0; c < cores_; ++c) {
      if (members_[c].size() > capacity_) throw InvalidArgument("previous map exceeds core capacity");
    }
    partner_.assign(n_, kNone);
    for (const auto& [a, b] : weights.must_link) {
      if (a >= n_ || b >= n_) throw InvalidArgument("must-link pair outside circuit width");
      partner_[a] = b;
      partner_[b] = a;
    }
    check_feasible();

    adj_.assign(n_, {});
    for (const auto& e : weights.edges) {
      adj_[e.a].emplace_back(e.b, e.weight);
      adj_[e.b].emplace_back(e.a, e.weight);
    }
    ext_.assign(n_ * cores_, 0.0);
    for (Qubit u = 0; u < n_; ++u) {
      for (const auto& [v, w] : adj_[u]) ext_[u * cores_ + core_of_[v]] += w;
    }
  }

  PartitionResult run() {
    repair();
    refine();
    return {core_of_, moves_};
  }

 private:
  static constexpr Qubit kNone = std::numeric_limits<Qubit>::max();
  static constexpr double kGainEps = 1e-9;

  struct Candidate {
    int dviol = 0;
    double dcut = 0.0;
    std::vector<std::pair<Qubit, Core>> moves;  // (qubit, destination)
    std::vector<Qubit> key;                     // sorted moved qubits
    Core target = 0;
  };

  void check_feasible() const {
    const std::size_t pairs = weights_.must_link.size();
    if (pairs == 0) return;
    if (capacity_ < 2) {
      const auto& [a, b] = weights_.must_link.front();
      throw Infeasible("slice " + std::to_string(weights_.slice) + ": must-link component {" + std::to_string(a) + "," +
                       std::to_string(b) + "} exceeds core capacity " + std::to_string(capacity_));
    }
    if (pairs > cores_ * (capacity_ / 2)) {
      throw Infeasible("slice " + std::to_string(weights_.slice) + ": " + std::to_string(pairs) +
                       " must-link pairs cannot be packed into " + std::to_string(cores_) + " cores of capacity " +
                       std::to_string(capacity_));
    }
  }

  double& ext(Qubit u, Core c) { return ext_[u * cores_ + c]; }
  // Change in movement charge when q goes from `from` to `to`.
  double displacement(Qubit q, Core from, Core to) const {
    return move_cost_ * (static_cast<double>(to != origin_[q]) - static_cast<double>(from != origin_[q]));
  }
  double ext(Qubit u, Core c) const { return ext_[u * cores_ + c]; }

  double edge(Qubit u, Qubit v) const {
    for (const auto& [x, w] : adj_[u]) {
      if (x == v) return w;
    }
    return 0.0;
  }

  bool linked(Qubit q) const { return partner_[q] != kNone; }
  bool split(Qubit q) const { return linked(q) && core_of_[q] != core_of_[partner_[q]]; }
  // A resident that can leave its core without breaking a co-located pair.
  bool available(Qubit q) const { return !linked(q) || split(q); }
  std::size_t free_slots(Core c) const { return capacity_ - members_[c].size(); }

  void relocate(Qubit q, Core to) {
    const Core from = core_of_[q];
    if (from == to) return;
    auto& src = members_[from];
    src.erase(std::find(src.begin(), src.end(), q));
    auto& dst = members_[to];
    dst.insert(std::lower_bound(dst.begin(), dst.end(), q), q);
    core_of_[q] = to;
    for (const auto& [v, w] : adj_[q]) {
      ext(v, from) -= w;
      ext(v, to) += w;
    }
  }

  int violations_of(std::span<const Qubit> qubits) const {
    int count = 0;
    std::vector<QubitPair> seen;
    for (const Qubit q : qubits) {
      if (!split(q)) continue;
      const auto p = ordered_pair(q, partner_[q]);
      if (std::find(seen.begin(), seen.end(), p) == seen.end()) {
        seen.push_back(p);
        ++count;
      }
    }
    return count;
  }

  /// Apply `moves` tentatively and measure (dviol, dcut); always restores state.
  void evaluate(Candidate& c) {
    std::vector<Qubit> touched;
    for (const auto& [q, to] : c.moves) {
      touched.push_back(q);
      if (linked(q)) touched.push_back(partner_[q]);
    }
    const int before = violations_of(touched);
    std::vector<std::pair<Qubit, Core>> undo;
    double dcut = 0.0;
    for (const auto& [q, to] : c.moves) {
      const Core from = core_of_[q];
      dcut += ext(q, from) - ext(q, to) + displacement(q, from, to);
      undo.emplace_back(q, from);
      relocate(q, to);
    }
    c.dviol = violations_of(touched) - before;
    c.dcut = dcut;
    for (auto it = undo.rbegin(); it != undo.rend(); ++it) relocate(it->first, it->second);
  }

  static bool better(const Candidate& x, const Candidate& y) {
    if (x.dviol != y.dviol) return x.dviol < y.dviol;
    const double tol = 1e-12 * std::max({1.0, std::abs(x.dcut), std::abs(y.dcut)});
    if (std::abs(x.dcut - y.dcut) > tol) return x.dcut < y.dcut;
    if (x.key != y.key) return x.key < y.key;
    return x.target < y.target;
  }

  Candidate make(std::vector<std::pair<Qubit, Core>> moves, Core target) {
    Candidate c;
    c.moves = std::move(moves);
    for (const auto& m : c.moves) c.key.push_back(m.first);
    std::sort(c.key.begin(), c.key.end());
    c.target = target;
    evaluate(c);
    return c;
  }

  void consider(std::optional<Candidate>& best, Candidate c) {
    if (!best || better(c, *best)) best = std::move(c);
  }

  // Moves bringing `q` into core `to`: a free slot or a swap with an available resident.
  void single_moves(Qubit q, Core to, std::optional<Candidate>& best) {
    const Core from = core_of_[q];
    if (free_slots(to) > 0) consider(best, make({{q, to}}, to));
    const std::vector<Qubit> residents = members_[to];  // evaluate() reshuffles members_
    for (const Qubit v : residents) {
      if (v == partner_[q] || !available(v)) continue;
      consider(best, make({{q, to}, {v, from}}, to));
    }
  }

  std::vector<QubitPair> split_pairs() const {
    std::vector<QubitPair> out;
    for (const auto& p : weights_.must_link) {
      if (core_of_[p.first] != core_of_[p.second]) out.push_back(p);
    }
    return out;
  }

  void apply(const Candidate& c) {
    // Evaluated against the pre-move state, so relocate in order.
    for (const auto& [q, to] : c.moves) relocate(q, to);
    ++moves_;
  }

  void repair() {
    while (true) {
      const auto pending = split_pairs();
      if (pending.empty()) return;
      std::optional<Candidate> best;
      for (const auto& [a, b] : pending) {
        single_moves(a, core_of_[b], best);
        single_moves(b, core_of_[a], best);
      }
      if (!best || best->dviol >= 0) {
        for (const auto& [a, b] : pending) joint_moves(a, b, best);
      }
      if (!best || best->dviol >= 0) {
        throw Infeasible("slice " + std::to_string(weights_.slice) + ": no placement co-locates all must-link pairs");
      }
      apply(*best);
    }
  }

  // Move both endpoints of a split pair into a third core.
  void joint_moves(Qubit a, Qubit b, std::optional<Candidate>& best) {
    const Core ca = core_of_[a];
    const Core cb = core_of_[b];
    for (Core x = 0; x < cores_; ++x) {
      if (x == ca || x == cb) continue;
      std::vector<Qubit> evictable;
      for (const Qubit v : members_[x]) {
        if (available(v)) evictable.push_back(v);
      }
      const std::size_t slots = free_slots(x);
      if (slots + evictable.size() < 2) continue;
      // Places for a and b: free slots first (no eviction), then the two
      // cheapest evictions judged by their own external weight.
      std::vector<std::pair<Qubit, Core>> moves{{a, x}, {b, x}};
      std::sort(evictable.begin(), evictable.end(), [&](Qubit u, Qubit v) {
        const double du = ext(u, x);
        const double dv = ext(v, x);
        return du != dv ? du < dv : u < v;
      });
      std::size_t need = slots >= 2 ? 0 : 2 - slots;
      const Core homes[2] = {ca, cb};
      for (std::size_t i = 0; i < need; ++i) moves.emplace_back(evictable[i], homes[i]);
      consider(best, make(std::move(moves), x));
    }
  }

  void refine() {
    struct Move {
      Qubit u = 0;
      Qubit v = kNone;  // kNone: move into a free slot
      Core target = 0;  // destination of u
      double gain = 0.0;
      auto key() const { return std::tuple{std::min(u, v), v == kNone ? kNone : std::max(u, v), target}; }
    };
    // Bounded by the strictly decreasing cut; the cap guards float drift.
    const std::size_t cap = 4 * n_ * cores_ + 16;
    for (std::size_t iter = 0; iter < cap; ++iter) {
      std::optional<Move> best;
      const auto offer = [&](const Move& m) {
        if (m.gain <= kGainEps) return;
        if (!best) {
          best = m;
          return;
        }
        const double tol = 1e-12 * std::max(1.0, std::abs(best->gain));
        if (m.gain > best->gain + tol || (m.gain >= best->gain - tol && m.key() < best->key())) best = m;
      };
      for (Qubit u = 0; u < n_; ++u) {
        if (linked(u)) continue;
        const Core a = core_of_[u];
        for (Core b = 0; b < cores_; ++b) {
          if (b == a) continue;
          const double desire = ext(u, b) - ext(u, a) - displacement(u, a, b);
          if (free_slots(b) > 0) offer({u, kNone, b, desire});
          for (const Qubit v : members_[b]) {
            if (linked(v)) continue;
            offer({u, v, b, desire + ext(v, a) - ext(v, b) - displacement(v, b, a) - 2.0 * edge(u, v)});
          }
        }
      }
      if (!best) return;
      const Core from = core_of_[best->u];
      relocate(best->u, best->target);
      if (best->v != kNone) relocate(best->v, from);
      ++moves_;
    }
  }

  std::size_t n_;
  std::size_t cores_;
  std::size_t capacity_;
  double move_cost_;
  CoreMap origin_;
  CoreMap core_of_;
  const LookaheadWeights& weights_;
  std::vector<std::vector<Qubit>> members_;
  std::vector<Qubit> partner_;
  std::vector<std::vector<std::pair<Qubit, double>>> adj_;
  std::vector<double> ext_;  // ext_[u * cores + c] = weight from u into core c
  std::size_t moves_ = 0;
};

}  // namespace detail

/// Capacity-respecting map for one slice in which every must-link pair of
/// `weights` is co-located, found by local search seeded from `prev`.
/// Throws Infeasible when the slice's pairs cannot be packed.
inline PartitionResult partition_slice(const CoreMap& prev, const LookaheadWeights& weights, const Architecture& arch,
                                       double move_cost = 1.0) {
  return detail::SlicePartitioner(prev, weights, arch, move_cost).run();
}

// ---------------------------------------------------------------------------
// Teleportation scheduling

struct TeleportEvent {
  Qubit qubit = 0;
  Core from_core = 0;
  Core to_core = 0;
  std::size_t before_slice = 0;  // moves between slice before_slice-1 and before_slice
  std::size_t wave = 0;
  std::size_t start = 0;  // physical timeslice at which the wave begins
  PhysicalQubit from_phys = 0;
  PhysicalQubit to_phys = 0;
  std::optional<Qubit> partner;  // counter-moving qubit; empty = idle receiver

  friend bool operator==(const TeleportEvent&, const TeleportEvent&) = default;
};

struct TransitionSchedule {
  std::vector<TeleportEvent> events;  // ordered by (wave, qubit); wave and partner filled
  std::size_t waves = 0;
  std::size_t duration(std::size_t tau) const noexcept { return waves * tau; }
};

/// Pack the moves of one slice transition into parallel waves.
///
/// Per wave, in qubit order: a mover is paired with the first pending mover
/// in the opposite direction (teleport-swap, no free slot needed); remaining
/// movers proceed only into a slot of the destination that is idle at the
/// start of the wave. Slots vacated during a wave become usable in the next.
/// If nothing can move, every destination core is full and loses a pending
/// mover, so the movers contain a cycle; the first such cycle is rotated in
/// one wave.
inline TransitionSchedule teleport_schedule(std::span<const TeleportEvent> moves, std::span<const std::size_t> occupancy,
                                            const Architecture& arch) {
  TransitionSchedule out;
  std::vector<TeleportEvent> pending(moves.begin(), moves.end());
  std::sort(pending.begin(), pending.end(), [](const auto& x, const auto& y) { return x.qubit < y.qubit; });
  for (const auto& e : pending) {
    if (e.from_core == e.to_core) throw InvalidArgument("teleport event without a core change");
  }
  std::vector<std::size_t> occ(occupancy.begin(), occupancy.end());
  if (occ.size() != arch.cores) throw InvalidArgument("occupancy size differs from core count");

  while (!pending.empty()) {
    const std::size_t wave = out.waves;
    std::vector<bool> done(pending.size(), false);
    std::vector<std::size_t> arriving(arch.cores, 0);
    std::vector<std::size_t> leaving(arch.cores, 0);
    bool progressed = false;
    const auto emit = [&](std::size_t i, std::optional<Qubit> partner) {
      TeleportEvent e = pending[i];
      e.wave = wave;
      e.partner = partner;
      out.events.push_back(e);
      done[i] = true;
      progressed = true;
    };

    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (done[i]) continue;
      for (std::size_t j = i + 1; j < pending.size(); ++j) {
        if (done[j] || pending[j].from_core != pending[i].to_core || pending[j].to_core != pending[i].from_core) continue;
        emit(i, pending[j].qubit);
        emit(j, pending[i].qubit);
        break;
      }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (done[i]) continue;
      const Core to = pending[i].to_core;
      if (occ[to] + arriving[to] < arch.capacity) {
        ++arriving[to];
        ++leaving[pending[i].from_core];
        emit(i, std::nullopt);
      }
    }
    if (!progressed) {
      // Follow lowest-qubit movers core to core until a core repeats.
      std::vector<std::size_t> path;
      std::vector<std::optional<std::size_t>> seen_at(arch.cores);
      std::size_t cur = 0;
      while (true) {
        const Core from = pending[cur].from_core;
        if (seen_at[from]) {
          path.erase(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(*seen_at[from]));
          break;
        }
        seen_at[from] = path.size();
        path.push_back(cur);
        const Core next_core = pending[cur].to_core;
        std::optional<std::size_t> next;
        for (std::size_t j = 0; j < pending.size(); ++j) {
          if (pending[j].from_core == next_core) {
            next = j;
            break;
          }
        }
        if (!next) throw Error("teleport schedule deadlock without a cycle");
        cur = *next;
      }
      for (std::size_t k = 0; k < path.size(); ++k) emit(path[k], pending[path[(k + 1) % path.size()]].qubit);
    }
    for (std::size_t c = 0; c < arch.cores; ++c) occ[c] = occ[c] + arriving[c] - leaving[c];

    std::vector<TeleportEvent> rest;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (!done[i]) rest.push_back(pending[i]);
    }
    pending = std::move(rest);
    ++out.waves;
  }
  std::stable_sort(out.events.begin(), out.events.end(), [](const auto& x, const auto& y) {
    return std::pair{x.wave, x.qubit} < std::pair{y.wave, y.qubit};
  });
  return out;
}

// ---------------------------------------------------------------------------
// Whole-program mapping

struct MapperOptions {
  double sigma = 0.5;                      // lookahead decay
  std::size_t tau = 1;                     // timeslices per communication wave
  std::optional<std::size_t> horizon;      // lookahead depth; default from sigma
  double move_cost = 1.0;                  // partition charge per displaced qubit
  std::optional<std::chrono::steady_clock::time_point> deadline;

  std::optional<std::size_t> effective_horizon() const { return horizon ? horizon : default_horizon(sigma); }
};

struct GatePlacement {
  std::size_t time = 0;  // physical timeslice
  std::array<PhysicalQubit, 2> phys{};

  friend bool operator==(const GatePlacement&, const GatePlacement&) = default;
};

struct Counters {
  std::vector<std::size_t> ops_per_phys;     // computation gates per physical qubit
  std::vector<std::size_t> telep_per_phys;   // teleports sourced at each physical qubit
  std::vector<std::size_t> telep_per_core;   // each event counts at both ends
  std::vector<std::size_t> telep_per_slice;  // teleports starting in each physical timeslice

  friend bool operator==(const Counters&, const Counters&) = default;
};

struct MappedProgram {
  SlicedCircuit sliced;
  Architecture arch;
  double sigma = 0.5;
  std::size_t tau = 1;
  std::vector<CoreMap> assignment;          // per slice
  std::vector<TeleportEvent> teleports;     // ordered by (before_slice, wave, qubit)
  std::vector<GatePlacement> placements;    // per gate
  std::size_t t_exec = 0;
  TraceGrid trace;                          // physical qubits x t_exec
  Counters counters;

  const Circuit& circuit() const noexcept { return sliced.circuit(); }
};

namespace detail {

inline std::vector<std::size_t> occupancy_of(const CoreMap& m, std::size_t cores) {
  std::vector<std::size_t> occ(cores, 0);
  for (const Core c : m) ++occ[c];
  return occ;
}

/// Schedules every transition and lays out the physical timeline.
inline void build_physical(MappedProgram& mp) {
  const auto& arch = mp.arch;
  const std::size_t n = mp.sliced.width();
  const std::size_t tau = mp.tau;
  const auto gs = mp.circuit().gates();
  constexpr auto kVacant = std::numeric_limits<Qubit>::max();

  std::vector<PhysicalQubit> phys_of(n);
  std::vector<Qubit> occupant(arch.physical_qubits(), kVacant);
  for (Qubit q = 0; q < n; ++q) {
    phys_of[q] = q;
    occupant[q] = q;
  }

  struct Mark {
    PhysicalQubit row;
    std::size_t col;
    Cell cell;
  };
  std::vector<Mark> marks;
  mp.placements.assign(gs.size(), {});
  mp.teleports.clear();
  mp.counters = {};
  mp.counters.ops_per_phys.assign(arch.physical_qubits(), 0);
  mp.counters.telep_per_phys.assign(arch.physical_qubits(), 0);
  mp.counters.telep_per_core.assign(arch.cores, 0);

  CoreMap before = identity_fill(n, arch);
  std::size_t now = 0;
  for (std::size_t t = 0; t < mp.sliced.depth(); ++t) {
    const CoreMap& after = mp.assignment[t];
    std::vector<TeleportEvent> moves;
    for (Qubit q = 0; q < n; ++q) {
      if (before[q] == after[q]) continue;
      TeleportEvent e;
      e.qubit = q;
      e.from_core = before[q];
      e.to_core = after[q];
      e.before_slice = t;
      moves.push_back(e);
    }
    std::vector<bool> mover(n, false);
    std::size_t comm = 0;
    if (!moves.empty()) {
      auto sched = teleport_schedule(moves, occupancy_of(before, arch.cores), arch);
      comm = sched.duration(tau);
      std::size_t i = 0;
      for (std::size_t w = 0; w < sched.waves; ++w) {
        const std::size_t start = now + w * tau;
        std::vector<TeleportEvent*> wave;
        for (; i < sched.events.size() && sched.events[i].wave == w; ++i) wave.push_back(&sched.events[i]);
        std::vector<bool> reserved(arch.physical_qubits(), false);
        for (TeleportEvent* e : wave) {
          e->start = start;
          e->from_phys = phys_of[e->qubit];
          if (e->partner) {
            e->to_phys = phys_of[*e->partner];
          } else {
            const PhysicalQubit base = static_cast<PhysicalQubit>(e->to_core * arch.capacity);
            PhysicalQubit slot = base;
            while (occupant[slot] != kVacant || reserved[slot]) ++slot;
            if (slot >= base + arch.capacity) throw Error("no idle receiver in destination core");
            reserved[slot] = true;
            e->to_phys = slot;
          }
        }
        for (TeleportEvent* e : wave) {
          for (std::size_t s = start; s < start + tau; ++s) {
            marks.push_back({e->from_phys, s, Cell::Communicate});
            marks.push_back({e->to_phys, s, Cell::Communicate});
          }
          ++mp.counters.telep_per_phys[e->from_phys];
          ++mp.counters.telep_per_core[e->from_core];
          ++mp.counters.telep_per_core[e->to_core];
          occupant[e->from_phys] = kVacant;
          mover[e->qubit] = true;
        }
        for (TeleportEvent* e : wave) {
          occupant[e->to_phys] = e->qubit;
          phys_of[e->qubit] = e->to_phys;
        }
      }
      mp.teleports.insert(mp.teleports.end(), sched.events.begin(), sched.events.end());
    }

    bool deferred = false;
    for (const std::size_t g : mp.sliced.slice(t)) {
      const auto ops = gs[g].operands();
      const bool hoist = comm > 0 && std::none_of(ops.begin(), ops.end(), [&](Qubit q) { return mover[q]; });
      const std::size_t time = hoist ? now : now + comm;
      deferred = deferred || !hoist;
      auto& pl = mp.placements[g];
      pl.time = time;
      pl.phys = {0, 0};
      for (std::size_t k = 0; k < ops.size(); ++k) {
        pl.phys[k] = phys_of[ops[k]];
        marks.push_back({pl.phys[k], time, Cell::Compute});
        ++mp.counters.ops_per_phys[pl.phys[k]];
      }
    }
    now += comm + (deferred ? 1 : 0);
    before = after;
  }

  mp.t_exec = now;
  mp.trace = now == 0 ? TraceGrid{} : TraceGrid(arch.physical_qubits(), now);
  for (const auto& m : marks) mp.trace.set(m.row, m.col, m.cell);
  mp.counters.telep_per_slice.assign(now, 0);
  for (const auto& e : mp.teleports) ++mp.counters.telep_per_slice[e.start];
}

}  // namespace detail

/// Map a sliced circuit onto `arch`. The placement before slice 0 is the
/// identity fill; each slice is partitioned from its predecessor's map, and
/// every core change becomes a teleport event ahead of the slice.
inline MappedProgram map_circuit(const SlicedCircuit& sliced, const Architecture& arch, const MapperOptions& options = {}) {
  arch.validate(sliced.width());
  if (options.tau < 1) throw InvalidArgument("communication duration tau must be >= 1");
  MappedProgram mp;
  mp.sliced = sliced;
  mp.arch = arch;
  mp.sigma = options.sigma;
  mp.tau = options.tau;
  mp.assignment.reserve(sliced.depth());

  const auto horizon = options.effective_horizon();
  CoreMap prev = identity_fill(sliced.width(), arch);
  for (std::size_t t = 0; t < sliced.depth(); ++t) {
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
      throw Timeout("mapping exceeded its deadline at slice " + std::to_string(t));
    }
    const auto weights = lookahead_weights(sliced, t, options.sigma, horizon);
    prev = partition_slice(prev, weights, arch, options.move_cost).map;
    mp.assignment.push_back(prev);
  }
  detail::build_physical(mp);
  return mp;
}

/// Re-derives the physical layout from `assignment` (used after deserializing).
inline void rebuild_physical(MappedProgram& mp) { detail::build_physical(mp); }

/// Invariant violations of a mapped program; empty when consistent.
inline std::vector<std::string> check_program(const MappedProgram& mp) {
  std::vector<std::string> issues;
  const auto& arch = mp.arch;
  const std::size_t n = mp.sliced.width();
  if (mp.assignment.size() != mp.sliced.depth()) {
    issues.push_back("assignment has " + std::to_string(mp.assignment.size()) + " slices, circuit depth " +
                     std::to_string(mp.sliced.depth()));
    return issues;
  }
  std::size_t moved = 0;
  CoreMap before = identity_fill(n, arch);
  for (std::size_t t = 0; t < mp.assignment.size(); ++t) {
    const auto& m = mp.assignment[t];
    if (m.size() != n) {
      issues.push_back("slice " + std::to_string(t) + ": map size mismatch");
      continue;
    }
    std::vector<std::size_t> occ(arch.cores, 0);
    for (const Core c : m) {
      if (c >= arch.cores) issues.push_back("slice " + std::to_string(t) + ": core index out of range");
      else ++occ[c];
    }
    for (std::size_t c = 0; c < arch.cores; ++c) {
      if (occ[c] > arch.capacity) issues.push_back("slice " + std::to_string(t) + ": core " + std::to_string(c) + " over capacity");
    }
    for (const auto& [a, b] : mp.sliced.interactions(t)) {
      if (m[a] != m[b]) {
        issues.push_back("slice " + std::to_string(t) + ": qubits " + std::to_string(a) + "," + std::to_string(b) +
                         " interact across cores");
      }
    }
    for (Qubit q = 0; q < n; ++q) moved += before[q] != m[q] ? 1 : 0;
    before = m;
  }
  if (moved != mp.teleports.size()) {
    issues.push_back("teleport events " + std::to_string(mp.teleports.size()) + " != core changes " + std::to_string(moved));
  }

  Counters recount;
  recount.ops_per_phys.assign(arch.physical_qubits(), 0);
  recount.telep_per_phys.assign(arch.physical_qubits(), 0);
  recount.telep_per_core.assign(arch.cores, 0);
  recount.telep_per_slice.assign(mp.t_exec, 0);
  TraceGrid grid = mp.t_exec == 0 ? TraceGrid{} : TraceGrid(arch.physical_qubits(), mp.t_exec);
  const auto gs = mp.circuit().gates();
  for (std::size_t g = 0; g < gs.size() && g < mp.placements.size(); ++g) {
    for (int k = 0; k < gs[g].arity(); ++k) {
      const auto& pl = mp.placements[g];
      if (pl.time >= mp.t_exec || pl.phys[k] >= arch.physical_qubits()) {
        issues.push_back("gate " + std::to_string(g) + " placed outside the trace");
        continue;
      }
      ++recount.ops_per_phys[pl.phys[k]];
      grid.set(pl.phys[k], pl.time, Cell::Compute);
    }
  }
  for (const auto& e : mp.teleports) {
    if (e.from_core == e.to_core) issues.push_back("teleport of qubit " + std::to_string(e.qubit) + " within one core");
    if (e.start + mp.tau > mp.t_exec || e.from_phys >= arch.physical_qubits() || e.to_phys >= arch.physical_qubits()) {
      issues.push_back("teleport of qubit " + std::to_string(e.qubit) + " outside the trace");
      continue;
    }
    if (e.from_phys / arch.capacity != e.from_core || e.to_phys / arch.capacity != e.to_core) {
      issues.push_back("teleport of qubit " + std::to_string(e.qubit) + " uses a physical qubit of another core");
    }
    ++recount.telep_per_phys[e.from_phys];
    ++recount.telep_per_core[e.from_core];
    ++recount.telep_per_core[e.to_core];
    ++recount.telep_per_slice[e.start];
    for (std::size_t s = e.start; s < e.start + mp.tau; ++s) {
      if (grid.at(e.from_phys, s) == Cell::Compute || grid.at(e.to_phys, s) == Cell::Compute) {
        issues.push_back("physical qubit computes while communicating at timeslice " + std::to_string(s));
      }
      grid.set(e.from_phys, s, Cell::Communicate);
      grid.set(e.to_phys, s, Cell::Communicate);
    }
  }
  if (!(recount == mp.counters)) issues.push_back("counters disagree with the event and gate records");
  if (!(grid == mp.trace)) issues.push_back("trace grid disagrees with the event and gate records");
  return issues;
}

}  // namespace qtraffic
