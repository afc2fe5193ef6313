#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtraffic/error.hpp"

namespace qtraffic {

using Qubit = std::uint32_t;

enum class GateKind : std::uint8_t { H, X, RX, RY, RZ, Phase, CNOT, CZ, CPhase, Swap, Measure };

constexpr int arity(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::CPhase:
    case GateKind::Swap:
      return 2;
    default:
      return 1;
  }
}

constexpr bool has_angle(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::CPhase:
      return true;
    default:
      return false;
  }
}

/// OpenQASM 2 mnemonic.
constexpr std::string_view mnemonic(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Phase: return "p";
    case GateKind::CNOT: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::CPhase: return "cp";
    case GateKind::Swap: return "swap";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::H;
  std::array<Qubit, 2> qubits{};
  double angle = 0.0;

  int arity() const noexcept { return qtraffic::arity(kind); }
  std::span<const Qubit> operands() const noexcept {
    return {qubits.data(), static_cast<std::size_t>(arity())};
  }
  bool touches(Qubit q) const noexcept {
    return qubits[0] == q || (arity() == 2 && qubits[1] == q);
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

namespace gates {

inline Gate one(GateKind kind, Qubit q, double angle = 0.0) { return {kind, {q, 0}, angle}; }
inline Gate two(GateKind kind, Qubit a, Qubit b, double angle = 0.0) { return {kind, {a, b}, angle}; }

inline Gate h(Qubit q) { return one(GateKind::H, q); }
inline Gate x(Qubit q) { return one(GateKind::X, q); }
inline Gate rx(Qubit q, double theta) { return one(GateKind::RX, q, theta); }
inline Gate ry(Qubit q, double theta) { return one(GateKind::RY, q, theta); }
inline Gate rz(Qubit q, double theta) { return one(GateKind::RZ, q, theta); }
inline Gate phase(Qubit q, double theta) { return one(GateKind::Phase, q, theta); }
inline Gate measure(Qubit q) { return one(GateKind::Measure, q); }
inline Gate cnot(Qubit control, Qubit target) { return two(GateKind::CNOT, control, target); }
inline Gate cz(Qubit a, Qubit b) { return two(GateKind::CZ, a, b); }
inline Gate cphase(Qubit a, Qubit b, double theta) { return two(GateKind::CPhase, a, b, theta); }
inline Gate swap(Qubit a, Qubit b) { return two(GateKind::Swap, a, b); }

}  // namespace gates

/// Ordered gate list over `width` virtual qubits. Program order is the
/// dependency order, so any list of valid gates is a valid circuit.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::string name, std::size_t width) : name_(std::move(name)), width_(width) {}

  void append(const Gate& gate) {
    const auto ops = gate.operands();
    for (const Qubit q : ops) {
      if (q >= width_) {
        throw InvalidArgument("gate operand q[" + std::to_string(q) + "] outside circuit width " +
                              std::to_string(width_));
      }
    }
    if (ops.size() == 2 && ops[0] == ops[1]) {
      throw InvalidArgument("two-qubit gate with repeated operand q[" + std::to_string(ops[0]) + "]");
    }
    Gate g = gate;
    if (g.arity() == 1) g.qubits[1] = 0;
    if (!has_angle(g.kind)) g.angle = 0.0;
    gates_.push_back(g);
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const Gate> gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }

  std::size_t two_qubit_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.arity() == 2; }));
  }

  /// Gates touching each qubit.
  std::vector<std::size_t> gates_per_qubit(bool count_measure = true) const {
    std::vector<std::size_t> counts(width_, 0);
    for (const Gate& g : gates_) {
      if (!count_measure && g.kind == GateKind::Measure) continue;
      for (const Qubit q : g.operands()) ++counts[q];
    }
    return counts;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::string name_;
  std::size_t width_ = 0;
  std::vector<Gate> gates_;
};

using QubitPair = std::pair<Qubit, Qubit>;

inline QubitPair ordered_pair(Qubit a, Qubit b) noexcept {
  return a < b ? QubitPair{a, b} : QubitPair{b, a};
}

/// A circuit partitioned into dependency timeslices.
class SlicedCircuit {
 public:
  SlicedCircuit() = default;

  const Circuit& circuit() const noexcept { return circuit_; }
  std::size_t width() const noexcept { return circuit_.width(); }
  std::size_t depth() const noexcept { return slices_.size(); }

  /// Gate indices of slice `t`, ascending.
  std::span<const std::size_t> slice(std::size_t t) const { return slices_.at(t); }
  std::size_t slice_of(std::size_t gate) const { return slice_of_.at(gate); }

  /// Two-qubit interactions of slice `t` as ordered pairs (first < second), sorted.
  std::span<const QubitPair> interactions(std::size_t t) const { return pairs_.at(t); }

  bool interacts(Qubit i, Qubit j, std::size_t t) const {
    const auto& p = pairs_.at(t);
    return std::binary_search(p.begin(), p.end(), ordered_pair(i, j));
  }

 private:
  friend SlicedCircuit slice(Circuit circuit);

  Circuit circuit_;
  std::vector<std::size_t> slice_of_;
  std::vector<std::vector<std::size_t>> slices_;
  std::vector<std::vector<QubitPair>> pairs_;
};

/// ASAP layering: each gate lands one slice after the latest earlier gate on
/// any of its qubits.
inline SlicedCircuit slice(Circuit circuit) {
  SlicedCircuit out;
  const auto gs = circuit.gates();
  std::vector<std::size_t> next_free(circuit.width(), 0);
  out.slice_of_.reserve(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::size_t t = 0;
    for (const Qubit q : gs[i].operands()) t = std::max(t, next_free[q]);
    for (const Qubit q : gs[i].operands()) next_free[q] = t + 1;
    out.slice_of_.push_back(t);
    if (t >= out.slices_.size()) {
      out.slices_.resize(t + 1);
      out.pairs_.resize(t + 1);
    }
    out.slices_[t].push_back(i);
    if (gs[i].arity() == 2) out.pairs_[t].push_back(ordered_pair(gs[i].qubits[0], gs[i].qubits[1]));
  }
  for (auto& p : out.pairs_) std::sort(p.begin(), p.end());
  out.circuit_ = std::move(circuit);
  return out;
}

/// The circuit re-emitted in slice order.
inline Circuit flatten(const SlicedCircuit& sliced) {
  Circuit out(sliced.circuit().name(), sliced.width());
  for (std::size_t t = 0; t < sliced.depth(); ++t) {
    for (const std::size_t g : sliced.slice(t)) out.append(sliced.circuit().gates()[g]);
  }
  return out;
}

enum class Cell : std::uint8_t { Idle, Compute, Communicate };

/// Row-major qubit x timeslice occupancy grid.
class TraceGrid {
 public:
  TraceGrid() = default;
  TraceGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, Cell::Idle) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return cells_.empty(); }

  Cell at(std::size_t row, std::size_t col) const { return cells_.at(row * cols_ + col); }
  void set(std::size_t row, std::size_t col, Cell c) { cells_.at(row * cols_ + col) = c; }

  std::span<const Cell> row(std::size_t r) const {
    return std::span<const Cell>(cells_).subspan(r * cols_, cols_);
  }

  std::size_t count(Cell c) const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), c));
  }

  friend bool operator==(const TraceGrid&, const TraceGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cell> cells_;
};

/// Logical structure: a cell is `Compute` iff a gate of that slice touches the qubit.
inline TraceGrid virtual_trace(const SlicedCircuit& sliced) {
  if (sliced.depth() == 0) return {};
  TraceGrid grid(sliced.width(), sliced.depth());
  const auto gs = sliced.circuit().gates();
  for (std::size_t t = 0; t < sliced.depth(); ++t) {
    for (const std::size_t g : sliced.slice(t)) {
      for (const Qubit q : gs[g].operands()) grid.set(q, t, Cell::Compute);
    }
  }
  return grid;
}

}  // namespace qtraffic
