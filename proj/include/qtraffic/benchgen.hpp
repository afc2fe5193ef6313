#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "qtraffic/circuit.hpp"
#include "qtraffic/error.hpp"
#include "qtraffic/random_graph.hpp"

namespace qtraffic {

enum class Family : std::uint8_t { Cuccaro, Grover, GHZ, QFT, QAOA_ER, QAOA_WS, VQE_HEA1, VQE_HEA2 };

inline constexpr std::array<Family, 8> kAllFamilies = {Family::Cuccaro, Family::Grover,  Family::GHZ,
                                                       Family::QFT,     Family::QAOA_ER, Family::QAOA_WS,
                                                       Family::VQE_HEA1, Family::VQE_HEA2};

constexpr std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::Cuccaro: return "cuccaro";
    case Family::Grover: return "grover";
    case Family::GHZ: return "ghz";
    case Family::QFT: return "qft";
    case Family::QAOA_ER: return "qaoa_er";
    case Family::QAOA_WS: return "qaoa_ws";
    case Family::VQE_HEA1: return "vqe_hea1";
    case Family::VQE_HEA2: return "vqe_hea2";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (const Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

/// Parameters of one benchmark instance. Fields that a family does not use
/// are ignored by it.
struct BenchSpec {
  Family family = Family::GHZ;
  std::size_t n = 4;                 // total qubits
  std::size_t iterations = 1;        // Grover oracle-diffuser cycles
  std::size_t layers = 1;            // QAOA / VQE ansatz layers
  std::uint64_t seed = 1;            // problem-graph seed
  double edge_probability = 0.2;     // Erdos-Renyi
  std::size_t ring_degree = 4;       // Watts-Strogatz lattice degree
  double rewiring = 0.1;             // Watts-Strogatz beta

  friend bool operator==(const BenchSpec&, const BenchSpec&) = default;
};

namespace bench {

inline void require_width(bool ok, std::string_view family, std::size_t n, std::string_view rule) {
  if (!ok) {
    throw InvalidArgument(std::string(family) + ": width " + std::to_string(n) + " invalid, " + std::string(rule));
  }
}

inline std::string instance_name(std::string_view family, std::size_t n) {
  return std::string(family) + "_" + std::to_string(n);
}

/// H on q0, then a CNOT ladder from q0 to every other qubit.
inline Circuit ghz(std::size_t n) {
  require_width(n >= 2, "ghz", n, "needs n >= 2");
  Circuit c(instance_name("ghz", n), n);
  c.append(gates::h(0));
  for (Qubit i = 1; i < n; ++i) c.append(gates::cnot(0, i));
  return c;
}

/// Textbook QFT: H then controlled phases pi/2^(m-q) per qubit, then the
/// bit-reversal SWAP network.
inline Circuit qft(std::size_t n) {
  require_width(n >= 2, "qft", n, "needs n >= 2");
  Circuit c(instance_name("qft", n), n);
  for (Qubit q = 0; q < n; ++q) {
    c.append(gates::h(q));
    for (Qubit m = q + 1; m < n; ++m) {
      c.append(gates::cphase(m, q, std::ldexp(std::numbers::pi, -static_cast<int>(m - q))));
    }
  }
  for (Qubit i = 0; i < n / 2; ++i) c.append(gates::swap(i, static_cast<Qubit>(n - 1 - i)));
  return c;
}

/// Toffoli as 6 CNOTs and 9 single-qubit gates (T = phase(pi/4)).
inline void append_toffoli(Circuit& c, Qubit c1, Qubit c2, Qubit target) {
  constexpr double t = std::numbers::pi / 4;
  c.append(gates::h(target));
  c.append(gates::cnot(c2, target));
  c.append(gates::phase(target, -t));
  c.append(gates::cnot(c1, target));
  c.append(gates::phase(target, t));
  c.append(gates::cnot(c2, target));
  c.append(gates::phase(target, -t));
  c.append(gates::cnot(c1, target));
  c.append(gates::phase(c2, t));
  c.append(gates::phase(target, t));
  c.append(gates::h(target));
  c.append(gates::cnot(c1, c2));
  c.append(gates::phase(c1, t));
  c.append(gates::phase(c2, -t));
  c.append(gates::cnot(c1, c2));
}

/// Ripple-carry adder over two n-bit registers. Layout interleaves the
/// registers: q0 = input carry, b_i = 2i+1, a_i = 2i+2, q(2n+1) = carry out,
/// so every MAJ/UMA acts on three consecutive qubits.
inline Circuit cuccaro(std::size_t n) {
  require_width(n >= 4 && n % 2 == 0, "cuccaro", n, "needs n = 2m + 2 with m >= 1");
  const std::size_t bits = (n - 2) / 2;
  Circuit c(instance_name("cuccaro", n), n);
  const auto carry_in = [](std::size_t i) { return static_cast<Qubit>(2 * i); };
  const auto b = [](std::size_t i) { return static_cast<Qubit>(2 * i + 1); };
  const auto a = [](std::size_t i) { return static_cast<Qubit>(2 * i + 2); };

  for (std::size_t i = 0; i < bits; ++i) {  // MAJ
    c.append(gates::cnot(a(i), b(i)));
    c.append(gates::cnot(a(i), carry_in(i)));
    append_toffoli(c, carry_in(i), b(i), a(i));
  }
  c.append(gates::cnot(a(bits - 1), static_cast<Qubit>(n - 1)));
  for (std::size_t i = bits; i-- > 0;) {  // UMA
    append_toffoli(c, carry_in(i), b(i), a(i));
    c.append(gates::cnot(a(i), carry_in(i)));
    c.append(gates::cnot(carry_in(i), b(i)));
  }
  return c;
}

/// Grover main routine. The oracle marks the pattern with X on every odd
/// qubit and couples the halves with CZ(i, i + n/2); the diffuser is
/// H X [CZ pairs] X H on all qubits.
inline Circuit grover(std::size_t n, std::size_t iterations) {
  require_width(n >= 4 && n % 2 == 0, "grover", n, "needs an even n >= 4");
  if (iterations < 1) throw InvalidArgument("grover: needs at least one iteration");
  const auto half = static_cast<Qubit>(n / 2);
  Circuit c(instance_name("grover", n), n);
  const auto all = [&](Gate (*make)(Qubit)) {
    for (Qubit q = 0; q < n; ++q) c.append(make(q));
  };
  const auto pattern = [&] {
    for (Qubit q = 1; q < n; q += 2) c.append(gates::x(q));
  };
  const auto pairs = [&] {
    for (Qubit i = 0; i < half; ++i) c.append(gates::cz(i, i + half));
  };

  all(gates::h);
  for (std::size_t k = 0; k < iterations; ++k) {
    pattern();
    pairs();
    pattern();
    all(gates::h);
    all(gates::x);
    pairs();
    all(gates::x);
    all(gates::h);
  }
  return c;
}

/// MaxCut ansatz: H on every vertex, then per layer a ZZ block
/// (CNOT, RZ, CNOT) for each edge in sorted order and an RX mixer.
/// Angles follow a linear ramp schedule; only the structure matters here.
inline Circuit qaoa(const ProblemGraph& graph, std::size_t layers, std::string name) {
  if (graph.vertices < 1) throw InvalidArgument("qaoa: empty problem graph");
  if (layers < 1) throw InvalidArgument("qaoa: needs at least one layer");
  Circuit c(std::move(name), graph.vertices);
  for (Qubit q = 0; q < graph.vertices; ++q) c.append(gates::h(q));
  for (std::size_t p = 0; p < layers; ++p) {
    const double ramp = (static_cast<double>(p) + 0.5) / static_cast<double>(layers);
    const double gamma = 0.8 * ramp;
    const double beta = 0.8 * (1.0 - ramp);
    for (const auto& [u, v] : graph.edges) {
      c.append(gates::cnot(u, v));
      c.append(gates::rz(v, 2.0 * gamma));
      c.append(gates::cnot(u, v));
    }
    for (Qubit q = 0; q < graph.vertices; ++q) c.append(gates::rx(q, 2.0 * beta));
  }
  return c;
}

enum class EntanglerLayout : std::uint8_t { Sequential, Parallel };

/// Hardware-efficient ansatz: RX and RY on every qubit, then a
/// nearest-neighbour CNOT entangler per layer. Sequential is a CNOT chain;
/// parallel applies the even pairs and then the odd pairs.
inline Circuit vqe_hea(std::size_t n, std::size_t layers, EntanglerLayout layout) {
  const std::string_view fam = layout == EntanglerLayout::Sequential ? "vqe_hea1" : "vqe_hea2";
  require_width(n >= 2, fam, n, "needs n >= 2");
  if (layers < 1) throw InvalidArgument(std::string(fam) + ": needs at least one layer");
  Circuit c(instance_name(fam, n), n);
  for (std::size_t l = 0; l < layers; ++l) {
    for (Qubit q = 0; q < n; ++q) {
      const double theta = 0.1 * static_cast<double>(1 + (q + l * n) % 7);
      c.append(gates::rx(q, theta));
      c.append(gates::ry(q, 2.0 * theta));
    }
    if (layout == EntanglerLayout::Sequential) {
      for (Qubit q = 0; q + 1 < n; ++q) c.append(gates::cnot(q, q + 1));
    } else {
      for (Qubit q = 0; q + 1 < n; q += 2) c.append(gates::cnot(q, q + 1));
      for (Qubit q = 1; q + 1 < n; q += 2) c.append(gates::cnot(q, q + 1));
    }
  }
  return c;
}

}  // namespace bench

/// The QAOA input graph of a BenchSpec (Erdos-Renyi or Watts-Strogatz). The ring
/// degree is capped at the largest even value below n so small widths work.
inline ProblemGraph problem_graph(const BenchSpec& spec) {
  switch (spec.family) {
    case Family::QAOA_ER: return erdos_renyi(spec.n, spec.edge_probability, spec.seed);
    case Family::QAOA_WS: {
      const std::size_t cap = spec.n < 3 ? spec.ring_degree : (spec.n - 1) & ~std::size_t{1};
      return watts_strogatz(spec.n, std::min(spec.ring_degree, cap), spec.rewiring, spec.seed);
    }
    default: throw InvalidArgument(std::string(family_name(spec.family)) + " has no problem graph");
  }
}

inline Circuit generate(const BenchSpec& spec) {
  switch (spec.family) {
    case Family::Cuccaro: return bench::cuccaro(spec.n);
    case Family::Grover: return bench::grover(spec.n, spec.iterations);
    case Family::GHZ: return bench::ghz(spec.n);
    case Family::QFT: return bench::qft(spec.n);
    case Family::QAOA_ER:
    case Family::QAOA_WS:
      if (spec.layers < 1) throw InvalidArgument("qaoa: needs at least one layer");
      return bench::qaoa(problem_graph(spec), spec.layers, bench::instance_name(family_name(spec.family), spec.n));
    case Family::VQE_HEA1: return bench::vqe_hea(spec.n, spec.layers, bench::EntanglerLayout::Sequential);
    case Family::VQE_HEA2: return bench::vqe_hea(spec.n, spec.layers, bench::EntanglerLayout::Parallel);
  }
  throw InvalidArgument("unknown family");
}

}  // namespace qtraffic
