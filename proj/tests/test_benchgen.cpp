#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "qtraffic/benchgen.hpp"
#include "qtraffic/qasm.hpp"

using namespace qtraffic;

namespace {

// Closed-form gate counts, written independently of the generators.
std::size_t expected_gates(const BenchSpec& s, std::size_t edges) {
  const std::size_t n = s.n;
  switch (s.family) {
    case Family::GHZ: return n;
    case Family::QFT: return n + n * (n - 1) / 2 + n / 2;
    case Family::Cuccaro: return 34 * ((n - 2) / 2) + 1;  // 2 CNOT + 15-gate Toffoli per MAJ and UMA
    case Family::Grover: return n + s.iterations * 6 * n;
    case Family::QAOA_ER:
    case Family::QAOA_WS: return n + s.layers * (3 * edges + n);
    case Family::VQE_HEA1:
    case Family::VQE_HEA2: return s.layers * (3 * n - 1);
  }
  return 0;
}

std::size_t edge_count(const BenchSpec& s) {
  return s.family == Family::QAOA_ER || s.family == Family::QAOA_WS ? problem_graph(s).edge_count() : 0;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return sxy / sxx;
}

std::size_t circular_distance(Qubit a, Qubit b, std::size_t n) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, n - d);
}

}  // namespace

class GateCounts : public ::testing::TestWithParam<Family> {};

TEST_P(GateCounts, MatchClosedForm) {
  for (const std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
    for (const std::size_t reps : {1u, 3u}) {
      BenchSpec s;
      s.family = GetParam();
      s.n = n;
      s.iterations = reps;
      s.layers = reps;
      EXPECT_EQ(generate(s).size(), expected_gates(s, edge_count(s))) << "n=" << n << " reps=" << reps;
    }
  }
}

TEST_P(GateCounts, Deterministic) {
  BenchSpec s;
  s.family = GetParam();
  s.n = 32;
  s.seed = 7;
  EXPECT_EQ(generate(s), generate(s));
  EXPECT_EQ(to_qasm(generate(s)), to_qasm(generate(s)));
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, GateCounts, ::testing::ValuesIn(kAllFamilies),
                         [](const auto& info) { return std::string(family_name(info.param)); });

TEST(Ghz, ExactGatesAndLongestSequence) {
  const auto c = bench::ghz(4);
  const std::vector<Gate> want{gates::h(0), gates::cnot(0, 1), gates::cnot(0, 2), gates::cnot(0, 3)};
  EXPECT_EQ(std::vector<Gate>(c.gates().begin(), c.gates().end()), want);
  EXPECT_EQ(bench::ghz(2).size(), 2u);
  EXPECT_EQ(bench::ghz(64).gates_per_qubit()[0], 64u);
  EXPECT_THROW(bench::ghz(1), InvalidArgument);
}

TEST(Qft, SmallCounts) {
  EXPECT_EQ(bench::qft(4).size(), 12u);
  EXPECT_EQ(bench::qft(2).size(), 4u);
  const auto c = bench::qft(4);
  std::size_t h = 0, cp = 0, sw = 0;
  for (const auto& g : c.gates()) {
    h += g.kind == GateKind::H;
    cp += g.kind == GateKind::CPhase;
    sw += g.kind == GateKind::Swap;
  }
  EXPECT_EQ(h, 4u);
  EXPECT_EQ(cp, 6u);
  EXPECT_EQ(sw, 2u);
  EXPECT_DOUBLE_EQ(c.gates()[1].angle, std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(c.gates()[3].angle, std::numbers::pi / 8);
}

TEST(Cuccaro, CountsAndShape) {
  EXPECT_EQ(bench::cuccaro(4).size(), 35u);
  EXPECT_THROW(bench::cuccaro(3), InvalidArgument);
  EXPECT_THROW(bench::cuccaro(5), InvalidArgument);
  EXPECT_THROW(bench::cuccaro(2), InvalidArgument);
  // A Toffoli on three line-adjacent qubits spans distance 2; every
  // two-qubit gate stays inside such a window.
  for (const std::size_t n : {4u, 8u, 32u}) {
    for (const auto& g : bench::cuccaro(n).gates()) {
      if (g.arity() != 2) continue;
      const auto d = g.qubits[0] > g.qubits[1] ? g.qubits[0] - g.qubits[1] : g.qubits[1] - g.qubits[0];
      EXPECT_LE(d, 2u);
    }
  }
}

TEST(Grover, PairingAndValidation) {
  const auto c = bench::grover(4, 1);
  std::set<QubitPair> pairs;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::CZ) pairs.insert({g.qubits[0], g.qubits[1]});
  }
  EXPECT_EQ(pairs, (std::set<QubitPair>{{0, 2}, {1, 3}}));
  EXPECT_THROW(bench::grover(4, 0), InvalidArgument);
  EXPECT_THROW(bench::grover(5, 1), InvalidArgument);
  EXPECT_THROW(bench::grover(2, 1), InvalidArgument);
}

TEST(Qaoa, PathGraphAndEmptyGraph) {
  const auto path = make_graph(3, {{0, 1}, {1, 2}});
  const auto c = bench::qaoa(path, 1, "path");
  EXPECT_EQ(c.size(), 12u);
  EXPECT_EQ(c.two_qubit_count(), 4u);
  const auto empty = bench::qaoa(make_graph(3, {}), 1, "e");
  EXPECT_EQ(empty.size(), 6u);
  EXPECT_EQ(empty.two_qubit_count(), 0u);
  EXPECT_THROW(bench::qaoa(path, 0, "x"), InvalidArgument);
}

TEST(Qaoa, UnrewiredSmallWorldIsRingLocal) {
  BenchSpec s;
  s.family = Family::QAOA_WS;
  s.n = 32;
  s.rewiring = 0.0;
  for (const auto& g : generate(s).gates()) {
    if (g.arity() == 2) {
      EXPECT_LE(circular_distance(g.qubits[0], g.qubits[1], s.n), s.ring_degree / 2);
    }
  }
}

TEST(Vqe, Layouts) {
  const auto par = bench::vqe_hea(4, 1, bench::EntanglerLayout::Parallel);
  std::vector<QubitPair> cx;
  for (const auto& g : par.gates()) {
    if (g.kind == GateKind::CNOT) cx.emplace_back(g.qubits[0], g.qubits[1]);
  }
  EXPECT_EQ(cx, (std::vector<QubitPair>{{0, 1}, {2, 3}, {1, 2}}));
  EXPECT_EQ(par.size() - cx.size(), 8u);
  EXPECT_EQ(slice(par).depth(), 4u);
  EXPECT_EQ(slice(bench::vqe_hea(8, 1, bench::EntanglerLayout::Sequential)).depth(), 2u + 7u);

  auto seq2 = bench::vqe_hea(2, 2, bench::EntanglerLayout::Sequential);
  auto par2 = bench::vqe_hea(2, 2, bench::EntanglerLayout::Parallel);
  EXPECT_TRUE(std::equal(seq2.gates().begin(), seq2.gates().end(), par2.gates().begin(), par2.gates().end()));

  for (const auto layout : {bench::EntanglerLayout::Sequential, bench::EntanglerLayout::Parallel}) {
    for (const auto& g : bench::vqe_hea(16, 2, layout).gates()) {
      if (g.arity() == 2) {
        EXPECT_EQ(g.qubits[1], g.qubits[0] + 1);
      }
    }
  }
  EXPECT_THROW(bench::vqe_hea(1, 1, bench::EntanglerLayout::Parallel), InvalidArgument);
  EXPECT_THROW(bench::vqe_hea(4, 0, bench::EntanglerLayout::Parallel), InvalidArgument);
}

TEST(Ghz, OneQubitToAll) {
  for (const auto& g : bench::ghz(16).gates()) {
    if (g.arity() == 2) {
      EXPECT_EQ(g.kind, GateKind::CNOT);
      EXPECT_EQ(g.qubits[0], 0u);
    }
  }
}

TEST(Scaling, LogLogSlopes) {
  const std::vector<std::size_t> sizes{16, 32, 64, 128, 256, 512};
  const auto slope = [&](Family f) {
    std::vector<double> xs, ys;
    for (const auto n : sizes) {
      BenchSpec s;
      s.family = f;
      s.n = n;
      xs.push_back(static_cast<double>(n));
      ys.push_back(static_cast<double>(generate(s).size()));
    }
    return loglog_slope(xs, ys);
  };
  for (const Family f : {Family::GHZ, Family::Cuccaro, Family::VQE_HEA1, Family::VQE_HEA2, Family::QAOA_WS, Family::Grover}) {
    EXPECT_NEAR(slope(f), 1.0, 0.15) << family_name(f);
  }
  EXPECT_NEAR(slope(Family::QFT), 2.0, 0.15);
}

TEST(Graphs, ErdosRenyiExtremes) {
  EXPECT_EQ(erdos_renyi(10, 0.0, 3).edge_count(), 0u);
  EXPECT_EQ(erdos_renyi(10, 1.0, 3).edge_count(), 45u);
  EXPECT_THROW(erdos_renyi(1, 0.5, 1), InvalidArgument);
  EXPECT_THROW(erdos_renyi(10, 1.5, 1), InvalidArgument);
}

TEST(Graphs, ErdosRenyiEdgeCountNearExpectation) {
  const double expected = 0.2 * 512 * 511 / 2;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = erdos_renyi(512, 0.2, seed);
    EXPECT_NEAR(static_cast<double>(g.edge_count()), expected, 0.05 * expected) << "seed " << seed;
  }
}

TEST(Graphs, SeedDeterminesGraph) {
  EXPECT_EQ(erdos_renyi(64, 0.2, 11), erdos_renyi(64, 0.2, 11));
  EXPECT_NE(erdos_renyi(64, 0.2, 11), erdos_renyi(64, 0.2, 12));
  EXPECT_EQ(watts_strogatz(64, 4, 0.3, 5), watts_strogatz(64, 4, 0.3, 5));
  EXPECT_NE(watts_strogatz(64, 4, 0.3, 5), watts_strogatz(64, 4, 0.3, 6));
}

TEST(Graphs, PortableStream) {
  // Raw words of std::mt19937_64 are fixed by the standard (10000th = 9981545732273789042).
  PortableRng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  EXPECT_EQ(x, 9981545732273789042ull);
  PortableRng a(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.below(7), 7u);
  }
}

TEST(Graphs, WattsStrogatzShape) {
  const auto ring = watts_strogatz(20, 4, 0.0, 1);
  EXPECT_EQ(ring.edge_count(), 40u);
  for (const auto& [u, v] : ring.edges) EXPECT_LE(circular_distance(u, v, 20), 2u);
  for (const double beta : {0.1, 0.5, 1.0}) {
    const auto g = watts_strogatz(50, 6, beta, 9);
    EXPECT_EQ(g.edge_count(), 150u);
    EXPECT_NO_THROW(make_graph(g.vertices, g.edges));  // simple graph
  }
  EXPECT_THROW(watts_strogatz(10, 3, 0.1, 1), InvalidArgument);
  EXPECT_THROW(watts_strogatz(4, 4, 0.1, 1), InvalidArgument);
  EXPECT_THROW(watts_strogatz(10, 4, -0.1, 1), InvalidArgument);
}
