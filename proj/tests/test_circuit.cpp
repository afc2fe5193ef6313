#include <gtest/gtest.h>

#include "qtraffic/benchgen.hpp"
#include "qtraffic/circuit.hpp"

using namespace qtraffic;

namespace {

std::vector<std::vector<std::size_t>> slices_of(const SlicedCircuit& s) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t t = 0; t < s.depth(); ++t) out.emplace_back(s.slice(t).begin(), s.slice(t).end());
  return out;
}

}  // namespace

TEST(Circuit, RejectsOutOfRangeAndRepeatedOperands) {
  Circuit c("c", 2);
  EXPECT_THROW(c.append(gates::h(2)), InvalidArgument);
  EXPECT_THROW(c.append(gates::cnot(1, 1)), InvalidArgument);
  EXPECT_NO_THROW(c.append(gates::cnot(1, 0)));
  EXPECT_EQ(c.size(), 1u);
}

TEST(Circuit, NormalizesUnusedFields) {
  Circuit c("c", 2);
  c.append(Gate{GateKind::H, {1, 1}, 3.0});
  EXPECT_EQ(c.gates()[0].qubits[1], 0u);
  EXPECT_EQ(c.gates()[0].angle, 0.0);
}

TEST(Slice, GhzChainIsFullySerial) {
  const auto s = slice(bench::ghz(4));
  EXPECT_EQ(s.depth(), 4u);
  EXPECT_EQ(slices_of(s), (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {3}}));
}

TEST(Slice, EmptyCircuitHasNoSlices) {
  const auto s = slice(Circuit("empty", 3));
  EXPECT_EQ(s.depth(), 0u);
  const auto g = virtual_trace(s);
  EXPECT_EQ(g.rows(), 0u);
  EXPECT_EQ(g.cols(), 0u);
}

TEST(Slice, HandLayering) {
  Circuit c("c", 2);
  c.append(gates::h(0));
  c.append(gates::h(1));
  c.append(gates::cnot(0, 1));
  const auto s = slice(c);
  EXPECT_EQ(slices_of(s), (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
  EXPECT_TRUE(s.interacts(1, 0, 1));
  EXPECT_FALSE(s.interacts(0, 1, 0));
  const auto g = virtual_trace(s);
  for (std::size_t q = 0; q < 2; ++q) {
    for (std::size_t t = 0; t < 2; ++t) EXPECT_EQ(g.at(q, t), Cell::Compute);
  }
}

TEST(VirtualTrace, GhzFour) {
  const auto g = virtual_trace(slice(bench::ghz(4)));
  ASSERT_EQ(g.rows(), 4u);
  ASSERT_EQ(g.cols(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(g.at(0, t), Cell::Compute);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(g.at(3, t), t == 3 ? Cell::Compute : Cell::Idle);
}

class SliceProperties : public ::testing::TestWithParam<Family> {};

TEST_P(SliceProperties, InvariantsHoldOnBenchmarks) {
  for (const std::size_t n : {4u, 8u, 16u, 32u}) {
    BenchSpec spec;
    spec.family = GetParam();
    spec.n = n;
    const Circuit c = generate(spec);
    const auto s = slice(c);

    std::size_t total = 0;
    std::vector<std::size_t> last_slice(c.width(), 0);
    std::vector<bool> seen(c.width(), false);
    for (std::size_t t = 0; t < s.depth(); ++t) {
      std::vector<bool> used(c.width(), false);
      for (const std::size_t g : s.slice(t)) {
        ++total;
        EXPECT_EQ(s.slice_of(g), t);
        for (const Qubit q : c.gates()[g].operands()) {
          EXPECT_FALSE(used[q]) << "qubit shared within a slice";
          used[q] = true;
        }
      }
    }
    EXPECT_EQ(total, c.size());
    // Program order per qubit maps to strictly increasing slices.
    for (std::size_t g = 0; g < c.size(); ++g) {
      for (const Qubit q : c.gates()[g].operands()) {
        if (seen[q]) {
          EXPECT_GT(s.slice_of(g), last_slice[q]);
        }
        seen[q] = true;
        last_slice[q] = s.slice_of(g);
      }
    }
    const auto per_qubit = c.gates_per_qubit();
    EXPECT_GE(s.depth(), *std::max_element(per_qubit.begin(), per_qubit.end()));
    // Flattening in slice order and re-slicing is a fixed point.
    const auto again = slice(flatten(s));
    EXPECT_EQ(again.depth(), s.depth());
    for (std::size_t t = 0; t < s.depth(); ++t) EXPECT_EQ(again.slice(t).size(), s.slice(t).size());
  }
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, SliceProperties, ::testing::ValuesIn(kAllFamilies),
                         [](const auto& info) { return std::string(family_name(info.param)); });
