// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "qtraffic/qtraffic.hpp"
#include "support/bruteforce.hpp"
#include "support/random_circuits.hpp"

using namespace qtraffic;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void fail(const std::string& why) {
    if (pass) note.str("");
    pass = false;
    note << why << "; ";
  }
};

BenchSpec spec_of(Family f, std::size_t n) {
  BenchSpec s;
  s.family = f;
  s.n = n;
  return s;
}

TrendAssertion trend(std::string kind, std::string column, std::string family = "", std::string other = "",
                     std::string x = "cores", std::optional<double> lo = std::nullopt,
                     std::optional<double> hi = std::nullopt) {
  TrendAssertion a;
  a.kind = std::move(kind);
  a.column = std::move(column);
  a.family = std::move(family);
  a.other_family = std::move(other);
  a.x = std::move(x);
  a.lo = lo;
  a.hi = hi;
  return a;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]) / k;
    my += std::log(ys[i]) / k;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return sxy / sxx;
}

std::size_t closed_form(const BenchSpec& s) {
  const std::size_t n = s.n;
  switch (s.family) {
    case Family::GHZ: return n;
    case Family::QFT: return n + n * (n - 1) / 2 + n / 2;
    case Family::Cuccaro: return 34 * ((n - 2) / 2) + 1;
    case Family::Grover: return n + s.iterations * 6 * n;
    case Family::QAOA_ER:
    case Family::QAOA_WS: return n + s.layers * (3 * problem_graph(s).edge_count() + n);
    case Family::VQE_HEA1:
    case Family::VQE_HEA2: return s.layers * (3 * n - 1);
  }
  return 0;
}

void gate_counts(Outcome& o) {
  std::size_t checked = 0;
  for (const Family f : kAllFamilies) {
    for (const std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
      const auto s = spec_of(f, n);
      const auto got = generate(s).size();
      ++checked;
      if (got != closed_form(s)) o.fail(std::string(family_name(f)) + "(" + std::to_string(n) + ")=" + std::to_string(got));
    }
  }
  if (o.pass) o.note << checked << " counts exact";
}

void scaling(Outcome& o) {
  const auto slope = [](Family f) {
    std::vector<double> xs, ys;
    for (const std::size_t n : {16u, 32u, 64u, 128u, 256u, 512u}) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(static_cast<double>(generate(spec_of(f, n)).size()));
    }
    return loglog_slope(xs, ys);
  };
  const auto check = [&](Family f, double target) {
    const double k = slope(f);
    o.note << family_name(f) << "=" << format_double(std::round(k * 1000) / 1000) << " ";
    if (std::abs(k - target) > 0.15) o.fail(std::string(family_name(f)) + " slope " + format_double(k));
  };
  for (const Family f : {Family::GHZ, Family::Cuccaro, Family::VQE_HEA1, Family::VQE_HEA2, Family::QAOA_WS, Family::Grover})
    check(f, 1.0);
  check(Family::QFT, 2.0);
}

void mapper_validity(Outcome& o) {
  std::vector<Architecture> archs{{4, 16}, {16, 16}, {4, 128}, {16, 32}, {32, 16}};
  std::size_t runs = 0;
  for (const Family f : kAllFamilies) {
    for (const auto& arch : archs) {
      const auto mp = map_circuit(slice(generate(spec_of(f, arch.cores * arch.capacity))), arch);
      const auto issues = check_program(mp);
      ++runs;
      if (!issues.empty()) o.fail(std::string(family_name(f)) + " on " + std::to_string(arch.cores) + "x" +
                                  std::to_string(arch.capacity) + ": " + issues.front());
    }
  }
  if (o.pass) o.note << runs << " runs, zero co-location or capacity violations";
}

void brute_force(Outcome& o) {
  std::size_t instances = 0, separable = 0, optimal = 0;
  const auto compare = [&](const std::string& label, const SlicedCircuit& s, const Architecture& arch) {
    const auto best = testing::brute_force_teleports(s, arch);
    if (!best) {
      try {
        (void)map_circuit(s, arch);
        o.fail(label + ": mapper found a plan the oracle calls infeasible");
      } catch (const Infeasible&) {
      }
      return;
    }
    ++instances;
    const auto mp = map_circuit(s, arch);
    const std::size_t got = mp.teleports.size();
    optimal += got == *best;
    if (got < *best) o.fail(label + ": " + std::to_string(got) + " below optimum " + std::to_string(*best));
    if (testing::separable_under_identity(s, arch)) {
      ++separable;
      if (got != 0) o.fail(label + ": separable but " + std::to_string(got) + " teleports");
    }
  };
  compare("ghz_8", slice(bench::ghz(8)), Architecture{2, 4});
  compare("vqe_hea2_8", slice(bench::vqe_hea(8, 1, bench::EntanglerLayout::Parallel)), Architecture{2, 4});
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const auto inst = testing::random_instance(seed);
    compare("random_" + std::to_string(seed), slice(inst.circuit), inst.arch);
  }
  if (instances < 50) o.fail("only " + std::to_string(instances) + " feasible instances");
  if (o.pass) o.note << instances << " instances, " << separable << " separable, " << optimal << " at optimum";
}

void metric_units(Outcome& o) {
  const auto near = [&](const std::optional<double>& v, double want, const std::string& what) {
    if (!v || std::abs(*v - want) > 1e-12) o.fail(what);
  };
  near(ccr(3, 1), 0.5, "CCR(3,1)");
  near(ccr(3, 0), 1.0, "CCR(3,0)");
  near(ccr(0, 2), -1.0, "CCR(0,2)");
  near(variance_to_mean(std::vector<int>{4, 0}), 2.0, "hotspotness([4,0])");
  near(variance_to_mean(std::vector<int>{3, 1, 3, 1}), 0.5, "hotspotness([3,1,3,1])");
  near(variance_to_mean(std::vector<std::size_t>{0, 4}), 2.0, "burstiness([0,4])");
  near(variance_to_mean(std::vector<std::size_t>{1, 1, 1}), 0.0, "burstiness([1,1,1])");
  if (variance_to_mean(std::vector<int>{0, 0})) o.fail("zero-mean ratio should be NA");
  for (const Family f : kAllFamilies) {
    const auto r = compute_metrics(map_circuit(slice(generate(spec_of(f, 16))), Architecture{1, 16}));
    const std::string name(family_name(f));
    near(r.ccr, 1.0, name + " single-core CCR");
    near(r.spatial_locality, 1.0, name + " single-core S");
    if (r.temporal_locality != 0) o.fail(name + " single-core T");
  }
  if (o.pass) o.note << "unit examples exact, single-core CCR=1 T=0 S=1";
}

SweepResult sweep(Regime regime, std::vector<std::size_t> cores) {
  SweepPlan p;
  p.regime = regime;
  for (const Family f : kAllFamilies) p.families.push_back(spec_of(f, 0));
  p.cores = std::move(cores);
  return run_sweep(p);
}

void trends(Outcome& o) {
  const auto strong = sweep(Regime::Strong, {4, 16});
  const auto weak = sweep(Regime::Weak, {4, 16, 32});
  for (const auto* r : {&strong, &weak}) {
    for (const auto& row : r->rows) {
      if (row.status != "ok") o.fail(point_label(row.point) + " " + row.status);
    }
  }
  const auto expect = [&](const SweepResult& r, const TrendAssertion& a) {
    const auto t = check_trend(r, a);
    if (!t.pass) o.fail(a.kind + " " + a.column + " " + a.family + ": " + t.detail);
  };
  expect(strong, trend("increasing", "temporal_locality", "qft"));
  expect(strong, trend("greater_than_family", "temporal_locality", "qft", "cuccaro", "n"));
  expect(weak, trend("endpoints_ge", "spatial_locality"));

  std::vector<double> ns, lgs;
  for (const std::size_t n : {16u, 32u, 64u, 128u, 256u, 512u}) {
    const auto c = generate(spec_of(Family::GHZ, n));
    ns.push_back(static_cast<double>(n));
    lgs.push_back(static_cast<double>(longest_gate_sequence(c)));
  }
  const double k = loglog_slope(ns, lgs);
  if (std::abs(k - 1.0) > 0.05) o.fail("GHZ LGS slope " + format_double(k));
  if (o.pass) o.note << "QFT T increasing, T(QFT)>T(Cuccaro), weak S(4)>=S(32) for 8 families, GHZ LGS slope " << std::round(k * 1000) / 1000;
}

void determinism(Outcome& o) {
  SweepPlan p;
  p.regime = Regime::Strong;
  for (const Family f : kAllFamilies) p.families.push_back(spec_of(f, 0));
  p.capacity = 8;
  p.cores = {2, 4};
  p.seeds = {1, 2};
  const auto a = run_sweep(p);
  p.workers = 2;
  const auto b = run_sweep(p);
  if (sweep_csv(a, p) != sweep_csv(b, p)) o.fail("CSV differs between runs");
  if (dump_json(sweep_json(a, p)) != dump_json(sweep_json(b, p))) o.fail("JSON differs between runs");
  std::size_t trips = 0;
  for (const Family f : kAllFamilies) {
    for (const std::size_t n : {8u, 32u, 64u}) {
      const auto c = generate(spec_of(f, n));
      const auto q = to_qasm(c);
      const auto back = parse_qasm(q);
      if (!(back == c) || to_qasm(back) != q) o.fail(std::string(family_name(f)) + " QASM round-trip");
      const auto mp = map_circuit(slice(c), Architecture{4, n / 4 + 1});
      const auto text = dump_json(trace_to_json(mp));
      const auto mp2 = trace_from_json(parse_json_text(text, "mem"));
      if (dump_json(trace_to_json(mp2)) != text || !(compute_metrics(mp2) == compute_metrics(mp)))
        o.fail(std::string(family_name(f)) + " trace round-trip");
      trips += 2;
    }
  }
  if (o.pass) o.note << "CSV/JSON byte-identical, " << trips << " round-trips lossless";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<void(Outcome&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "generator gate counts", 1.0, gate_counts},
      {2, "gate-count scaling exponents", 10.0, scaling},
      {3, "mapper validity and capacity", 600.0, mapper_validity},
      {4, "brute-force oracle equivalence", 120.0, brute_force},
      {5, "metric unit oracles", 60.0, metric_units},
      {6, "directional trends", 600.0, trends},
      {7, "determinism and round-trips", 120.0, determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) o.fail("took " + std::to_string(secs) + " s");
    all = all && o.pass;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.note.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
