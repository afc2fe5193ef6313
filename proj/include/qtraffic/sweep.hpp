#pragma once

// Strong- and weak-scaling experiment grids.
//
// Plan file (JSON):
//   {
//     "version": 1,
//     "regime": "strong" | "weak",
//     "capacity": 16,            // strong: qubits per core, N = cores * capacity
//     "total_qubits": 512,       // weak: N fixed, capacity = N / cores
//     "cores": [4, 16, 60],      // default depends on the regime
//     "families": ["qft", {"family": "qaoa_er", "edge_probability": 0.2}],
//     "seeds": [1],
//     "mapper": {"sigma": 0.5, "tau": 1},
//     "metrics": {"count_measure": true},
//     "timeout_seconds": 600,
//     "workers": 1,
//     "traces": false,
//     "trends": [{"kind": "increasing", "column": "temporal_locality", "family": "qft"}]
//   }
//
// Outputs: metrics.csv, metrics.json (deterministic), metadata.json (timing),
// and traces/<point>/trace.json when traces are enabled.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qtraffic/benchgen.hpp"
#include "qtraffic/config.hpp"
#include "qtraffic/error.hpp"
#include "qtraffic/mapper.hpp"
#include "qtraffic/metrics.hpp"
#include "qtraffic/trace_io.hpp"

namespace qtraffic {

enum class Regime : std::uint8_t { Strong, Weak };

inline std::string regime_name(Regime r) { return r == Regime::Strong ? "strong" : "weak"; }

struct TrendAssertion {
  std::string kind;           // in_range | increasing | decreasing | nondecreasing | nonincreasing
                              // | endpoints_ge | greater_than_family | loglog_slope
  std::string column;         // metric or run column
  std::string family;         // empty: every family separately (or all rows for in_range)
  std::string x = "cores";    // ordering column
  std::string other_family;   // greater_than_family
  std::optional<double> lo;   // in_range, loglog_slope
  std::optional<double> hi;
};

struct SweepPlan {
  Regime regime = Regime::Strong;
  std::vector<BenchSpec> families;  // templates; n is set per point
  std::size_t capacity = 16;
  std::size_t total_qubits = 512;
  std::vector<std::size_t> cores;   // empty: regime default
  std::vector<std::uint64_t> seeds{1};
  MapperOptions mapper;
  MetricsOptions metrics;
  double timeout_seconds = 600.0;
  std::size_t workers = 1;
  bool traces = false;
  std::vector<TrendAssertion> trends;

  std::vector<std::size_t> core_list() const {
    if (!cores.empty()) return cores;
    return regime == Regime::Strong ? std::vector<std::size_t>{4, 16, 60} : std::vector<std::size_t>{4, 16, 32};
  }
};

struct SweepPoint {
  BenchSpec spec;
  Architecture arch;
};

/// Grid in family-major, then core, then seed order.
inline std::vector<SweepPoint> sweep_points(const SweepPlan& plan) {
  if (plan.seeds.empty()) throw InvalidArgument("sweep plan needs at least one seed");
  if (plan.regime == Regime::Strong && plan.capacity < 1) throw InvalidArgument("strong sweep needs capacity >= 1");
  std::vector<SweepPoint> out;
  for (const auto& fam : plan.families) {
    for (const std::size_t c : plan.core_list()) {
      if (c < 1) throw InvalidArgument("core count must be >= 1");
      Architecture arch{c, 0};
      std::size_t n = 0;
      if (plan.regime == Regime::Strong) {
        arch.capacity = plan.capacity;
        n = c * plan.capacity;
      } else {
        if (plan.total_qubits % c != 0) {
          throw InvalidArgument("weak sweep: " + std::to_string(plan.total_qubits) + " qubits do not divide into " +
                                std::to_string(c) + " cores");
        }
        arch.capacity = plan.total_qubits / c;
        n = plan.total_qubits;
      }
      for (const auto seed : plan.seeds) {
        SweepPoint p{fam, arch};
        p.spec.n = n;
        p.spec.seed = seed;
        out.push_back(p);
      }
    }
  }
  return out;
}

struct SweepRow {
  SweepPoint point;
  std::string status;      // ok | infeasible | timeout | error
  std::string diagnostic;  // empty when ok
  std::optional<MetricsReport> report;
  double wall_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid order
  double wall_seconds = 0.0;
};

inline std::string point_label(const SweepPoint& p) {
  return std::string(family_name(p.spec.family)) + "_n" + std::to_string(p.spec.n) + "_c" +
         std::to_string(p.arch.cores) + "_s" + std::to_string(p.spec.seed);
}

/// Generate, map and measure one point; failures land in the row.
inline SweepRow run_point(const SweepPoint& point, const SweepPlan& plan,
                          const std::optional<std::filesystem::path>& trace_dir = std::nullopt) {
  SweepRow row{point, "ok", {}, std::nullopt, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    MapperOptions opt = plan.mapper;
    if (plan.timeout_seconds > 0) {
      opt.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(plan.timeout_seconds));
    }
    const auto mp = map_circuit(slice(generate(point.spec)), point.arch, opt);
    row.report = compute_metrics(mp, plan.metrics);
    if (trace_dir) {
      const auto dir = *trace_dir / point_label(point);
      std::filesystem::create_directories(dir);
      write_text_file(dir / "trace.json", dump_json(trace_to_json(mp)));
    }
  } catch (const Infeasible& e) {
    row.status = "infeasible";
    row.diagnostic = e.what();
  } catch (const Timeout& e) {
    row.status = "timeout";
    row.diagnostic = e.what();
  } catch (const IoError&) {
    throw;
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  } catch (const Error& e) {
    row.status = "error";
    row.diagnostic = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

/// Runs every point on `plan.workers` threads; rows come back in grid order.
inline SweepResult run_sweep(const SweepPlan& plan, const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  const auto points = sweep_points(plan);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<std::filesystem::path> trace_dir;
  if (out_dir && plan.traces) trace_dir = *out_dir / "traces";

  SweepResult result;
  result.rows.resize(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        result.rows[i] = run_point(points[i], plan, trace_dir);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(points.size());
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(plan.workers, 1, std::max<std::size_t>(points.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ---------------------------------------------------------------------------
// Output

inline std::vector<std::string> sweep_columns() {
  std::vector<std::string> cols{"family", "seed"};
  for (const auto& c : metrics_columns()) cols.push_back(c);
  cols.emplace_back("status");
  cols.emplace_back("diagnostic");
  return cols;
}

inline std::string sweep_csv_row(const SweepRow& row, const SweepPlan& plan) {
  std::vector<std::string> f{std::string(family_name(row.point.spec.family)), std::to_string(row.point.spec.seed)};
  if (row.report) {
    for (auto& v : metrics_fields(*row.report)) f.push_back(std::move(v));
  } else {
    f.push_back(bench::instance_name(family_name(row.point.spec.family), row.point.spec.n));
    f.push_back(std::to_string(row.point.spec.n));
    f.push_back(std::to_string(row.point.arch.cores));
    f.push_back(std::to_string(row.point.arch.capacity));
    f.push_back(format_double(plan.mapper.sigma));
    f.push_back(std::to_string(plan.mapper.tau));
    while (f.size() < 2 + metrics_columns().size()) f.emplace_back("NA");
  }
  f.push_back(row.status);
  f.push_back(csv_escape(row.diagnostic));
  return csv_join(f);
}

inline std::string sweep_csv(const SweepResult& r, const SweepPlan& plan) {
  std::string out = csv_header(sweep_columns()) + "\n";
  for (const auto& row : r.rows) out += sweep_csv_row(row, plan) + "\n";
  return out;
}

inline Json sweep_json(const SweepResult& r, const SweepPlan& plan) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"family", std::string(family_name(row.point.spec.family))},
                    {"seed", row.point.spec.seed},
                    {"n", row.point.spec.n},
                    {"cores", row.point.arch.cores},
                    {"capacity", row.point.arch.capacity},
                    {"status", row.status},
                    {"diagnostic", row.diagnostic},
                    {"metrics", row.report ? metrics_to_json(*row.report) : Json(nullptr)}});
  }
  return Json{{"format", "qtraffic-sweep"}, {"version", 1}, {"regime", regime_name(plan.regime)}, {"rows", std::move(rows)}};
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes metrics.csv, metrics.json and metadata.json into `dir`.
inline void write_sweep_outputs(const SweepResult& r, const SweepPlan& plan, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "metrics.csv", sweep_csv(r, plan));
  write_text_file(dir / "metrics.json", dump_json(sweep_json(r, plan)));
  Json points = Json::array();
  for (const auto& row : r.rows) points.push_back({{"point", point_label(row.point)}, {"wall_seconds", row.wall_seconds}});
  write_text_file(dir / "metadata.json", dump_json(Json{{"finished_utc", utc_timestamp()},
                                                        {"wall_seconds", r.wall_seconds},
                                                        {"workers", plan.workers},
                                                        {"points", std::move(points)}}));
}

// ---------------------------------------------------------------------------
// Plan parsing

inline TrendAssertion trend_from_json(const Json& j) {
  detail::require_keys(j, {"kind", "column", "family", "x", "other_family", "lo", "hi"}, "trend");
  TrendAssertion a;
  detail::read_key(j, "kind", a.kind);
  detail::read_key(j, "column", a.column);
  detail::read_key(j, "family", a.family);
  detail::read_key(j, "x", a.x);
  detail::read_key(j, "other_family", a.other_family);
  if (j.contains("lo")) a.lo = j.at("lo").get<double>();
  if (j.contains("hi")) a.hi = j.at("hi").get<double>();
  return a;
}

inline SweepPlan plan_from_json(const Json& j) {
  try {
    detail::require_keys(j,
                         {"version", "regime", "capacity", "total_qubits", "cores", "families", "seeds", "mapper",
                          "metrics", "timeout_seconds", "workers", "traces", "trends"},
                         "plan");
    detail::check_version(j, 1, "plan");
    SweepPlan plan;
    if (j.contains("regime")) {
      const auto r = j.at("regime").get<std::string>();
      if (r == "strong") plan.regime = Regime::Strong;
      else if (r == "weak") plan.regime = Regime::Weak;
      else throw InvalidArgument("unknown regime '" + r + "'");
    }
    detail::read_key(j, "capacity", plan.capacity);
    detail::read_key(j, "total_qubits", plan.total_qubits);
    detail::read_key(j, "cores", plan.cores);
    detail::read_key(j, "seeds", plan.seeds);
    detail::read_key(j, "timeout_seconds", plan.timeout_seconds);
    detail::read_key(j, "workers", plan.workers);
    detail::read_key(j, "traces", plan.traces);
    if (j.contains("families")) {
      for (const auto& f : j.at("families")) {
        plan.families.push_back(f.is_string() ? bench_from_json(Json{{"family", f}}) : bench_from_json(f));
      }
    }
    if (j.contains("mapper")) plan.mapper = mapper_from_json(j.at("mapper"));
    if (j.contains("metrics")) plan.metrics = metrics_options_from_json(j.at("metrics"));
    if (j.contains("trends")) {
      for (const auto& t : j.at("trends")) plan.trends.push_back(trend_from_json(t));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed plan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Trend checks

struct TrendOutcome {
  TrendAssertion assertion;
  bool pass = false;
  std::string detail;
};

/// Numeric value of `column` in a row; empty when not applicable or failed.
inline std::optional<double> column_value(const SweepRow& row, const std::string& column) {
  const auto& p = row.point;
  if (column == "n") return static_cast<double>(p.spec.n);
  if (column == "cores") return static_cast<double>(p.arch.cores);
  if (column == "capacity") return static_cast<double>(p.arch.capacity);
  if (column == "seed") return static_cast<double>(p.spec.seed);
  const auto* r = row.report ? &*row.report : nullptr;
  const auto num = [&](auto v) -> std::optional<double> {
    if (!r) return std::nullopt;
    return static_cast<double>(v);
  };
  const auto opt = [&](const std::optional<double>& v) -> std::optional<double> { return r ? v : std::nullopt; };
  if (column == "sigma") return num(r ? r->sigma : 0);
  if (column == "tau") return num(r ? r->tau : 0);
  if (column == "gates") return num(r ? r->gates : 0);
  if (column == "two_qubit_gates") return num(r ? r->two_qubit_gates : 0);
  if (column == "depth") return num(r ? r->depth : 0);
  if (column == "t_exec") return num(r ? r->t_exec : 0);
  if (column == "ccr") return opt(r ? r->ccr : std::nullopt);
  if (column == "qubit_hotspotness") return opt(r ? r->qubit_hotspotness : std::nullopt);
  if (column == "core_hotspotness") return opt(r ? r->core_hotspotness : std::nullopt);
  if (column == "longest_gate_sequence") return num(r ? r->longest_gate_sequence : 0);
  if (column == "qubit_lifespan") return num(r ? r->qubit_lifespan : 0);
  if (column == "burstiness") return opt(r ? r->burstiness : std::nullopt);
  if (column == "temporal_locality") return num(r ? r->temporal_locality : 0);
  if (column == "spatial_locality") return opt(r ? r->spatial_locality : std::nullopt);
  if (column == "communication_slices") return num(r ? r->communication_slices : 0);
  if (column == "parallel_slices") return num(r ? r->parallel_slices : 0);
  if (column == "computation_slices") return num(r ? r->computation_slices : 0);
  throw InvalidArgument("unknown column '" + column + "'");
}

namespace detail {

/// x -> mean of `column` over seeds, for one family (rows with a value only).
inline std::map<double, double> family_series(const SweepResult& r, Family fam, const std::string& x,
                                              const std::string& column) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& row : r.rows) {
    if (row.point.spec.family != fam) continue;
    const auto xv = column_value(row, x);
    const auto yv = column_value(row, column);
    if (!xv || !yv) continue;
    auto& [sum, count] = acc[*xv];
    sum += *yv;
    ++count;
  }
  std::map<double, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / static_cast<double>(v.second);
  return out;
}

inline std::string describe(const std::map<double, double>& s) {
  std::string out;
  for (const auto& [x, y] : s) out += (out.empty() ? "" : " ") + format_double(x) + ":" + format_double(y);
  return "[" + out + "]";
}

inline Family family_or_throw(const std::string& name) {
  const auto f = parse_family(name);
  if (!f) throw InvalidArgument("unknown family '" + name + "'");
  return *f;
}

}  // namespace detail

inline TrendOutcome check_trend(const SweepResult& r, const TrendAssertion& a) {
  TrendOutcome out{a, true, {}};
  // Validates column names even when no row carries a value.
  SweepRow probe;
  probe.report = MetricsReport{};
  (void)column_value(probe, a.column);
  (void)column_value(probe, a.x);

  std::vector<Family> fams;
  if (!a.family.empty()) {
    fams.push_back(detail::family_or_throw(a.family));
  } else {
    for (const auto& row : r.rows) {
      if (std::find(fams.begin(), fams.end(), row.point.spec.family) == fams.end()) fams.push_back(row.point.spec.family);
    }
  }
  std::string seen;  // series that passed, reported when everything passes
  const auto fail = [&](const std::string& why) {
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") + why;
  };
  const auto note = [&](const std::string& what) { seen += (seen.empty() ? "" : "; ") + what; };

  if (a.kind == "in_range") {
    if (!a.lo && !a.hi) throw InvalidArgument("in_range needs lo and/or hi");
    std::size_t checked = 0;
    for (const auto& row : r.rows) {
      if (std::find(fams.begin(), fams.end(), row.point.spec.family) == fams.end()) continue;
      const auto v = column_value(row, a.column);
      if (!v) continue;
      ++checked;
      if ((a.lo && *v < *a.lo) || (a.hi && *v > *a.hi)) fail(point_label(row.point) + " " + a.column + "=" + format_double(*v));
    }
    if (out.pass) out.detail = std::to_string(checked) + " values in range";
    return out;
  }

  for (const Family f : fams) {
    const std::string fname(family_name(f));
    const auto s = detail::family_series(r, f, a.x, a.column);
    if (a.kind == "increasing" || a.kind == "decreasing" || a.kind == "nondecreasing" || a.kind == "nonincreasing") {
      if (s.size() < 2) {
        fail(fname + ": fewer than two points");
        continue;
      }
      for (auto it = std::next(s.begin()); it != s.end(); ++it) {
        const double prev = std::prev(it)->second;
        const double cur = it->second;
        const bool ok = a.kind == "increasing"      ? cur > prev
                        : a.kind == "decreasing"    ? cur < prev
                        : a.kind == "nondecreasing" ? cur >= prev
                                                    : cur <= prev;
        if (!ok) {
          fail(fname + " " + detail::describe(s));
          break;
        }
      }
      note(fname + " " + detail::describe(s));
    } else if (a.kind == "endpoints_ge") {
      if (s.size() < 2) {
        fail(fname + ": fewer than two points");
        continue;
      }
      if (!(s.begin()->second >= s.rbegin()->second)) fail(fname + " " + detail::describe(s));
      note(fname + " " + detail::describe(s));
    } else if (a.kind == "greater_than_family") {
      const auto other = detail::family_series(r, detail::family_or_throw(a.other_family), a.x, a.column);
      std::size_t common = 0;
      for (const auto& [x, y] : s) {
        const auto it = other.find(x);
        if (it == other.end()) continue;
        ++common;
        if (!(y > it->second)) fail(fname + " at " + a.x + "=" + format_double(x) + ": " + format_double(y) + " <= " + format_double(it->second));
      }
      if (common == 0) fail(fname + ": no common points with " + a.other_family);
      note(fname + " " + detail::describe(s) + " vs " + a.other_family + " " + detail::describe(other));
    } else if (a.kind == "loglog_slope") {
      if (!a.lo || !a.hi) throw InvalidArgument("loglog_slope needs lo and hi");
      std::vector<double> xs, ys;
      for (const auto& [x, y] : s) {
        if (x > 0 && y > 0) {
          xs.push_back(std::log(x));
          ys.push_back(std::log(y));
        }
      }
      if (xs.size() < 2) {
        fail(fname + ": fewer than two positive points");
        continue;
      }
      const double k = static_cast<double>(xs.size());
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / k;
        my += ys[i] / k;
      }
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      const double slope = sxy / sxx;
      if (slope < *a.lo || slope > *a.hi) fail(fname + " slope " + format_double(slope));
      else note(fname + " slope " + format_double(slope));
    } else {
      throw InvalidArgument("unknown trend kind '" + a.kind + "'");
    }
  }
  if (fams.empty() && a.kind != "in_range") fail("no rows");
  if (out.pass) out.detail = seen;
  return out;
}

inline std::vector<TrendOutcome> trend_check(const SweepResult& r, const std::vector<TrendAssertion>& assertions) {
  std::vector<TrendOutcome> out;
  for (const auto& a : assertions) out.push_back(check_trend(r, a));
  return out;
}

}  // namespace qtraffic
