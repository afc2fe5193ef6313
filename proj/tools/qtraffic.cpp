// qtraffic command-line driver.
//
// Exit codes: 0 ok, 1 other failure (timeout, failed trend check),
// 2 usage or parse error, 3 infeasible mapping, 4 I/O error.
// Failures print exactly one line to stderr: "error: <kind>: <message>".

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "qtraffic/qtraffic.hpp"

namespace {

using namespace qtraffic;

constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct BenchFlags {
  std::string config;
  std::string family;
  std::size_t n = 0;
  std::size_t iterations = 0;
  std::size_t layers = 0;
  std::uint64_t seed = 0;
  double edge_probability = 0;
  std::size_t ring_degree = 0;
  double rewiring = 0;
  CLI::Option* o_family = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_iterations = nullptr;
  CLI::Option* o_layers = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_ring = nullptr;
  CLI::Option* o_beta = nullptr;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON run configuration; flags override it");
    o_family = app->add_option("-f,--family", family, "cuccaro|grover|ghz|qft|qaoa_er|qaoa_ws|vqe_hea1|vqe_hea2");
    o_n = app->add_option("-n,--qubits", n, "total qubits");
    o_iterations = app->add_option("--iterations", iterations, "Grover iterations");
    o_layers = app->add_option("--layers", layers, "QAOA/VQE layers");
    o_seed = app->add_option("--seed", seed, "problem-graph seed");
    o_p = app->add_option("--edge-probability", edge_probability, "Erdos-Renyi edge probability");
    o_ring = app->add_option("--ring-degree", ring_degree, "Watts-Strogatz lattice degree");
    o_beta = app->add_option("--rewiring", rewiring, "Watts-Strogatz rewiring probability");
  }

  bool any_bench_flag() const { return o_family->count() > 0; }

  void apply(BenchSpec& s) const {
    if (o_family->count()) {
      const auto f = parse_family(family);
      if (!f) throw InvalidArgument("unknown family '" + family + "'");
      s.family = *f;
    }
    if (o_n->count()) s.n = n;
    if (o_iterations->count()) s.iterations = iterations;
    if (o_layers->count()) s.layers = layers;
    if (o_seed->count()) s.seed = seed;
    if (o_p->count()) s.edge_probability = edge_probability;
    if (o_ring->count()) s.ring_degree = ring_degree;
    if (o_beta->count()) s.rewiring = rewiring;
  }
};

RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return run_config_from_json(parse_json_text(read_text_file(path), path));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
  } else {
    write_text_file(path, text);
  }
}

std::string metrics_csv_text(const MetricsReport& r) {
  return csv_header(metrics_columns()) + "\n" + metrics_csv_row(r) + "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Benchmark generation, multi-core mapping and traffic metrics for quantum circuits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qtraffic 0.1.0");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a benchmark circuit as OpenQASM");
  BenchFlags gen_flags;
  gen_flags.add(gen);
  std::string gen_out;
  gen->add_option("-o,--output", gen_out, "output file (default stdout)");

  // map
  auto* map = app.add_subcommand("map", "Map a circuit onto a multi-core architecture");
  BenchFlags map_flags;
  map_flags.add(map);
  std::string map_qasm;
  std::size_t cores = 0;
  std::size_t capacity = 0;
  double sigma = 0.5;
  std::size_t tau = 1;
  std::size_t horizon = 0;
  double move_cost = 1.0;
  std::string map_trace = "trace.json";
  std::string map_metrics;
  std::string map_metrics_json;
  map->add_option("--qasm", map_qasm, "input circuit (instead of a generated benchmark)");
  auto* o_cores = map->add_option("-c,--cores", cores, "core count");
  auto* o_capacity = map->add_option("-q,--capacity", capacity, "qubits per core");
  auto* o_sigma = map->add_option("--sigma", sigma, "lookahead decay in (0, 1]");
  auto* o_tau = map->add_option("--tau", tau, "timeslices per communication wave");
  auto* o_horizon = map->add_option("--horizon", horizon, "lookahead depth in slices");
  auto* o_move_cost = map->add_option("--move-cost", move_cost, "partition charge per displaced qubit");
  map->add_option("-o,--trace", map_trace, "trace JSON output");
  map->add_option("--metrics", map_metrics, "metrics CSV output (default stdout)");
  map->add_option("--metrics-json", map_metrics_json, "metrics JSON output");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Compute metrics of a trace");
  std::string an_trace;
  std::string an_out;
  std::string an_json;
  bool no_measure = false;
  bool exclude_idle = false;
  bool virtual_lifespan = false;
  analyze->add_option("trace", an_trace, "trace JSON")->required();
  analyze->add_option("-o,--output", an_out, "metrics CSV output (default stdout)");
  analyze->add_option("--json", an_json, "metrics JSON output");
  analyze->add_flag("--no-measure", no_measure, "do not count MEASURE as a computation operation");
  analyze->add_flag("--exclude-idle", exclude_idle, "leave zero-op physical qubits out of qubit hotspotness");
  analyze->add_flag("--virtual-lifespan", virtual_lifespan, "measure lifespan on circuit slices");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a strong- or weak-scaling plan");
  std::string plan_path;
  std::string sweep_out = "sweep_out";
  std::size_t workers = 1;
  bool traces = false;
  sweep->add_option("plan", plan_path, "plan JSON")->required();
  sweep->add_option("-o,--out", sweep_out, "output directory");
  auto* o_workers = sweep->add_option("-j,--workers", workers, "parallel workers");
  auto* o_traces = sweep->add_flag("--traces", traces, "write a trace.json per point");

  // render
  auto* render = app.add_subcommand("render", "Draw a trace as an SVG heatmap");
  std::string rd_trace;
  std::string rd_out;
  bool rd_virtual = false;
  double cell = 4.0;
  render->add_option("trace", rd_trace, "trace JSON")->required();
  render->add_option("-o,--output", rd_out, "SVG output (default stdout)");
  render->add_flag("--virtual", rd_virtual, "draw the logical structure instead of the physical trace");
  render->add_option("--cell", cell, "cell size in pixels")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  if (*gen) {
    RunConfig cfg = load_config(gen_flags.config);
    gen_flags.apply(cfg.bench);
    emit(gen_out, to_qasm(generate(cfg.bench)));
    return 0;
  }

  if (*map) {
    RunConfig cfg = load_config(map_flags.config);
    map_flags.apply(cfg.bench);
    if (o_sigma->count()) cfg.mapper.sigma = sigma;
    if (o_tau->count()) cfg.mapper.tau = tau;
    if (o_horizon->count()) cfg.mapper.horizon = horizon;
    if (o_move_cost->count()) cfg.mapper.move_cost = move_cost;
    Architecture arch = cfg.arch.value_or(Architecture{0, 0});
    if (o_cores->count()) arch.cores = cores;
    if (o_capacity->count()) arch.capacity = capacity;
    if (arch.cores == 0 || arch.capacity == 0) throw InvalidArgument("map needs --cores and --capacity");
    if (!map_qasm.empty() && map_flags.any_bench_flag()) throw InvalidArgument("--qasm and --family are exclusive");
    const Circuit circuit = map_qasm.empty() ? generate(cfg.bench) : read_qasm_file(map_qasm);
    const auto mp = map_circuit(slice(circuit), arch, cfg.mapper);
    write_text_file(map_trace, dump_json(trace_to_json(mp)));
    const auto report = compute_metrics(mp, cfg.metrics);
    emit(map_metrics, metrics_csv_text(report));
    if (!map_metrics_json.empty()) write_text_file(map_metrics_json, dump_json(metrics_to_json(report)));
    return 0;
  }

  if (*analyze) {
    const auto mp = read_trace_file(an_trace);
    MetricsOptions opt;
    opt.count_measure = !no_measure;
    opt.include_idle_qubits = !exclude_idle;
    opt.virtual_lifespan = virtual_lifespan;
    const auto report = compute_metrics(mp, opt);
    emit(an_out, metrics_csv_text(report));
    if (!an_json.empty()) write_text_file(an_json, dump_json(metrics_to_json(report)));
    return 0;
  }

  if (*sweep) {
    SweepPlan plan = plan_from_json(parse_json_text(read_text_file(plan_path), plan_path));
    if (o_workers->count()) plan.workers = workers;
    if (o_traces->count()) plan.traces = traces;
    const auto result = run_sweep(plan, sweep_out);
    write_sweep_outputs(result, plan, sweep_out);
    std::size_t failed_points = 0;
    for (const auto& row : result.rows) failed_points += row.status == "ok" ? 0 : 1;
    std::cout << result.rows.size() << " points, " << failed_points << " not ok, outputs in " << sweep_out << "\n";
    bool all_pass = true;
    for (const auto& t : trend_check(result, plan.trends)) {
      all_pass = all_pass && t.pass;
      std::cout << (t.pass ? "PASS " : "FAIL ") << t.assertion.kind << " " << t.assertion.column
                << (t.assertion.family.empty() ? "" : " " + t.assertion.family) << ": " << t.detail << "\n";
    }
    if (!all_pass) {
      std::cerr << "error: trend: at least one trend check failed\n";
      return kExitOther;
    }
    return 0;
  }

  if (*render) {
    const auto mp = read_trace_file(rd_trace);
    SvgOptions opt;
    opt.cell_width = cell;
    opt.cell_height = cell;
    emit(rd_out, rd_virtual ? render_virtual_svg(mp.sliced, opt) : render_physical_svg(mp, opt));
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Infeasible& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const Timeout& e) {
    std::cerr << "error: timeout: " << e.what() << "\n";
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitOther;
  }
}
