#pragma once

// Declarative run configuration (JSON).
//
//   {
//     "version": 1,
//     "bench":        {"family": "qft", "n": 64, "iterations": 1, "layers": 1,
//                      "seed": 1, "edge_probability": 0.2, "ring_degree": 4,
//                      "rewiring": 0.1},
//     "architecture": {"cores": 4, "capacity": 16},
//     "mapper":       {"sigma": 0.5, "tau": 1, "horizon": 20, "move_cost": 1},
//     "metrics":      {"count_measure": true, "include_idle_qubits": true,
//                      "virtual_lifespan": false}
//   }
//
// Every section and key is optional; unknown keys are rejected so typos do
// not silently fall back to defaults.

#include <initializer_list>
#include <optional>
#include <string>

#include <json.hpp>

#include "qtraffic/benchgen.hpp"
#include "qtraffic/error.hpp"
#include "qtraffic/mapper.hpp"
#include "qtraffic/metrics.hpp"

namespace qtraffic {

inline constexpr int kConfigVersion = 1;

struct RunConfig {
  BenchSpec bench;
  std::optional<Architecture> arch;  // absent: cmd-line must provide it
  MapperOptions mapper;
  MetricsOptions metrics;
};

namespace detail {

inline void require_keys(const nlohmann::ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || item.key() == k;
    if (!ok) throw InvalidArgument("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read_key(const nlohmann::ordered_json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("bad value for '") + key + "'");
  }
}

inline void check_version(const nlohmann::ordered_json& j, int expected, const std::string& what) {
  if (!j.contains("version")) return;
  if (!j.at("version").is_number_integer() || j.at("version").get<int>() != expected) {
    throw InvalidArgument("unsupported " + what + " version");
  }
}

}  // namespace detail

inline BenchSpec bench_from_json(const nlohmann::ordered_json& j, BenchSpec spec = {}) {
  detail::require_keys(j, {"family", "n", "iterations", "layers", "seed", "edge_probability", "ring_degree", "rewiring"},
                       "bench");
  if (j.contains("family")) {
    const auto name = j.at("family").get<std::string>();
    const auto fam = parse_family(name);
    if (!fam) throw InvalidArgument("unknown family '" + name + "'");
    spec.family = *fam;
  }
  detail::read_key(j, "n", spec.n);
  detail::read_key(j, "iterations", spec.iterations);
  detail::read_key(j, "layers", spec.layers);
  detail::read_key(j, "seed", spec.seed);
  detail::read_key(j, "edge_probability", spec.edge_probability);
  detail::read_key(j, "ring_degree", spec.ring_degree);
  detail::read_key(j, "rewiring", spec.rewiring);
  return spec;
}

inline nlohmann::ordered_json bench_to_json(const BenchSpec& s) {
  return {{"family", std::string(family_name(s.family))},
          {"n", s.n},
          {"iterations", s.iterations},
          {"layers", s.layers},
          {"seed", s.seed},
          {"edge_probability", s.edge_probability},
          {"ring_degree", s.ring_degree},
          {"rewiring", s.rewiring}};
}

inline MapperOptions mapper_from_json(const nlohmann::ordered_json& j, MapperOptions opt = {}) {
  detail::require_keys(j, {"sigma", "tau", "horizon", "move_cost"}, "mapper");
  detail::read_key(j, "sigma", opt.sigma);
  detail::read_key(j, "move_cost", opt.move_cost);
  detail::read_key(j, "tau", opt.tau);
  if (j.contains("horizon") && !j.at("horizon").is_null()) {
    std::size_t h = 0;
    detail::read_key(j, "horizon", h);
    opt.horizon = h;
  }
  return opt;
}

inline MetricsOptions metrics_options_from_json(const nlohmann::ordered_json& j, MetricsOptions opt = {}) {
  detail::require_keys(j, {"count_measure", "include_idle_qubits", "virtual_lifespan"}, "metrics");
  detail::read_key(j, "count_measure", opt.count_measure);
  detail::read_key(j, "include_idle_qubits", opt.include_idle_qubits);
  detail::read_key(j, "virtual_lifespan", opt.virtual_lifespan);
  return opt;
}

inline RunConfig run_config_from_json(const nlohmann::ordered_json& j) {
  try {
    detail::require_keys(j, {"version", "bench", "architecture", "mapper", "metrics"}, "config");
    detail::check_version(j, kConfigVersion, "config");
    RunConfig cfg;
    if (j.contains("bench")) cfg.bench = bench_from_json(j.at("bench"));
    if (j.contains("architecture")) {
      const auto& a = j.at("architecture");
      detail::require_keys(a, {"cores", "capacity"}, "architecture");
      Architecture arch;
      detail::read_key(a, "cores", arch.cores);
      detail::read_key(a, "capacity", arch.capacity);
      cfg.arch = arch;
    }
    if (j.contains("mapper")) cfg.mapper = mapper_from_json(j.at("mapper"));
    if (j.contains("metrics")) cfg.metrics = metrics_options_from_json(j.at("metrics"));
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
}

}  // namespace qtraffic
