#pragma once

// Versioned JSON interchange for mapped programs and metric reports, and
// the fixed CSV row layout.
//
// Trace document ("format": "qtraffic-trace", "version": 1):
//   circuit       {name, width, gates: [[mnemonic, q0, (q1), (angle)], ...]}
//   architecture  {cores, capacity}
//   mapper        {sigma, tau}
//   depth, t_exec
//   assignment    [[core of qubit 0..N-1] per slice]
//   placements    [[time, phys0, (phys1)] per gate]
//   teleports     [{qubit, from_core, to_core, before_slice, wave, start,
//                   from_phys, to_phys, partner (qubit or null)}]
//   trace         {rows, cols, rle: ["<count><I|C|M>..." per physical qubit]}
//   counters      {ops_per_phys, telep_per_phys, telep_per_core, telep_per_slice}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtraffic/circuit.hpp"
#include "qtraffic/error.hpp"
#include "qtraffic/mapper.hpp"
#include "qtraffic/metrics.hpp"
#include "qtraffic/qasm.hpp"

namespace qtraffic {

using Json = nlohmann::ordered_json;

inline constexpr int kTraceVersion = 1;

// ---------------------------------------------------------------------------
// Circuit

inline Json circuit_to_json(const Circuit& c) {
  Json gates = Json::array();
  for (const Gate& g : c.gates()) {
    Json row = Json::array({std::string(mnemonic(g.kind)), g.qubits[0]});
    if (g.arity() == 2) row.push_back(g.qubits[1]);
    if (has_angle(g.kind)) row.push_back(g.angle);
    gates.push_back(std::move(row));
  }
  return Json{{"name", c.name()}, {"width", c.width()}, {"gates", std::move(gates)}};
}

inline GateKind kind_from_mnemonic(const std::string& m) {
  for (int k = 0; k <= static_cast<int>(GateKind::Measure); ++k) {
    if (mnemonic(static_cast<GateKind>(k)) == m) return static_cast<GateKind>(k);
  }
  throw InvalidArgument("unknown gate mnemonic '" + m + "'");
}

inline Circuit circuit_from_json(const Json& j) {
  Circuit c(j.at("name").get<std::string>(), j.at("width").get<std::size_t>());
  for (const auto& row : j.at("gates")) {
    const GateKind kind = kind_from_mnemonic(row.at(0).get<std::string>());
    const std::size_t expect = 1 + static_cast<std::size_t>(arity(kind)) + (has_angle(kind) ? 1 : 0);
    if (row.size() != expect) throw InvalidArgument("gate record has wrong field count");
    Gate g;
    g.kind = kind;
    g.qubits[0] = row.at(1).get<Qubit>();
    if (arity(kind) == 2) g.qubits[1] = row.at(2).get<Qubit>();
    if (has_angle(kind)) g.angle = row.back().get<double>();
    c.append(g);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Trace grid run-length encoding

inline char cell_code(Cell c) {
  switch (c) {
    case Cell::Idle: return 'I';
    case Cell::Compute: return 'C';
    case Cell::Communicate: return 'M';
  }
  return '?';
}

inline std::string encode_row(std::span<const Cell> row) {
  std::string out;
  std::size_t i = 0;
  while (i < row.size()) {
    std::size_t j = i;
    while (j < row.size() && row[j] == row[i]) ++j;
    out += std::to_string(j - i);
    out += cell_code(row[i]);
    i = j;
  }
  return out;
}

inline void decode_row(const std::string& rle, TraceGrid& grid, std::size_t r) {
  std::size_t col = 0;
  std::size_t count = 0;
  bool have_digits = false;
  for (const char ch : rle) {
    if (ch >= '0' && ch <= '9') {
      count = count * 10 + static_cast<std::size_t>(ch - '0');
      have_digits = true;
      continue;
    }
    Cell cell;
    if (ch == 'I') cell = Cell::Idle;
    else if (ch == 'C') cell = Cell::Compute;
    else if (ch == 'M') cell = Cell::Communicate;
    else throw InvalidArgument(std::string("bad trace cell code '") + ch + "'");
    if (!have_digits || col + count > grid.cols()) throw InvalidArgument("trace row overruns its width");
    for (std::size_t k = 0; k < count; ++k) grid.set(r, col++, cell);
    count = 0;
    have_digits = false;
  }
  if (have_digits || col != grid.cols()) throw InvalidArgument("trace row length mismatch");
}

// ---------------------------------------------------------------------------
// Mapped program

inline Json trace_to_json(const MappedProgram& mp) {
  Json j;
  j["format"] = "qtraffic-trace";
  j["version"] = kTraceVersion;
  j["circuit"] = circuit_to_json(mp.circuit());
  j["architecture"] = {{"cores", mp.arch.cores}, {"capacity", mp.arch.capacity}};
  j["mapper"] = {{"sigma", mp.sigma}, {"tau", mp.tau}};
  j["depth"] = mp.sliced.depth();
  j["t_exec"] = mp.t_exec;
  j["assignment"] = mp.assignment;
  Json placements = Json::array();
  const auto gs = mp.circuit().gates();
  for (std::size_t g = 0; g < gs.size(); ++g) {
    Json row = Json::array({mp.placements[g].time, mp.placements[g].phys[0]});
    if (gs[g].arity() == 2) row.push_back(mp.placements[g].phys[1]);
    placements.push_back(std::move(row));
  }
  j["placements"] = std::move(placements);
  Json events = Json::array();
  for (const auto& e : mp.teleports) {
    events.push_back({{"qubit", e.qubit},
                      {"from_core", e.from_core},
                      {"to_core", e.to_core},
                      {"before_slice", e.before_slice},
                      {"wave", e.wave},
                      {"start", e.start},
                      {"from_phys", e.from_phys},
                      {"to_phys", e.to_phys},
                      {"partner", e.partner ? Json(*e.partner) : Json(nullptr)}});
  }
  j["teleports"] = std::move(events);
  Json rows = Json::array();
  for (std::size_t r = 0; r < mp.trace.rows(); ++r) rows.push_back(encode_row(mp.trace.row(r)));
  j["trace"] = {{"rows", mp.trace.rows()}, {"cols", mp.trace.cols()}, {"rle", std::move(rows)}};
  j["counters"] = {{"ops_per_phys", mp.counters.ops_per_phys},
                   {"telep_per_phys", mp.counters.telep_per_phys},
                   {"telep_per_core", mp.counters.telep_per_core},
                   {"telep_per_slice", mp.counters.telep_per_slice}};
  return j;
}

/// Rebuilds a mapped program and verifies every stored record against the
/// others; inconsistent documents are rejected.
inline MappedProgram trace_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "qtraffic-trace") throw InvalidArgument("not a qtraffic trace document");
    if (j.at("version").get<int>() != kTraceVersion) {
      throw InvalidArgument("unsupported trace version " + std::to_string(j.at("version").get<int>()));
    }
    MappedProgram mp;
    mp.sliced = slice(circuit_from_json(j.at("circuit")));
    mp.arch.cores = j.at("architecture").at("cores").get<std::size_t>();
    mp.arch.capacity = j.at("architecture").at("capacity").get<std::size_t>();
    mp.arch.validate(mp.sliced.width());
    mp.sigma = j.at("mapper").at("sigma").get<double>();
    mp.tau = j.at("mapper").at("tau").get<std::size_t>();
    if (j.at("depth").get<std::size_t>() != mp.sliced.depth()) throw InvalidArgument("depth does not match the circuit");
    mp.t_exec = j.at("t_exec").get<std::size_t>();
    mp.assignment = j.at("assignment").get<std::vector<CoreMap>>();

    const auto gs = mp.circuit().gates();
    const auto& placements = j.at("placements");
    if (placements.size() != gs.size()) throw InvalidArgument("placement count does not match the gate count");
    mp.placements.resize(gs.size());
    for (std::size_t g = 0; g < gs.size(); ++g) {
      const auto& row = placements[g];
      if (row.size() != 1 + static_cast<std::size_t>(gs[g].arity())) throw InvalidArgument("bad placement record");
      mp.placements[g].time = row.at(0).get<std::size_t>();
      mp.placements[g].phys[0] = row.at(1).get<PhysicalQubit>();
      if (gs[g].arity() == 2) mp.placements[g].phys[1] = row.at(2).get<PhysicalQubit>();
    }
    for (const auto& e : j.at("teleports")) {
      TeleportEvent ev;
      ev.qubit = e.at("qubit").get<Qubit>();
      ev.from_core = e.at("from_core").get<Core>();
      ev.to_core = e.at("to_core").get<Core>();
      ev.before_slice = e.at("before_slice").get<std::size_t>();
      ev.wave = e.at("wave").get<std::size_t>();
      ev.start = e.at("start").get<std::size_t>();
      ev.from_phys = e.at("from_phys").get<PhysicalQubit>();
      ev.to_phys = e.at("to_phys").get<PhysicalQubit>();
      if (!e.at("partner").is_null()) ev.partner = e.at("partner").get<Qubit>();
      if (ev.qubit >= mp.sliced.width()) throw InvalidArgument("teleport of unknown qubit");
      mp.teleports.push_back(ev);
    }
    const auto& tr = j.at("trace");
    const auto rows = tr.at("rows").get<std::size_t>();
    const auto cols = tr.at("cols").get<std::size_t>();
    if (cols != mp.t_exec || (cols > 0 && rows != mp.arch.physical_qubits())) {
      throw InvalidArgument("trace dimensions do not match the architecture and t_exec");
    }
    mp.trace = cols == 0 ? TraceGrid{} : TraceGrid(rows, cols);
    const auto& rle = tr.at("rle");
    if (rle.size() != mp.trace.rows()) throw InvalidArgument("trace row count mismatch");
    for (std::size_t r = 0; r < mp.trace.rows(); ++r) decode_row(rle[r].get<std::string>(), mp.trace, r);
    const auto& c = j.at("counters");
    mp.counters.ops_per_phys = c.at("ops_per_phys").get<std::vector<std::size_t>>();
    mp.counters.telep_per_phys = c.at("telep_per_phys").get<std::vector<std::size_t>>();
    mp.counters.telep_per_core = c.at("telep_per_core").get<std::vector<std::size_t>>();
    mp.counters.telep_per_slice = c.at("telep_per_slice").get<std::vector<std::size_t>>();

    if (const auto issues = check_program(mp); !issues.empty()) {
      throw InvalidArgument("inconsistent trace: " + issues.front());
    }
    return mp;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed trace document: ") + e.what());
  }
}

inline std::string dump_json(const Json& j) { return j.dump(1) + "\n"; }

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary file and renames it into place.
inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
}

inline MappedProgram read_trace_file(const std::filesystem::path& path) {
  return trace_from_json(parse_json_text(read_text_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Metrics

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json metrics_to_json(const MetricsReport& r) {
  return Json{{"circuit", r.circuit},
              {"n", r.width},
              {"cores", r.cores},
              {"capacity", r.capacity},
              {"sigma", r.sigma},
              {"tau", r.tau},
              {"gates", r.gates},
              {"two_qubit_gates", r.two_qubit_gates},
              {"depth", r.depth},
              {"t_exec", r.t_exec},
              {"ccr", optional_json(r.ccr)},
              {"qubit_hotspotness", optional_json(r.qubit_hotspotness)},
              {"core_hotspotness", optional_json(r.core_hotspotness)},
              {"longest_gate_sequence", r.longest_gate_sequence},
              {"qubit_lifespan", r.qubit_lifespan},
              {"burstiness", optional_json(r.burstiness)},
              {"temporal_locality", r.temporal_locality},
              {"spatial_locality", optional_json(r.spatial_locality)},
              {"series",
               {{"ops_per_qubit", r.ops_per_qubit},
                {"telep_per_core", r.telep_per_core},
                {"telep_per_slice", r.telep_per_slice},
                {"gates_per_slice", r.gates_per_slice},
                {"slice_categories",
                 {{"communication", r.communication_slices},
                  {"parallel", r.parallel_slices},
                  {"computation", r.computation_slices}}}}}};
}

/// Columns of one run, in order.
inline const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "circuit",           "n",
      "cores",             "capacity",
      "sigma",             "tau",
      "gates",             "two_qubit_gates",
      "depth",             "t_exec",
      "ccr",               "qubit_hotspotness",
      "core_hotspotness",  "longest_gate_sequence",
      "qubit_lifespan",    "burstiness",
      "temporal_locality", "spatial_locality",
      "communication_slices", "parallel_slices",
      "computation_slices"};
  return cols;
}

inline std::string csv_header(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out;
}

inline std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

/// Field values in `metrics_columns()` order.
inline std::vector<std::string> metrics_fields(const MetricsReport& r) {
  return {csv_escape(r.circuit),
          std::to_string(r.width),
          std::to_string(r.cores),
          std::to_string(r.capacity),
          format_double(r.sigma),
          std::to_string(r.tau),
          std::to_string(r.gates),
          std::to_string(r.two_qubit_gates),
          std::to_string(r.depth),
          std::to_string(r.t_exec),
          csv_optional(r.ccr),
          csv_optional(r.qubit_hotspotness),
          csv_optional(r.core_hotspotness),
          std::to_string(r.longest_gate_sequence),
          std::to_string(r.qubit_lifespan),
          csv_optional(r.burstiness),
          std::to_string(r.temporal_locality),
          csv_optional(r.spatial_locality),
          std::to_string(r.communication_slices),
          std::to_string(r.parallel_slices),
          std::to_string(r.computation_slices)};
}

inline std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
  return out;
}

inline std::string metrics_csv_row(const MetricsReport& r) { return csv_join(metrics_fields(r)); }

}  // namespace qtraffic
