#pragma once

// SVG heatmaps of trace grids: rows are qubits, columns timeslices.
// Compute is red, communication white with a gray outline, idle black.
// Runs of equal cells become one rectangle, so output size tracks the
// number of state changes rather than the grid area.

#include <cstddef>
#include <cstdio>
#include <string>

#include "qtraffic/circuit.hpp"
#include "qtraffic/mapper.hpp"

namespace qtraffic {

struct SvgOptions {
  double cell_width = 4.0;
  double cell_height = 4.0;
  double margin = 40.0;  // room for core labels and axis title
  bool core_bands = true;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string render_grid(const TraceGrid& grid, const std::string& title, std::size_t band, const SvgOptions& opt) {
  const double w = static_cast<double>(grid.cols()) * opt.cell_width;
  const double h = static_cast<double>(grid.rows()) * opt.cell_height;
  const double m = opt.margin;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w + 2 * m) + "\" height=\"" + num(h + 2 * m) +
         "\" viewBox=\"0 0 " + num(w + 2 * m) + " " + num(h + 2 * m) + "\">\n";
  out += "<title>" + svg_escape(title) + "</title>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(w + 2 * m) + "\" height=\"" + num(h + 2 * m) + "\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + num(m) + "\" y=\"" + num(m * 0.6) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         svg_escape(title) + "</text>\n";
  out += "<g transform=\"translate(" + num(m) + "," + num(m) + ")\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"#000000\"/>\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const auto row = grid.row(r);
    std::size_t c = 0;
    while (c < row.size()) {
      std::size_t e = c;
      while (e < row.size() && row[e] == row[c]) ++e;
      if (row[c] != Cell::Idle) {
        const bool comm = row[c] == Cell::Communicate;
        out += "<rect x=\"" + num(static_cast<double>(c) * opt.cell_width) + "\" y=\"" +
               num(static_cast<double>(r) * opt.cell_height) + "\" width=\"" +
               num(static_cast<double>(e - c) * opt.cell_width) + "\" height=\"" + num(opt.cell_height) + "\" fill=\"" +
               (comm ? "#ffffff\" stroke=\"#808080\" stroke-width=\"0.5\"" : "#d62728\"") + "/>\n";
      }
      c = e;
    }
  }
  if (band > 0 && opt.core_bands) {
    for (std::size_t r = 0; r < grid.rows(); r += band) {
      const double y = static_cast<double>(r) * opt.cell_height;
      if (r > 0) {
        out += "<line x1=\"0\" y1=\"" + num(y) + "\" x2=\"" + num(w) + "\" y2=\"" + num(y) +
               "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
      }
      out += "<text x=\"-4\" y=\"" + num(y + static_cast<double>(band) * opt.cell_height / 2) +
             "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\">core " + std::to_string(r / band) +
             "</text>\n";
    }
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace detail

/// Physical trace with one horizontal band per core.
inline std::string render_physical_svg(const MappedProgram& mp, const SvgOptions& opt = {}) {
  const std::string title = mp.circuit().name() + " on " + std::to_string(mp.arch.cores) + " x " +
                            std::to_string(mp.arch.capacity) + ", t_exec " + std::to_string(mp.t_exec);
  return detail::render_grid(mp.trace, title, mp.arch.capacity, opt);
}

/// Logical structure: virtual qubits x circuit slices.
inline std::string render_virtual_svg(const SlicedCircuit& sliced, const SvgOptions& opt = {}) {
  const std::string title = sliced.circuit().name() + " logical structure, depth " + std::to_string(sliced.depth());
  return detail::render_grid(virtual_trace(sliced), title, 0, opt);
}

}  // namespace qtraffic
