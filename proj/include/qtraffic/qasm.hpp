#pragma once

// Import/export of circuits in a small OpenQASM 2.0 subset:
//   qreg, creg, h, x, rx, ry, rz, p/u1, cx, cz, cp/cu1, swap, measure.
// Anything else is a ParseError naming the offending line.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "qtraffic/circuit.hpp"
#include "qtraffic/error.hpp"

namespace qtraffic {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string to_qasm(const Circuit& circuit) {
  std::string out;
  out += "OPENQASM 2.0;\n";
  out += "include \"qelib1.inc\";\n";
  if (!circuit.name().empty()) out += "// circuit: " + circuit.name() + "\n";
  out += "qreg q[" + std::to_string(circuit.width()) + "];\n";
  const bool measures = std::any_of(circuit.gates().begin(), circuit.gates().end(),
                                    [](const Gate& g) { return g.kind == GateKind::Measure; });
  if (measures) out += "creg c[" + std::to_string(circuit.width()) + "];\n";
  for (const Gate& g : circuit.gates()) {
    const auto q = [](Qubit i) { return "q[" + std::to_string(i) + "]"; };
    if (g.kind == GateKind::Measure) {
      out += "measure " + q(g.qubits[0]) + " -> c[" + std::to_string(g.qubits[0]) + "];\n";
      continue;
    }
    out += mnemonic(g.kind);
    if (has_angle(g.kind)) out += "(" + format_double(g.angle) + ")";
    out += " " + q(g.qubits[0]);
    if (g.arity() == 2) out += "," + q(g.qubits[1]);
    out += ";\n";
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Recursive-descent evaluator for gate parameters: numbers, `pi`, + - * / and parentheses.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  std::optional<double> parse() {
    auto v = expr();
    skip_ws();
    if (!v || pos_ != s_.size()) return std::nullopt;
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::optional<double> expr() {
    auto lhs = term();
    while (lhs) {
      if (eat('+')) {
        auto rhs = term();
        if (!rhs) return std::nullopt;
        *lhs += *rhs;
      } else if (eat('-')) {
        auto rhs = term();
        if (!rhs) return std::nullopt;
        *lhs -= *rhs;
      } else {
        break;
      }
    }
    return lhs;
  }
  std::optional<double> term() {
    auto lhs = unary();
    while (lhs) {
      if (eat('*')) {
        auto rhs = unary();
        if (!rhs) return std::nullopt;
        *lhs *= *rhs;
      } else if (eat('/')) {
        auto rhs = unary();
        if (!rhs) return std::nullopt;
        *lhs /= *rhs;
      } else {
        break;
      }
    }
    return lhs;
  }
  std::optional<double> unary() {
    if (eat('-')) {
      auto v = unary();
      if (v) *v = -*v;
      return v;
    }
    if (eat('+')) return unary();
    return primary();
  }
  std::optional<double> primary() {
    skip_ws();
    if (eat('(')) {
      auto v = expr();
      if (!v || !eat(')')) return std::nullopt;
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto res = std::from_chars(first, s_.data() + s_.size(), v);
    if (res.ec != std::errc{}) return std::nullopt;
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct QasmReader {
  std::string source;
  std::size_t line = 0;
  std::optional<std::string> qreg_name;
  std::optional<std::string> creg_name;
  std::size_t creg_size = 0;
  std::string name;
  std::optional<Circuit> circuit;

  [[noreturn]] void fail(const std::string& reason) const { throw ParseError(source, line, reason); }

  std::size_t parse_index(std::string_view text) const {
    std::size_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      fail("bad index '" + std::string(text) + "'");
    }
    return v;
  }

  // "name[idx]" -> (name, idx)
  std::pair<std::string, std::size_t> parse_ref(std::string_view ref) const {
    ref = trim(ref);
    const auto open = ref.find('[');
    if (open == std::string_view::npos || ref.back() != ']') fail("expected register[index], got '" + std::string(ref) + "'");
    return {std::string(trim(ref.substr(0, open))), parse_index(trim(ref.substr(open + 1, ref.size() - open - 2)))};
  }

  Qubit qubit_ref(std::string_view ref) const {
    if (!circuit) fail("gate before qreg declaration");
    const auto [reg, idx] = parse_ref(ref);
    if (reg != *qreg_name) fail("unknown quantum register '" + reg + "'");
    if (idx >= circuit->width()) fail("qubit index " + std::to_string(idx) + " out of range");
    return static_cast<Qubit>(idx);
  }

  void statement(std::string_view st) {
    st = trim(st);
    if (st.empty()) return;
    std::size_t word_end = 0;
    while (word_end < st.size() && (std::isalnum(static_cast<unsigned char>(st[word_end])) || st[word_end] == '_')) {
      ++word_end;
    }
    const std::string word(st.substr(0, word_end));
    std::string_view rest = trim(st.substr(word_end));

    if (word == "OPENQASM") {
      if (rest.substr(0, 2) != "2.") fail("unsupported OpenQASM version '" + std::string(rest) + "'");
      return;
    }
    if (word == "include") return;
    if (word == "qreg") {
      if (circuit) fail("only one qreg is supported");
      const auto [reg, n] = parse_ref(rest);
      qreg_name = reg;
      circuit.emplace(name, n);
      return;
    }
    if (word == "creg") {
      if (creg_name) fail("only one creg is supported");
      const auto [reg, n] = parse_ref(rest);
      creg_name = reg;
      creg_size = n;
      return;
    }
    if (word == "measure") {
      const auto arrow = rest.find("->");
      if (arrow == std::string_view::npos) fail("measure without '->'");
      const Qubit q = qubit_ref(rest.substr(0, arrow));
      const auto [reg, idx] = parse_ref(rest.substr(arrow + 2));
      if (!creg_name || reg != *creg_name) fail("unknown classical register '" + reg + "'");
      if (idx >= creg_size) fail("classical index " + std::to_string(idx) + " out of range");
      circuit->append(gates::measure(q));
      return;
    }

    std::optional<GateKind> kind;
    if (word == "h") kind = GateKind::H;
    else if (word == "x") kind = GateKind::X;
    else if (word == "rx") kind = GateKind::RX;
    else if (word == "ry") kind = GateKind::RY;
    else if (word == "rz") kind = GateKind::RZ;
    else if (word == "p" || word == "u1") kind = GateKind::Phase;
    else if (word == "cx" || word == "CX") kind = GateKind::CNOT;
    else if (word == "cz") kind = GateKind::CZ;
    else if (word == "cp" || word == "cu1") kind = GateKind::CPhase;
    else if (word == "swap") kind = GateKind::Swap;
    if (!kind) fail("unsupported statement '" + std::string(word) + "'");

    double angle = 0.0;
    if (has_angle(*kind)) {
      if (rest.empty() || rest.front() != '(') fail("gate '" + word + "' needs a parameter");
      const auto close = rest.rfind(')');  // operands never contain ')'
      if (close == std::string_view::npos) fail("unterminated parameter list");
      const auto v = ExprParser(rest.substr(1, close - 1)).parse();
      if (!v) fail("bad parameter '" + std::string(rest.substr(1, close - 1)) + "'");
      angle = *v;
      rest = trim(rest.substr(close + 1));
    } else if (!rest.empty() && rest.front() == '(') {
      fail("gate '" + word + "' takes no parameter");
    }

    std::vector<std::string_view> args;
    while (true) {
      const auto comma = rest.find(',');
      args.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (static_cast<int>(args.size()) != arity(*kind)) fail("gate '" + word + "' expects " + std::to_string(arity(*kind)) + " operand(s)");
    try {
      if (args.size() == 1) {
        circuit->append(gates::one(*kind, qubit_ref(args[0]), angle));
      } else {
        circuit->append(gates::two(*kind, qubit_ref(args[0]), qubit_ref(args[1]), angle));
      }
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }
};

}  // namespace detail

/// Parse QASM text. `source` names the input in error messages; the circuit
/// name comes from a "// circuit: <name>" comment, else `default_name`.
inline Circuit parse_qasm(std::string_view text, const std::string& source = "<qasm>",
                          const std::string& default_name = {}) {
  detail::QasmReader r;
  r.source = source;
  r.name = default_name;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    ++r.line;
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;

    if (const auto c = line.find("//"); c != std::string_view::npos) {
      const auto comment = detail::trim(line.substr(c + 2));
      constexpr std::string_view tag = "circuit:";
      if (comment.substr(0, tag.size()) == tag && !r.circuit) r.name = std::string(detail::trim(comment.substr(tag.size())));
      line = line.substr(0, c);
    }
    while (true) {
      const auto semi = line.find(';');
      if (semi == std::string_view::npos) {
        if (!detail::trim(line).empty()) r.fail("missing ';'");
        break;
      }
      r.statement(line.substr(0, semi));
      line = line.substr(semi + 1);
    }
    if (eol == text.size()) break;
  }
  if (!r.circuit) throw ParseError(source, r.line, "no qreg declaration");
  return std::move(*r.circuit);
}

inline Circuit read_qasm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_qasm(ss.str(), path, stem);
}

}  // namespace qtraffic
