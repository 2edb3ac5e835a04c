#include "rydreg/circuit.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rydreg {

namespace {

[[noreturn]] void fail(const std::string& kind, int line,
                       const std::string& what) {
  throw std::invalid_argument(kind + " (line " + std::to_string(line) +
                              "): " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string token;
  while (ss >> token) tokens.push_back(token);
  return tokens;
}

int parse_index(const std::string& token, int line) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(token, &pos);
  } catch (const std::exception&) {
    fail("syntax-error", line, "expected a qubit index, got '" + token + "'");
  }
  if (pos != token.size()) {
    fail("syntax-error", line, "trailing characters in index '" + token + "'");
  }
  return value;
}

double parse_angle(const std::string& token, int line) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    fail("syntax-error", line, "expected an angle, got '" + token + "'");
  }
  if (pos != token.size()) {
    fail("syntax-error", line, "trailing characters in angle '" + token + "'");
  }
  return value;
}

void check_index(int idx, int n_qubits, int line) {
  if (idx < 1 || idx > n_qubits) {
    fail("index-out-of-range", line,
         "qubit " + std::to_string(idx) + " not in 1.." +
             std::to_string(n_qubits));
  }
}

std::string format_angle(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

bool Circuit::has_two_qubit_gate() const {
  for (const GateOp& op : ops) {
    if (op.is_two_qubit()) return true;
  }
  return false;
}

Circuit parse_circuit(const std::string& text) {
  Circuit circuit;
  bool header_seen = false;

  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (!line.empty() && line[0] == '#') continue;
    std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (!header_seen) {
      if (tokens[0] != "qubits") {
        fail("missing-header", line_number,
             "expected 'qubits N' before '" + tokens[0] + "'");
      }
      if (tokens.size() != 2) {
        fail("syntax-error", line_number, "expected 'qubits N'");
      }
      circuit.qubit_count = parse_index(tokens[1], line_number);
      if (circuit.qubit_count < 1) {
        fail("syntax-error", line_number, "qubit count must be >= 1");
      }
      header_seen = true;
      continue;
    }

    if (circuit.measure) {
      fail("syntax-error", line_number,
           "no statements allowed after the measure directive");
    }

    const std::string& op = tokens[0];
    if (op == "measure") {
      if (tokens.size() != 1) {
        fail("syntax-error", line_number, "measure takes no arguments");
      }
      circuit.measure = true;
    } else if (op == "ROT") {
      if (tokens.size() != 4) {
        fail("syntax-error", line_number, "expected 'ROT i theta phi'");
      }
      int i = parse_index(tokens[1], line_number);
      check_index(i, circuit.qubit_count, line_number);
      circuit.ops.push_back(GateOp::rot(i, parse_angle(tokens[2], line_number),
                                        parse_angle(tokens[3], line_number)));
    } else if (op == "RZ") {
      if (tokens.size() != 3) {
        fail("syntax-error", line_number, "expected 'RZ i theta'");
      }
      int i = parse_index(tokens[1], line_number);
      check_index(i, circuit.qubit_count, line_number);
      circuit.ops.push_back(GateOp::rz(i, parse_angle(tokens[2], line_number)));
    } else if (op == "CZ" || op == "CNOT") {
      if (tokens.size() != 3) {
        fail("syntax-error", line_number, "expected '" + op + " i j'");
      }
      int i = parse_index(tokens[1], line_number);
      int j = parse_index(tokens[2], line_number);
      check_index(i, circuit.qubit_count, line_number);
      check_index(j, circuit.qubit_count, line_number);
      if (i == j) {
        fail("identical-indices", line_number,
             op + " requires two distinct qubits");
      }
      circuit.ops.push_back(op == "CZ" ? GateOp::cz(i, j) : GateOp::cnot(i, j));
    } else {
      fail("syntax-error", line_number, "unknown statement '" + op + "'");
    }
  }
  if (!header_seen) {
    fail("missing-header", line_number == 0 ? 1 : line_number,
         "circuit has no 'qubits N' header");
  }
  return circuit;
}

std::string format_circuit(const Circuit& circuit) {
  std::ostringstream out;
  out << "qubits " << circuit.qubit_count << "\n";
  for (const GateOp& op : circuit.ops) {
    switch (op.kind) {
      case GateOp::Kind::rot:
        out << "ROT " << op.target << " " << format_angle(op.angle) << " "
            << format_angle(op.axis_phase) << "\n";
        break;
      case GateOp::Kind::rz:
        out << "RZ " << op.target << " " << format_angle(op.angle) << "\n";
        break;
      case GateOp::Kind::cz:
        out << "CZ " << op.target << " " << op.target2 << "\n";
        break;
      case GateOp::Kind::cnot:
        out << "CNOT " << op.target << " " << op.target2 << "\n";
        break;
    }
  }
  if (circuit.measure) out << "measure\n";
  return out.str();
}

}  // namespace rydreg
