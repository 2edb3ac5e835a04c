#pragma once

#include <string>
#include <vector>

#include "rydreg/gates.hpp"

namespace rydreg {

// Parsed gate program. The text grammar is line oriented:
//   qubits N
//   ROT i theta phi | RZ i theta | CZ i j | CNOT i j
//   measure
//   # comment
// Tokens are whitespace separated, angles are radians as decimal literals,
// qubit indices are 1-based. At most one measure directive, at the end.
struct Circuit {
  int qubit_count = 0;
  std::vector<GateOp> ops;
  bool measure = false;

  bool has_two_qubit_gate() const;
};

Circuit parse_circuit(const std::string& text);

// Canonical text form; parse_circuit(format_circuit(c)) reproduces c.
std::string format_circuit(const Circuit& circuit);

}  // namespace rydreg
