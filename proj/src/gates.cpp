#include "rydreg/gates.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rydreg {

namespace {

void check_qubit_index(int qubit, int n_qubits) {
  if (qubit < 1 || qubit > n_qubits) {
    throw std::invalid_argument("index-out-of-range: qubit index " +
                                std::to_string(qubit) + " not in 1.." +
                                std::to_string(n_qubits));
  }
}

// Bit position of qubit q (1-based) in a register index; qubit 1 is the most
// significant bit, matching the lexicographic basis order.
int register_bit(int qubit, int n_qubits) { return n_qubits - qubit; }

std::string format_angle(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

GateOp GateOp::rot(int qubit, double theta, double phi) {
  GateOp g;
  g.kind = Kind::rot;
  g.target = qubit;
  g.angle = theta;
  g.axis_phase = phi;
  return g;
}

GateOp GateOp::rz(int qubit, double theta) {
  GateOp g;
  g.kind = Kind::rz;
  g.target = qubit;
  g.angle = theta;
  return g;
}

GateOp GateOp::cz(int control, int target) {
  GateOp g;
  g.kind = Kind::cz;
  g.target = control;
  g.target2 = target;
  return g;
}

GateOp GateOp::cnot(int control, int target) {
  GateOp g;
  g.kind = Kind::cnot;
  g.target = control;
  g.target2 = target;
  return g;
}

std::string GateOp::name() const {
  switch (kind) {
    case Kind::rot:
      return "ROT " + std::to_string(target) + " " + format_angle(angle) +
             " " + format_angle(axis_phase);
    case Kind::rz:
      return "RZ " + std::to_string(target) + " " + format_angle(angle);
    case Kind::cz:
      return "CZ " + std::to_string(target) + " " + std::to_string(target2);
    case Kind::cnot:
      return "CNOT " + std::to_string(target) + " " + std::to_string(target2);
  }
  return "?";
}

std::int64_t CalibrationPolicy::resolve_reference(std::int64_t atom_count,
                                                  int qubit_count) const {
  std::int64_t ref = reference_occupancy;
  if (ref == 0) ref = atom_count - (qubit_count + 1) / 2;
  if (ref < atom_count - qubit_count || ref > atom_count) {
    throw std::invalid_argument(
        "invalid-dimensions: reference occupancy outside [K-N, K]");
  }
  return ref;
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const PulseStep& s : steps) t += s.pulse.duration;
  return t;
}

const std::vector<CrosstalkTerm>& CompileContext::crosstalk_for(
    int level) const {
  static const std::vector<CrosstalkTerm> kEmpty;
  if (crosstalk_by_level.empty()) return kEmpty;
  if (level < 0 || level >= static_cast<int>(crosstalk_by_level.size())) {
    return kEmpty;
  }
  return crosstalk_by_level[level];
}

namespace {

PulseStep register_pi_pulse(int level, double phase, RydbergChannel channel,
                            const CompileContext& ctx) {
  PulseStep step;
  step.pulse.source_level = level;
  step.pulse.rabi = ctx.rabi;
  step.pulse.phase = phase;
  step.pulse.duration = kPi / ctx.rabi;
  step.pulse.channel = channel;
  step.crosstalk = ctx.crosstalk_for(level);
  return step;
}

// Reservoir pulse of the given area, calibrated at the reference occupancy.
PulseStep reservoir_pulse(double area, double phase,
                          const CompileContext& ctx) {
  std::int64_t ref =
      ctx.calibration.resolve_reference(ctx.atom_count, ctx.qubit_count);
  PulseStep step;
  step.pulse.source_level = 0;
  step.pulse.rabi = ctx.rabi;
  step.pulse.phase = phase;
  step.pulse.duration = area / (std::sqrt(static_cast<double>(ref)) * ctx.rabi);
  step.crosstalk = ctx.crosstalk_for(0);
  return step;
}

}  // namespace

// Five-segment amplitude-robust expansion of an area-theta pulse: the two
// theta/2 halves bracket a pi, 2pi, pi block at the broadband phase angles
// phi_w = arccos(-theta / 4pi) and 3 phi_w.
std::vector<std::pair<double, double>> reservoir_segment_plan(
    double theta, double phi, CalibrationPolicy::CompositeMode mode) {
  if (mode == CalibrationPolicy::CompositeMode::none) return {{theta, phi}};
  double phi_w = std::acos(-theta / (4.0 * kPi));
  return {{0.5 * theta, phi},
          {kPi, phi + phi_w},
          {2.0 * kPi, phi + 3.0 * phi_w},
          {kPi, phi + phi_w},
          {0.5 * theta, phi}};
}

PulseSchedule compile_rotation(int target, double theta, double phi,
                               const CompileContext& ctx) {
  check_qubit_index(target, ctx.qubit_count);
  if (theta < 0.0) {  // R(-theta, phi) = R(theta, phi + pi)
    theta = -theta;
    phi += kPi;
  }

  PulseSchedule schedule;
  schedule.steps.push_back(
      register_pi_pulse(target, 0.0, RydbergChannel::primary, ctx));
  if (theta != 0.0) {
    for (auto [area, segment_phase] :
         reservoir_segment_plan(theta, phi, ctx.calibration.composite)) {
      if (area > 0.0) {
        schedule.steps.push_back(reservoir_pulse(area, segment_phase, ctx));
      }
    }
  }
  schedule.steps.push_back(
      register_pi_pulse(target, kPi, RydbergChannel::primary, ctx));
  return schedule;
}

PulseSchedule compile_rz(int target, double theta, const CompileContext& ctx) {
  check_qubit_index(target, ctx.qubit_count);
  double reduced = std::fmod(theta, kTwoPi);
  if (reduced < 0.0) reduced += kTwoPi;
  PulseSchedule schedule;
  if (reduced < 1e-12 || kTwoPi - reduced < 1e-12) return schedule;

  // A full generalized-Rabi cycle at detuning D leaves the phase
  // pi (1 + D/W) on the coupled branch, W = sqrt(rabi^2 + D^2). Solving for
  // the requested phase gives D/W = theta/pi - 1, which stays in (-1, 1).
  double x = reduced / kPi - 1.0;
  double generalized = ctx.rabi / std::sqrt(1.0 - x * x);
  PulseStep step;
  step.pulse.source_level = target;
  step.pulse.rabi = ctx.rabi;
  step.pulse.detuning = generalized * x;
  step.pulse.duration = kTwoPi / generalized;
  step.crosstalk = ctx.crosstalk_for(target);
  schedule.steps.push_back(step);
  return schedule;
}

PulseSchedule compile_cz(int control, int target, const CompileContext& ctx) {
  check_qubit_index(control, ctx.qubit_count);
  check_qubit_index(target, ctx.qubit_count);
  if (control == target) {
    throw std::invalid_argument("identical-indices: CZ requires two distinct qubits");
  }
  PulseSchedule schedule;
  schedule.steps.push_back(
      register_pi_pulse(control, 0.0, RydbergChannel::aux, ctx));
  PulseStep two_pi = register_pi_pulse(target, 0.0, RydbergChannel::primary, ctx);
  two_pi.pulse.duration = kTwoPi / ctx.rabi;
  schedule.steps.push_back(two_pi);
  schedule.steps.push_back(
      register_pi_pulse(control, kPi, RydbergChannel::aux, ctx));
  return schedule;
}

PulseSchedule compile_cnot(int control, int target, const CompileContext& ctx) {
  check_qubit_index(control, ctx.qubit_count);
  check_qubit_index(target, ctx.qubit_count);
  if (control == target) {
    throw std::invalid_argument(
        "identical-indices: CNOT requires two distinct qubits");
  }
  PulseSchedule schedule = compile_rotation(target, 0.5 * kPi, 0.0, ctx);
  PulseSchedule core = compile_cz(control, target, ctx);
  PulseSchedule closing = compile_rotation(target, 0.5 * kPi, 0.0, ctx);
  schedule.steps.insert(schedule.steps.end(), core.steps.begin(),
                        core.steps.end());
  schedule.steps.insert(schedule.steps.end(), closing.steps.begin(),
                        closing.steps.end());
  return schedule;
}

PulseSchedule compile_gate(const GateOp& gate, const CompileContext& ctx) {
  switch (gate.kind) {
    case GateOp::Kind::rot:
      return compile_rotation(gate.target, gate.angle, gate.axis_phase, ctx);
    case GateOp::Kind::rz:
      return compile_rz(gate.target, gate.angle, ctx);
    case GateOp::Kind::cz:
      return compile_cz(gate.target, gate.target2, ctx);
    case GateOp::Kind::cnot:
      return compile_cnot(gate.target, gate.target2, ctx);
  }
  throw std::invalid_argument("index-out-of-range: unknown gate kind");
}

namespace {

Eigen::Matrix2cd rotation_matrix(double theta, double phi) {
  double c = std::cos(0.5 * theta);
  double s = std::sin(0.5 * theta);
  Eigen::Matrix2cd r;
  r << Complex(c, 0.0), -std::exp(Complex(0.0, -phi)) * s,
      std::exp(Complex(0.0, phi)) * s, Complex(c, 0.0);
  return r;
}

void apply_single_qubit(const Eigen::Matrix2cd& u, int qubit, int n_qubits,
                        Eigen::VectorXcd& reg) {
  const int bit = register_bit(qubit, n_qubits);
  const Eigen::Index dim = reg.size();
  const Eigen::Index mask = Eigen::Index(1) << bit;
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    if (idx & mask) continue;
    Complex v0 = reg[idx];
    Complex v1 = reg[idx | mask];
    reg[idx] = u(0, 0) * v0 + u(0, 1) * v1;
    reg[idx | mask] = u(1, 0) * v0 + u(1, 1) * v1;
  }
}

}  // namespace

void apply_ideal_gate(const GateOp& gate, int n_qubits,
                      const GoldenTables& tables, Eigen::VectorXcd& reg) {
  check_qubit_index(gate.target, n_qubits);
  if (gate.is_two_qubit()) check_qubit_index(gate.target2, n_qubits);

  switch (gate.kind) {
    case GateOp::Kind::rot: {
      Eigen::Matrix2cd u = rotation_matrix(gate.angle, gate.axis_phase);
      u.col(0) *= tables.rot_phases[0];
      u.col(1) *= tables.rot_phases[1];
      apply_single_qubit(u, gate.target, n_qubits, reg);
      break;
    }
    case GateOp::Kind::rz: {
      Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
      u(0, 0) = Complex(1.0, 0.0);
      u(1, 1) = std::exp(Complex(0.0, gate.angle));
      apply_single_qubit(u, gate.target, n_qubits, reg);
      break;
    }
    case GateOp::Kind::cz: {
      const Eigen::Index mi = Eigen::Index(1)
                              << register_bit(gate.target, n_qubits);
      const Eigen::Index mj = Eigen::Index(1)
                              << register_bit(gate.target2, n_qubits);
      for (Eigen::Index idx = 0; idx < reg.size(); ++idx) {
        int table_index = ((idx & mi) ? 2 : 0) + ((idx & mj) ? 1 : 0);
        reg[idx] *= tables.cz_diagonal[table_index];
      }
      break;
    }
    case GateOp::Kind::cnot: {
      const Eigen::Index mi = Eigen::Index(1)
                              << register_bit(gate.target, n_qubits);
      const Eigen::Index mj = Eigen::Index(1)
                              << register_bit(gate.target2, n_qubits);
      for (Eigen::Index idx = 0; idx < reg.size(); ++idx) {
        reg[idx] *= tables.cnot_target_phases[(idx & mj) ? 1 : 0];
      }
      for (Eigen::Index idx = 0; idx < reg.size(); ++idx) {
        if ((idx & mi) && !(idx & mj)) std::swap(reg[idx], reg[idx | mj]);
      }
      break;
    }
  }
}

Eigen::MatrixXcd ideal_register_unitary(const GateOp& gate, int n_qubits,
                                        const GoldenTables& tables) {
  if (n_qubits > 12) {
    throw std::invalid_argument(
        "invalid-dimensions: dense register unitary limited to 12 qubits");
  }
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Eigen::MatrixXcd u(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[col] = Complex(1.0, 0.0);
    apply_ideal_gate(gate, n_qubits, tables, e);
    u.col(col) = e;
  }
  return u;
}

EnsembleState apply_schedule(EnsembleState state, const PulseSchedule& schedule,
                             const CompileContext& ctx) {
  for (const PulseStep& step : schedule.steps) {
    SparseOperator h = build_hamiltonian(*state.basis, step.pulse,
                                         ctx.blockade, ctx.decay, step.crosstalk);
    state = evolve(state, h, step.pulse.duration, ctx.evolve);
  }
  return state;
}

Eigen::VectorXcd register_projection(const EnsembleState& state) {
  const FockBasis& basis = *state.basis;
  const int n = basis.qubit_count();
  Eigen::VectorXcd reg = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
    if (!basis.is_register_state(i)) continue;
    const FockState& s = basis.state(i);
    Eigen::Index idx = 0;
    for (int q = 0; q < n; ++q) idx = (idx << 1) | s.register_occupations[q];
    reg[idx] = state.amplitudes[i];
  }
  return reg;
}

EnsembleState embed_register(std::shared_ptr<const FockBasis> basis,
                             const Eigen::VectorXcd& reg) {
  const int n = basis->qubit_count();
  if (reg.size() != (Eigen::Index(1) << n)) {
    throw std::invalid_argument("length-mismatch: register vector has wrong size");
  }
  EnsembleState state;
  state.basis = basis;
  state.amplitudes =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  for (Eigen::Index idx = 0; idx < reg.size(); ++idx) {
    if (reg[idx] == Complex(0.0, 0.0)) continue;
    std::string bits(n, '0');
    for (int q = 0; q < n; ++q) {
      if (idx & (Eigen::Index(1) << (n - 1 - q))) bits[q] = '1';
    }
    int fock_index = basis->index_of_bitstring(bits);
    if (fock_index < 0) {
      throw std::invalid_argument(
          "invalid-dimensions: register vector not representable in basis");
    }
    state.amplitudes[fock_index] = reg[idx];
  }
  return state;
}

Eigen::MatrixXcd reconstruct_register_map(const PulseSchedule& schedule,
                                          std::shared_ptr<const FockBasis> basis,
                                          const CompileContext& ctx) {
  const int n = basis->qubit_count();
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd map(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[col] = Complex(1.0, 0.0);
    EnsembleState out = apply_schedule(embed_register(basis, e), schedule, ctx);
    map.col(col) = register_projection(out);
  }
  return map;
}

std::vector<Eigen::VectorXcd> fidelity_probes(int n_qubits,
                                              const std::vector<int>& targets) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  std::vector<Eigen::VectorXcd> probes;
  probes.reserve(static_cast<std::size_t>(dim) + 8);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[idx] = Complex(1.0, 0.0);
    probes.push_back(std::move(e));
  }

  auto mask_of = [&](int qubit) {
    check_qubit_index(qubit, n_qubits);
    return Eigen::Index(1) << register_bit(qubit, n_qubits);
  };
  auto superpose = [&](std::vector<std::pair<Eigen::Index, Complex>> terms) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (auto& [idx, amp] : terms) v[idx] = amp;
    v.normalize();
    probes.push_back(std::move(v));
  };

  const Complex one(1, 0), i_unit(0, 1);
  if (targets.size() == 1) {
    const Eigen::Index t = mask_of(targets[0]);
    superpose({{0, one}, {t, one}});
    superpose({{0, one}, {t, -one}});
    superpose({{0, one}, {t, i_unit}});
    superpose({{0, one}, {t, -i_unit}});
    superpose({{0, one}, {t, std::exp(Complex(0.0, kPi / 4))}});
    superpose({{0, one}, {t, std::exp(Complex(0.0, -kPi / 4))}});
    superpose({{0, one}, {t, Complex(2, 0)}});
    superpose({{0, Complex(2, 0)}, {t, one}});
  } else if (targets.size() >= 2) {
    const Eigen::Index mi = mask_of(targets[0]);
    const Eigen::Index mj = mask_of(targets[1]);
    superpose({{0, one}, {mi | mj, one}});
    superpose({{0, one}, {mi | mj, -one}});
    superpose({{mj, one}, {mi, one}});
    superpose({{0, one}, {mi | mj, i_unit}});
    superpose({{0, one}, {mj, one}});
    superpose({{mi, one}, {mi | mj, one}});
    superpose({{0, one}, {mj, one}, {mi, one}, {mi | mj, one}});
    superpose({{0, one}, {mj, i_unit}, {mi, -one}, {mi | mj, -i_unit}});
  }
  return probes;
}

GateFidelityReport gate_fidelity(const PulseSchedule& schedule,
                                 const Eigen::MatrixXcd& reference,
                                 std::shared_ptr<const FockBasis> basis,
                                 const CompileContext& ctx,
                                 const std::vector<Eigen::VectorXcd>& probes) {
  GateFidelityReport report;
  report.worst_fidelity = 1.0;
  double fidelity_sum = 0.0;
  double leakage_sum = 0.0;
  for (const Eigen::VectorXcd& probe : probes) {
    EnsembleState out =
        apply_schedule(embed_register(basis, probe), schedule, ctx);
    Eigen::VectorXcd achieved = register_projection(out);
    Eigen::VectorXcd wanted = reference * probe;
    double f = std::norm(wanted.dot(achieved));
    double leak = 1.0 - achieved.squaredNorm();
    fidelity_sum += f;
    leakage_sum += leak;
    report.worst_fidelity = std::min(report.worst_fidelity, f);
    report.worst_leakage = std::max(report.worst_leakage, leak);
  }
  const double count = static_cast<double>(probes.size());
  report.average_fidelity = fidelity_sum / count;
  report.leakage = leakage_sum / count;
  return report;
}

GateFidelityReport gate_fidelity(const GateOp& gate,
                                 std::shared_ptr<const FockBasis> basis,
                                 const CompileContext& ctx,
                                 const GoldenTables& tables) {
  PulseSchedule schedule = compile_gate(gate, ctx);
  Eigen::MatrixXcd reference =
      ideal_register_unitary(gate, basis->qubit_count(), tables);
  std::vector<int> targets{gate.target};
  if (gate.is_two_qubit()) targets.push_back(gate.target2);
  return gate_fidelity(schedule, reference, basis, ctx,
                       fidelity_probes(basis->qubit_count(), targets));
}

namespace {

std::string format_complex_pair(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.12g %.12g", z.real(), z.imag());
  return buf;
}

}  // namespace

void save_golden_tables(const GoldenTables& tables, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open golden table file for writing: " + path);
  }
  out << "# Golden phase tables: exact diagonal phases of the compiled gate\n"
         "# protocols under ideal blockade, used as the fixed gate references.\n"
         "# One gate per line: name, entry count, then re im pairs.\n"
         "version 1\n";
  out << "rot 2";
  for (Complex z : tables.rot_phases) out << " " << format_complex_pair(z);
  out << "\ncz 4";
  for (Complex z : tables.cz_diagonal) out << " " << format_complex_pair(z);
  out << "\ncnot 2";
  for (Complex z : tables.cnot_target_phases) out << " " << format_complex_pair(z);
  out << "\n";
}

GoldenTables load_golden_tables(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open golden table file: " + path);
  }
  GoldenTables tables;
  bool version_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "version") {
      int v = 0;
      ss >> v;
      if (v != 1) throw std::runtime_error("unsupported golden table version");
      version_seen = true;
      continue;
    }
    int count = 0;
    ss >> count;
    auto read_entries = [&](Complex* dest, int expected) {
      if (count != expected) {
        throw std::runtime_error("golden table entry count mismatch for " + tag);
      }
      for (int k = 0; k < expected; ++k) {
        double re = 0.0, im = 0.0;
        if (!(ss >> re >> im)) {
          throw std::runtime_error("golden table parse error in " + tag);
        }
        dest[k] = Complex(re, im);
      }
    };
    if (tag == "rot") {
      read_entries(tables.rot_phases.data(), 2);
    } else if (tag == "cz") {
      read_entries(tables.cz_diagonal.data(), 4);
    } else if (tag == "cnot") {
      read_entries(tables.cnot_target_phases.data(), 2);
    } else {
      throw std::runtime_error("unknown golden table entry: " + tag);
    }
  }
  if (!version_seen) throw std::runtime_error("golden table file missing version");
  return tables;
}

}  // namespace rydreg
