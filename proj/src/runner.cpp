#include "rydreg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

#include "rydreg/propagator.hpp"
#include "rydreg/random.hpp"

namespace rydreg {

namespace {

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Eigen::Matrix2cd pulse_matrix(double area, double phase) {
  double c = std::cos(0.5 * area);
  double s = std::sin(0.5 * area);
  Eigen::Matrix2cd u;
  u << Complex(c, 0.0), Complex(0.0, -1.0) * std::exp(Complex(0.0, -phase)) * s,
      Complex(0.0, -1.0) * std::exp(Complex(0.0, phase)) * s, Complex(c, 0.0);
  return u;
}

// Net reservoir-pulse rotation for a branch whose Rabi frequency is off by
// `scale` relative to calibration, as a 2x2 product of the compiled
// segments.
Eigen::Matrix2cd reservoir_product(double theta, double phi, double scale,
                                   CalibrationPolicy::CompositeMode mode) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  for (auto [area, segment_phase] : reservoir_segment_plan(theta, phi, mode)) {
    u = pulse_matrix(area * scale, segment_phase) * u;
  }
  return u;
}

// Trace infidelity of the miscalibrated reservoir rotation against the
// calibrated one.
double branch_area_infidelity(double theta, double phi, double scale,
                              CalibrationPolicy::CompositeMode mode) {
  Eigen::Matrix2cd ideal = reservoir_product(theta, phi, 1.0, mode);
  Eigen::Matrix2cd actual = reservoir_product(theta, phi, scale, mode);
  Complex tr = (ideal.adjoint() * actual).trace();
  return 1.0 - std::norm(0.5 * tr);
}

// Worst reservoir-branch infidelity of one gate given the circuit's
// occupancy spread.
double gate_inhomogeneity(const GateOp& gate, const RunConfig& config,
                          int n_qubits) {
  std::vector<std::pair<double, double>> reservoir_areas;
  switch (gate.kind) {
    case GateOp::Kind::rot:
      if (gate.angle != 0.0) {
        reservoir_areas.emplace_back(std::abs(gate.angle), gate.axis_phase);
      }
      break;
    case GateOp::Kind::cnot:
      reservoir_areas.emplace_back(0.5 * kPi, 0.0);
      reservoir_areas.emplace_back(0.5 * kPi, 0.0);
      break;
    default:
      return 0.0;
  }
  std::int64_t reference = config.calibration.resolve_reference(
      config.atom_count, n_qubits);
  double worst = 0.0;
  for (auto [theta, phi] : reservoir_areas) {
    for (std::int64_t occupancy = config.atom_count - n_qubits + 1;
         occupancy <= config.atom_count; ++occupancy) {
      double scale = std::sqrt(static_cast<double>(occupancy) /
                               static_cast<double>(reference));
      worst = std::max(worst, branch_area_infidelity(
                                  theta, phi, scale,
                                  config.calibration.composite));
    }
  }
  return worst;
}

std::map<std::string, int> draw_samples(const RegisterDistribution& dist,
                                        int samples, std::uint64_t seed,
                                        double flip_probability) {
  std::map<std::string, int> counts;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    double u = uniform01(rng);
    double cumulative = 0.0;
    std::string outcome = "leak";
    for (const auto& [bits, p] : dist.probabilities) {
      cumulative += p;
      if (u < cumulative) {
        outcome = bits;
        break;
      }
    }
    if (outcome != "leak" && flip_probability > 0.0) {
      for (char& bit : outcome) {
        if (uniform01(rng) < flip_probability) bit = bit == '0' ? '1' : '0';
      }
    }
    counts[outcome] += 1;
  }
  return counts;
}

}  // namespace

std::shared_ptr<const FockBasis> make_basis(const RunConfig& config,
                                            int n_qubits, bool needs_aux) {
  OccupancyCaps caps = config.caps;
  if (needs_aux && caps.aux_rydberg_cap < 1) caps.aux_rydberg_cap = 1;
  return enumerate_basis(config.atom_count, n_qubits, caps);
}

CompileContext make_context(const RunConfig& config, int n_qubits) {
  CompileContext ctx;
  ctx.atom_count = config.atom_count;
  ctx.qubit_count = n_qubits;
  ctx.rabi = config.rabi;
  ctx.blockade = config.blockade();
  ctx.decay.rydberg_linewidth = config.gamma();
  ctx.calibration = config.calibration;
  ctx.evolve = config.evolve;

  if (config.crosstalk == "cosim") {
    LevelScheme scheme = config.scheme();
    std::vector<double> shifts(n_qubits + 1);
    for (int level = 0; level <= n_qubits; ++level) {
      const ZeemanEntry* entry = scheme.entry_for_register(level);
      if (entry == nullptr) {
        throw std::invalid_argument(
            "invalid-dimensions: level scheme has no entry for register level " +
            std::to_string(level));
      }
      shifts[level] = scheme.transition_shift(*entry);
    }
    ctx.crosstalk_by_level.resize(n_qubits + 1);
    for (int source = 0; source <= n_qubits; ++source) {
      for (int other = 0; other <= n_qubits; ++other) {
        if (other == source) continue;
        ctx.crosstalk_by_level[source].push_back(
            CrosstalkTerm{other, shifts[other] - shifts[source]});
      }
    }
  }
  return ctx;
}

RunReport run_circuit(const Circuit& circuit, const RunConfig& config,
                      const std::string& initial_bits, int samples) {
  auto start = std::chrono::steady_clock::now();
  config.validate();
  const int n = circuit.qubit_count;
  if (config.atom_count < n + 1) {
    throw std::invalid_argument(
        "invalid-dimensions: atom count must be at least qubit count + 1");
  }

  RunReport report;
  report.qubit_count = n;
  report.atom_count = config.atom_count;
  report.seed = config.seed;
  report.initial_bits =
      initial_bits.empty() ? std::string(n, '0') : initial_bits;
  if (static_cast<int>(report.initial_bits.size()) != n) {
    throw std::invalid_argument(
        "length-mismatch: initial bitstring length != qubit count");
  }

  const bool needs_aux = circuit.has_two_qubit_gate();
  std::shared_ptr<const FockBasis> basis = make_basis(config, n, needs_aux);
  CompileContext ctx = make_context(config, n);
  report.basis_size = basis->size();

  EnsembleState state = encode_register(basis, report.initial_bits);
  Eigen::VectorXcd ideal = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
  {
    Eigen::Index idx = 0;
    for (char bit : report.initial_bits) idx = (idx << 1) | (bit == '1');
    ideal[idx] = Complex(1.0, 0.0);
  }

  const GoldenTables tables = GoldenTables::protocol_defaults();
  int pulse_total = 0;
  for (const GateOp& gate : circuit.ops) {
    PulseSchedule schedule = compile_gate(gate, ctx);
    state = apply_schedule(std::move(state), schedule, ctx);
    apply_ideal_gate(gate, n, tables, ideal);

    GateRecord record;
    record.name = gate.name();
    record.duration_us = schedule.total_duration();
    record.pulse_count = static_cast<int>(schedule.steps.size());
    record.fidelity_vs_ideal = std::norm(ideal.dot(register_projection(state)));
    report.total_duration_us += record.duration_us;
    pulse_total += record.pulse_count;
    report.gates.push_back(std::move(record));

    report.budget.inhomogeneity_infidelity +=
        gate_inhomogeneity(gate, config, n);
  }
  report.budget.inhomogeneity_infidelity =
      std::min(1.0, report.budget.inhomogeneity_infidelity);

  report.distribution = register_distribution(state);

  report.budget.decay_loss = std::max(0.0, 1.0 - state.norm_squared());
  double multiply_excited = 0.0;
  for (int i = 0; i < static_cast<int>(basis->size()); ++i) {
    if (basis->state(i).total_rydberg_occupation() >= 2) {
      multiply_excited += std::norm(state.amplitudes[i]);
    }
  }
  report.budget.blockade_leakage = multiply_excited;

  if (config.crosstalk != "off") {
    ZeemanSelectivity selectivity =
        zeeman_selectivity(config.scheme(), config.rabi);
    report.budget.zeeman_crosstalk_bound =
        std::min(1.0, selectivity.worst_case_probability * pulse_total);
  }

  if (circuit.measure && samples > 0) {
    report.samples = samples;
    report.sample_counts =
        draw_samples(report.distribution, samples, config.seed,
                     config.readout_flip_probability);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

GateFidelityReport circuit_fidelity(const Circuit& circuit,
                                    const RunConfig& config) {
  config.validate();
  const int n = circuit.qubit_count;
  if (n > 12) {
    throw std::invalid_argument(
        "invalid-dimensions: circuit fidelity evaluation limited to 12 qubits");
  }
  if (config.atom_count < n + 1) {
    throw std::invalid_argument(
        "invalid-dimensions: atom count must be at least qubit count + 1");
  }
  const bool needs_aux = circuit.has_two_qubit_gate();
  std::shared_ptr<const FockBasis> basis = make_basis(config, n, needs_aux);
  CompileContext ctx = make_context(config, n);

  PulseSchedule combined;
  const GoldenTables tables = GoldenTables::protocol_defaults();
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd reference = Eigen::MatrixXcd::Identity(dim, dim);
  for (const GateOp& gate : circuit.ops) {
    PulseSchedule schedule = compile_gate(gate, ctx);
    combined.steps.insert(combined.steps.end(), schedule.steps.begin(),
                          schedule.steps.end());
    reference = ideal_register_unitary(gate, n, tables) * reference;
  }

  std::vector<int> targets{1};
  if (!circuit.ops.empty()) {
    targets[0] = circuit.ops.front().target;
    if (circuit.ops.front().is_two_qubit()) {
      targets.push_back(circuit.ops.front().target2);
    }
  }
  return gate_fidelity(combined, reference, basis, ctx,
                       fidelity_probes(n, targets));
}

std::vector<SweepRow> sweep(const std::string& axis,
                            const std::vector<double>& grid,
                            const Circuit& circuit, const RunConfig& config) {
  if (grid.empty()) {
    throw std::invalid_argument("invalid-dimensions: sweep grid is empty");
  }
  if (axis != "U" && axis != "K" && axis != "B" && axis != "omega" &&
      axis != "n") {
    throw std::invalid_argument("unknown-parameter: sweep axis '" + axis + "'");
  }

  auto configure = [&](double value) {
    RunConfig point = config;
    if (axis == "U") {
      point.blockade_mode = "fixed";
      point.blockade_sign = config.blockade_sign;
      point.u_fixed = angular_from_mhz(value);
    } else if (axis == "K") {
      point.atom_count = static_cast<std::int64_t>(std::llround(value));
    } else if (axis == "B") {
      point.bias_field_gauss = value;
    } else if (axis == "omega") {
      point.rabi = angular_from_mhz(value);
    } else {  // n
      int n_new = static_cast<int>(std::llround(value));
      point.forster = config.forster.scaled_to_n(n_new, config.rydberg_n);
      point.rydberg_n = n_new;
    }
    return point;
  };

  std::vector<std::future<GateFidelityReport>> futures;
  futures.reserve(grid.size());
  for (double value : grid) {
    futures.push_back(std::async(std::launch::async, [&, value] {
      return circuit_fidelity(circuit, configure(value));
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    GateFidelityReport r = futures[k].get();
    rows.push_back(
        SweepRow{grid[k], r.average_fidelity, r.worst_fidelity, r.leakage});
  }
  return rows;
}

namespace {

std::string axis_label(const std::string& axis) {
  if (axis == "U") return "u_mhz";
  if (axis == "K") return "atoms";
  if (axis == "B") return "b_gauss";
  if (axis == "omega") return "rabi_mhz";
  return "n";
}

}  // namespace

std::string sweep_csv(const std::string& axis,
                      const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << axis_label(axis) << ",average_fidelity,worst_fidelity,leakage\n";
  for (const SweepRow& row : rows) {
    out << fmt12(row.value) << "," << fmt12(row.average_fidelity) << ","
        << fmt12(row.worst_fidelity) << "," << fmt12(row.leakage) << "\n";
  }
  return out.str();
}

std::string interaction_curve_csv(const ForsterParams& params,
                                  const std::vector<double>& r_grid_um) {
  std::ostringstream out;
  out << "r_um,u_mhz\n";
  for (auto [r, u] : forster_curve(params, r_grid_um)) {
    out << fmt12(r) << "," << fmt12(mhz_from_angular(u)) << "\n";
  }
  return out.str();
}

std::string blockade_mc_csv(const BlockadeStatistics& stats) {
  std::ostringstream out;
  out << "sample,u_min_mhz\n";
  for (std::size_t k = 0; k < stats.u_min.size(); ++k) {
    out << k << "," << fmt12(mhz_from_angular(stats.u_min[k])) << "\n";
  }
  return out.str();
}

std::string zeeman_report_text(const LevelScheme& scheme, double rabi) {
  std::ostringstream out;
  out << "Zeeman register map (B = " << fmt12(scheme.bias_field_gauss)
      << " G, n = " << scheme.rydberg_n << ")\n";
  out << "index  f   m   m_j   shift/2pi_MHz  excluded\n";
  for (const ZeemanEntry& e : scheme.entries) {
    char line[128];
    std::snprintf(line, sizeof line, "%5d  %d  %+d  %+d/2  %13s  %d\n",
                  e.register_index, e.f, e.m, e.mj_doubled,
                  fmt12(mhz_from_angular(scheme.transition_shift(e))).c_str(),
                  e.excluded ? 1 : 0);
    out << line;
  }

  auto degenerate = degenerate_transition_check(scheme);
  out << "usable states: " << scheme.usable_count() << "\n";
  out << "degenerate transition pairs: " << degenerate.size() << "\n";
  for (auto [i, j] : degenerate) {
    const ZeemanEntry& a = scheme.entries[i];
    const ZeemanEntry& b = scheme.entries[j];
    out << "  (f=" << a.f << ", m=" << a.m << ") and (f=" << b.f
        << ", m=" << b.m << ")\n";
  }

  ZeemanSelectivity sel = zeeman_selectivity(scheme, rabi);
  out << "min transition separation /2pi MHz = "
      << fmt12(mhz_from_angular(sel.min_separation)) << "\n";
  out << "worst-case off-resonant excitation = "
      << fmt12(sel.worst_case_probability) << "\n";
  out << "time-averaged off-resonant excitation = "
      << fmt12(sel.time_averaged_probability) << "\n";
  return out.str();
}

std::string report_text(const RunReport& report) {
  std::ostringstream out;
  out << "register simulation report\n";
  out << "qubits: " << report.qubit_count << "\n";
  out << "atoms: " << report.atom_count << "\n";
  out << "basis states: " << report.basis_size << "\n";
  out << "initial: " << report.initial_bits << "\n";
  out << "total pulse time (us): " << fmt12(report.total_duration_us) << "\n";
  out << "\nfinal register distribution\n";
  for (const auto& [bits, p] : report.distribution.probabilities) {
    out << "  " << bits << "  " << fmt12(p) << "\n";
  }
  out << "  leakage  " << fmt12(report.distribution.leakage) << "\n";
  out << "\nper-gate fidelity vs ideal\n";
  for (std::size_t k = 0; k < report.gates.size(); ++k) {
    const GateRecord& g = report.gates[k];
    out << "  " << (k + 1) << "  " << g.name << "  "
        << fmt12(g.fidelity_vs_ideal) << "  (" << g.pulse_count
        << " pulses, " << fmt12(g.duration_us) << " us)\n";
  }
  out << "\nerror budget\n";
  out << "  blockade leakage: " << fmt12(report.budget.blockade_leakage)
      << "\n";
  out << "  decay loss: " << fmt12(report.budget.decay_loss) << "\n";
  out << "  inhomogeneity infidelity: "
      << fmt12(report.budget.inhomogeneity_infidelity) << "\n";
  out << "  zeeman crosstalk bound: "
      << fmt12(report.budget.zeeman_crosstalk_bound) << "\n";
  if (report.samples > 0) {
    out << "\nmeasurement samples (seed " << report.seed << ", "
        << report.samples << " draws)\n";
    for (const auto& [bits, count] : report.sample_counts) {
      out << "  " << bits << "  " << count << "\n";
    }
  }
  return out.str();
}

std::string report_kv(const RunReport& report) {
  std::ostringstream out;
  out << "qubits = " << report.qubit_count << "\n";
  out << "atoms = " << report.atom_count << "\n";
  out << "basis_size = " << report.basis_size << "\n";
  out << "initial = " << report.initial_bits << "\n";
  out << "total_duration_us = " << fmt12(report.total_duration_us) << "\n";
  for (const auto& [bits, p] : report.distribution.probabilities) {
    out << "p_" << bits << " = " << fmt12(p) << "\n";
  }
  out << "leakage = " << fmt12(report.distribution.leakage) << "\n";
  for (std::size_t k = 0; k < report.gates.size(); ++k) {
    out << "gate_" << (k + 1) << " = " << report.gates[k].name << "\n";
    out << "gate_" << (k + 1)
        << "_fidelity = " << fmt12(report.gates[k].fidelity_vs_ideal) << "\n";
  }
  out << "budget_blockade_leakage = " << fmt12(report.budget.blockade_leakage)
      << "\n";
  out << "budget_decay_loss = " << fmt12(report.budget.decay_loss) << "\n";
  out << "budget_inhomogeneity_infidelity = "
      << fmt12(report.budget.inhomogeneity_infidelity) << "\n";
  out << "budget_zeeman_crosstalk_bound = "
      << fmt12(report.budget.zeeman_crosstalk_bound) << "\n";
  out << "seed = " << report.seed << "\n";
  out << "samples = " << report.samples << "\n";
  for (const auto& [bits, count] : report.sample_counts) {
    out << "count_" << bits << " = " << count << "\n";
  }
  return out.str();
}

}  // namespace rydreg
