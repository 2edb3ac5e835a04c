#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rydreg/circuit.hpp"
#include "rydreg/config.hpp"
#include "rydreg/fock_basis.hpp"
#include "rydreg/gates.hpp"
#include "rydreg/physics.hpp"

namespace rydreg {

struct GateRecord {
  std::string name;
  double fidelity_vs_ideal = 0.0;  // state fidelity against the ideal track
  double duration_us = 0.0;
  int pulse_count = 0;
};

// Per-mechanism error attribution. blockade_leakage is the final population
// in multiply Rydberg-excited states (the blockade's failure mode);
// decay_loss is the accumulated norm deficit; inhomogeneity_infidelity is
// the analytic worst-branch reservoir-pulse area error summed over gates;
// the Zeeman bound is the per-pulse off-resonant excitation probability
// times the pulse count (capped at 1). These are diagnostics, not a
// partition: the distribution's leakage remains the complete accounting.
struct ErrorBudget {
  double blockade_leakage = 0.0;
  double decay_loss = 0.0;
  double inhomogeneity_infidelity = 0.0;
  double zeeman_crosstalk_bound = 0.0;
};

struct RunReport {
  int qubit_count = 0;
  std::int64_t atom_count = 0;
  std::size_t basis_size = 0;
  std::string initial_bits;
  RegisterDistribution distribution;
  std::vector<GateRecord> gates;
  ErrorBudget budget;
  double total_duration_us = 0.0;
  int samples = 0;
  std::map<std::string, int> sample_counts;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

// Compile context for a circuit on this configuration.
CompileContext make_context(const RunConfig& config, int n_qubits);
std::shared_ptr<const FockBasis> make_basis(const RunConfig& config,
                                            int n_qubits, bool needs_aux);

// Encodes the initial bitstring (empty = all zeros), compiles and simulates
// every gate in order, and assembles distribution, per-gate fidelities and
// the error budget. With samples > 0 and a measure directive, measurement
// outcomes are drawn from the analytic distribution with the seeded
// generator; the analytic distribution is always reported alongside.
RunReport run_circuit(const Circuit& circuit, const RunConfig& config,
                      const std::string& initial_bits = "", int samples = 0);

// Whole-circuit fidelity against the ideal gate product, evaluated over the
// standard probe set. Used by parameter sweeps.
GateFidelityReport circuit_fidelity(const Circuit& circuit,
                                    const RunConfig& config);

struct SweepRow {
  double value = 0.0;
  double average_fidelity = 0.0;
  double worst_fidelity = 0.0;
  double leakage = 0.0;
};

// Re-evaluates the circuit with the named parameter set to each grid value.
// Axes: "U" (fixed blockade shift, MHz), "K" (atom count), "B" (gauss),
// "omega" (Rabi frequency, MHz), "n" (principal quantum number; rescales the
// interaction anchor and the lifetime). Grid points run concurrently.
std::vector<SweepRow> sweep(const std::string& axis,
                            const std::vector<double>& grid,
                            const Circuit& circuit, const RunConfig& config);

// Rendered outputs. All floating values are printed with 12 significant
// digits and Unix line endings; identical inputs yield byte-identical text.
std::string report_text(const RunReport& report);
std::string report_kv(const RunReport& report);
std::string sweep_csv(const std::string& axis,
                      const std::vector<SweepRow>& rows);
std::string interaction_curve_csv(const ForsterParams& params,
                                  const std::vector<double>& r_grid_um);
std::string blockade_mc_csv(const BlockadeStatistics& stats);
std::string zeeman_report_text(const LevelScheme& scheme, double rabi);

}  // namespace rydreg
