#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rydreg/units.hpp"

namespace rydreg {

// Effective Forster interaction parameters. c3 is a direct model input
// (rad/us um^3 internally; config files take GHz um^3); the radial matrix
// elements behind it are not computed. delta is the effective two-atom
// energy defect. The anisotropy fraction bounds the per-pair deviation of
// the interaction from its isotropic value.
struct ForsterParams {
  double c3 = 0.0;
  double delta = 0.0;
  double anisotropy_fraction = 0.15;

  // Parameters pinned by the two-point fit of the n = 70 cesium anchors
  // U(3 um)/2pi = 1000 MHz and U(5 um)/2pi = 80 MHz.
  static ForsterParams cesium_defaults();

  // c3 rescaled from the n = n_ref anchor by the (n/n_ref)^4 scaling of the
  // dipole matrix element product; delta is kept fixed.
  ForsterParams scaled_to_n(int n, int n_ref = 70) const;
};

// Interaction shift over a distance grid, in the grid's order.
std::vector<std::pair<double, double>> forster_curve(
    const ForsterParams& params, const std::vector<double>& r_grid_um);

// Recovers (c3, delta) from (r, U) samples of the shift curve. After
// squaring, U^2 + U delta = (4/3) c3^2 / r^6 is linear in (delta, c3^2):
// two points are solved exactly, more in the least-squares sense.
ForsterParams fit_forster_params(
    const std::vector<std::pair<double, double>>& points);

// One ground Zeeman state of the register map. The Rydberg target follows a
// fixed m_j assignment (stretched states couple to the matching sign; the
// m = 0 states split between the hyperfine manifolds) chosen so that with a
// bias field only the two stretched transitions remain degenerate.
struct ZeemanEntry {
  int register_index = -1;  // 0 reservoir, 1..14 qubits, -1 excluded
  int f = 4;
  int m = 0;
  bool excluded = false;
  int mj_doubled = 1;       // 2 m_j of the targeted |ns_1/2> state
  int shift_quarters = 0;   // transition shift in units of mu_B B / (4 hbar)
};

// Cesium 6s_1/2 level scheme: 16 Zeeman states in f = 3, 4; one stretched
// state excluded leaves the reservoir plus a 14-qubit register. Linear Zeeman
// model with g_f = +-1/4 and g_j m_j = +-1 for the Rydberg state.
struct LevelScheme {
  std::vector<ZeemanEntry> entries;
  double bias_field_gauss = 15.0;
  int rydberg_n = 70;

  int usable_count() const;
  // Zeeman shift of an entry's ground->Rydberg transition, rad/us.
  double transition_shift(const ZeemanEntry& entry) const;
  // mu_B B / (4 hbar) in rad/us.
  double quarter_unit() const;
  const ZeemanEntry* entry_for_register(int register_index) const;

  static LevelScheme cesium(bool exclude_stretched = true,
                            double bias_field_gauss = 15.0, int rydberg_n = 70);
};

LevelScheme load_level_scheme(const std::string& path,
                              double bias_field_gauss = 15.0,
                              int rydberg_n = 70);
void save_level_scheme(const LevelScheme& scheme, const std::string& path);

struct ZeemanSelectivity {
  double min_separation = 0.0;             // rad/us
  double worst_case_probability = 0.0;     // peak detuned-Rabi transfer
  double time_averaged_probability = 0.0;  // half the peak
};

// Frequency selectivity of the scheme at drive strength rabi (rad/us):
// minimum pairwise transition separation among usable states and the
// corresponding off-resonant excitation probability rabi^2/(rabi^2 + sep^2).
ZeemanSelectivity zeeman_selectivity(const LevelScheme& scheme, double rabi);

// Pairs of usable entries (indices into scheme.entries) whose transitions
// are frequency degenerate. B = 0 degenerates everything and is reported,
// not rejected.
std::vector<std::pair<int, int>> degenerate_transition_check(
    const LevelScheme& scheme);

// Cubic lifetime scaling tau(n) = tau_ref (n/n_ref)^3 for low-l Rydberg
// states; returns the population decay rate 1/tau in 1/us.
double rydberg_linewidth(int n, double tau_ref_us, int n_ref);

// Trap region the ensemble occupies. scale is the linear extent: box edge,
// sphere diameter, 4 sigma of a gaussian cloud, or the fixed separation of a
// pinned pair.
struct TrapGeometry {
  enum class Shape { box, sphere, gaussian_cloud, pinned_pair };
  Shape shape = Shape::sphere;
  double scale_um = 5.0;
  int atom_count = 100;
};

struct BlockadeStatistics {
  std::vector<double> u_min;  // per-sample worst-pair shift, rad/us

  double median() const;
  double minimum() const;
  double maximum() const;
};

// Monte-Carlo distribution of the worst (smallest) pairwise interaction over
// sampled atom configurations. Each pair's shift carries an anisotropy
// factor drawn uniformly from [1-a, 1+a]. Per-sample seeds are derived from
// the master seed, so results are reproducible and samples independent.
BlockadeStatistics blockade_statistics(const TrapGeometry& geometry,
                                       const ForsterParams& params,
                                       int samples, std::uint64_t seed);

}  // namespace rydreg
