#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rydreg/fock_basis.hpp"
#include "rydreg/units.hpp"

namespace rydreg {

using SparseOperator = Eigen::SparseMatrix<Complex>;

// Which Rydberg level a pulse couples to. Two-bit gate schedules park control
// population in the auxiliary level so that the target-level drive does not
// de-excite it.
enum class RydbergChannel { primary, aux };

// One square laser pulse in the rotating frame. source_level 0 is the
// reservoir; levels 1..N are register levels. All frequencies are angular
// (rad/us), durations in us.
struct PulseSpec {
  int source_level = 0;
  double rabi = 0.0;      // effective two-photon Rabi frequency
  double detuning = 0.0;  // laser minus transition frequency
  double phase = 0.0;
  double duration = 0.0;
  RydbergChannel channel = RydbergChannel::primary;
};

// Interaction-induced shift of doubly Rydberg-excited states. In fixed mode
// the shift is given directly; in forster mode it derives from the
// dipole-dipole coefficient c3 (rad/us um^3), the two-atom energy defect
// delta (rad/us) and the pair distance r (um), as the shift of the pair
// eigenvalue relative to its non-interacting asymptote. The sign branch of
// the pair eigenvalue is kept separately; the magnitude sets the blockade.
struct BlockadeModel {
  enum class Mode { fixed, forster };
  Mode mode = Mode::fixed;
  double u_fixed = 0.0;
  double c3 = 0.0;
  double delta = 0.0;
  double pair_distance = 0.0;
  int sign = +1;

  static BlockadeModel fixed_shift(double u, int sign = +1);
  static BlockadeModel forster(double c3, double delta, double pair_distance,
                               int sign = +1);
};

// Magnitude of the blockade shift for the model (rad/us, >= 0).
double blockade_shift(const BlockadeModel& blockade);

// Shift of a Forster pair at distance r (um) for given c3/delta, i.e.
// |sqrt((delta/2)^2 + (4/3) c3^2 / r^6) - delta/2|.
double forster_shift(double c3, double delta, double r);

// Population decay of the Rydberg levels, entering evolution as a
// non-Hermitian -i(gamma/2) per Rydberg atom. gamma = 1/tau.
struct DecayModel {
  double rydberg_linewidth = 0.0;
};

// Additional level coupled by the same laser at a Zeeman offset. detuning is
// the transition-frequency offset of this level's transition relative to the
// driven one, so with a resonant drive the effective detuning of the
// crosstalk transition is -detuning.
struct CrosstalkTerm {
  int level = 0;
  double detuning = 0.0;
};

// Builds the rotating-frame pulse Hamiltonian on the given basis:
//   - off-diagonal (rabi/2) e^{i phase} sqrt(b_a (n+1)) between states that
//     differ by one atom moved from the source level to the Rydberg channel
//     (sqrt(k0 (n+1)) on the reservoir transition), plus the conjugate;
//   - diagonal -detuning * n_channel;
//   - diagonal blockade shift U * n_tot (n_tot - 1) / 2 over all Rydberg
//     atoms, with the model's recorded sign;
//   - optional crosstalk couplings at their Zeeman offsets;
//   - diagonal -i (gamma/2) n_tot when decay is enabled.
// The coherent part is exactly Hermitian by construction.
SparseOperator build_hamiltonian(const FockBasis& basis, const PulseSpec& pulse,
                                 const BlockadeModel& blockade,
                                 const DecayModel& decay = {},
                                 const std::vector<CrosstalkTerm>& crosstalk = {});

}  // namespace rydreg
