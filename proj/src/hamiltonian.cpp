#include "rydreg/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace rydreg {

BlockadeModel BlockadeModel::fixed_shift(double u, int sign) {
  if (u < 0.0) {
    throw std::invalid_argument("invalid-dimensions: fixed blockade shift must be >= 0");
  }
  BlockadeModel m;
  m.mode = Mode::fixed;
  m.u_fixed = u;
  m.sign = sign >= 0 ? +1 : -1;
  return m;
}

BlockadeModel BlockadeModel::forster(double c3, double delta,
                                     double pair_distance, int sign) {
  BlockadeModel m;
  m.mode = Mode::forster;
  m.c3 = c3;
  m.delta = delta;
  m.pair_distance = pair_distance;
  m.sign = sign >= 0 ? +1 : -1;
  return m;
}

double forster_shift(double c3, double delta, double r) {
  if (r <= 0.0) {
    throw std::invalid_argument("nonpositive-distance: pair distance must be > 0");
  }
  double half_delta = 0.5 * delta;
  double r3 = r * r * r;
  double coupling = c3 / r3;
  double eigenvalue = std::sqrt(half_delta * half_delta +
                                (4.0 / 3.0) * coupling * coupling);
  return std::abs(eigenvalue - half_delta);
}

double blockade_shift(const BlockadeModel& blockade) {
  if (blockade.mode == BlockadeModel::Mode::fixed) return blockade.u_fixed;
  return forster_shift(blockade.c3, blockade.delta, blockade.pair_distance);
}

namespace {

// One coupled transition: atoms move between `level` and the Rydberg channel
// with an extra diagonal energy on the source level encoding its Zeeman
// offset from the driven transition.
struct CoupledLevel {
  int level;
  double diagonal_offset;
};

}  // namespace

SparseOperator build_hamiltonian(const FockBasis& basis, const PulseSpec& pulse,
                                 const BlockadeModel& blockade,
                                 const DecayModel& decay,
                                 const std::vector<CrosstalkTerm>& crosstalk) {
  const int n_levels = basis.qubit_count();
  if (pulse.source_level < 0 || pulse.source_level > n_levels) {
    throw std::invalid_argument("unknown-level: pulse source level out of range");
  }
  if (pulse.channel == RydbergChannel::aux && basis.caps().aux_rydberg_cap < 1) {
    throw std::invalid_argument(
        "unknown-level: basis has no auxiliary Rydberg level");
  }

  std::vector<CoupledLevel> coupled;
  coupled.push_back({pulse.source_level, 0.0});
  for (const CrosstalkTerm& term : crosstalk) {
    if (term.level < 0 || term.level > n_levels) {
      throw std::invalid_argument("unknown-level: crosstalk level out of range");
    }
    if (term.level == pulse.source_level) {
      throw std::invalid_argument(
          "unknown-level: crosstalk level equals the driven level");
    }
    coupled.push_back({term.level, -term.detuning});
  }

  const double u_signed = blockade.sign * blockade_shift(blockade);
  const Complex half_rabi_up =
      0.5 * pulse.rabi * std::exp(Complex(0.0, pulse.phase));
  const bool aux = pulse.channel == RydbergChannel::aux;
  const int channel_cap =
      aux ? basis.caps().aux_rydberg_cap : basis.caps().rydberg_cap;

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(basis.size() * (2 + 2 * coupled.size()));

  for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
    const FockState& s = basis.state(i);
    const int n_channel = aux ? s.aux_rydberg_occupation : s.rydberg_occupation;
    const int n_tot = s.total_rydberg_occupation();

    Complex diag(0.0, 0.0);
    diag += -pulse.detuning * static_cast<double>(n_channel);
    diag += u_signed * 0.5 * static_cast<double>(n_tot) *
            static_cast<double>(n_tot - 1);
    for (const CoupledLevel& c : coupled) {
      if (c.diagonal_offset == 0.0) continue;
      if (c.level > 0) {
        diag += c.diagonal_offset * s.register_occupations[c.level - 1];
      } else {
        // Reservoir offset, referenced to the all-atoms-in-reservoir state so
        // the diagonal stays small: k0 - K = -(sum b + n_tot).
        diag += c.diagonal_offset *
                static_cast<double>(basis.reservoir_occupation(s) -
                                    basis.atom_count());
      }
    }
    if (decay.rydberg_linewidth > 0.0) {
      diag += Complex(0.0, -0.5 * decay.rydberg_linewidth * n_tot);
    }
    if (diag != Complex(0.0, 0.0)) triplets.emplace_back(i, i, diag);

    // Raising part: one atom from the coupled level into the Rydberg channel.
    // The lowering part is added as the exact conjugate at the mirrored
    // position, so the coherent Hamiltonian is Hermitian to the last bit.
    if (n_channel >= channel_cap) continue;
    for (const CoupledLevel& c : coupled) {
      FockState target = s;
      double occupancy;
      if (c.level == 0) {
        std::int64_t k0 = basis.reservoir_occupation(s);
        if (k0 <= 0) continue;
        occupancy = static_cast<double>(k0);
      } else {
        int b = s.register_occupations[c.level - 1];
        if (b <= 0) continue;
        occupancy = static_cast<double>(b);
        target.register_occupations[c.level - 1] = b - 1;
      }
      if (aux) {
        target.aux_rydberg_occupation += 1;
      } else {
        target.rydberg_occupation += 1;
      }
      int j = basis.index_of(target);
      if (j < 0) continue;  // truncated away
      Complex element =
          half_rabi_up * std::sqrt(occupancy * (n_channel + 1.0));
      triplets.emplace_back(j, i, element);
      triplets.emplace_back(i, j, std::conj(element));
    }
  }

  SparseOperator h(static_cast<int>(basis.size()),
                   static_cast<int>(basis.size()));
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

}  // namespace rydreg
