#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "rydreg/units.hpp"

namespace rydreg {

// Occupancy truncation for the symmetric basis. register_cap 1 keeps the
// computational subspace only; 2 makes double occupation of register levels
// representable for leakage studies. rydberg_cap must be >= 2 to resolve
// blockade leakage. The auxiliary Rydberg level is used by two-bit gate
// schedules to park control population; cap 0 removes it entirely.
struct OccupancyCaps {
  int register_cap = 1;
  int rydberg_cap = 2;
  int aux_rydberg_cap = 0;
};

// One occupation-number basis element: b_1..b_N atoms in the register levels,
// n_r in the Rydberg level, n_aux in the auxiliary Rydberg level. The
// reservoir count k0 = K - sum(b) - n_r - n_aux is always derived, never
// stored, so total atom number is conserved by construction.
struct FockState {
  std::vector<int> register_occupations;
  int rydberg_occupation = 0;
  int aux_rydberg_occupation = 0;

  int total_register_occupation() const {
    int s = 0;
    for (int b : register_occupations) s += b;
    return s;
  }
  int total_rydberg_occupation() const {
    return rydberg_occupation + aux_rydberg_occupation;
  }
  bool operator==(const FockState& other) const = default;
};

// Ordered, truncated symmetric basis for K atoms and N register levels.
// States are enumerated lexicographically on (b_1..b_N, n_r, n_aux), skipping
// tuples whose reservoir count would be negative. Immutable after
// construction; share read-only across concurrent runs.
class FockBasis {
 public:
  FockBasis(std::int64_t atom_count, int qubit_count, OccupancyCaps caps);

  std::int64_t atom_count() const { return atom_count_; }
  int qubit_count() const { return qubit_count_; }
  const OccupancyCaps& caps() const { return caps_; }

  const std::vector<FockState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const FockState& state(int index) const { return states_[index]; }

  // Position of a state in the enumeration, or -1 when it is outside the
  // truncated basis.
  int index_of(const FockState& s) const;

  std::int64_t reservoir_occupation(const FockState& s) const {
    return atom_count_ - s.total_register_occupation() -
           s.total_rydberg_occupation();
  }

  // Register states are those with no Rydberg population and every register
  // level holding 0 or 1 atoms; they carry computational bitstrings.
  bool is_register_state(int index) const;
  std::string bitstring_of(int index) const;
  int index_of_bitstring(const std::string& bits) const;

 private:
  std::uint64_t pack_key(const FockState& s) const;

  std::int64_t atom_count_;
  int qubit_count_;
  OccupancyCaps caps_;
  std::vector<FockState> states_;
  std::unordered_map<std::uint64_t, int> index_;
};

std::shared_ptr<const FockBasis> enumerate_basis(std::int64_t atom_count,
                                                 int qubit_count,
                                                 OccupancyCaps caps = {});

// Complex amplitude vector over an enumerated Fock basis. Squared norm is 1
// under unitary evolution and decreases monotonically under decay.
struct EnsembleState {
  std::shared_ptr<const FockBasis> basis;
  Eigen::VectorXcd amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

EnsembleState encode_register(std::shared_ptr<const FockBasis> basis,
                              const std::string& bits);

struct RegisterDistribution {
  std::map<std::string, double> probabilities;  // register bitstring -> p
  double leakage = 0.0;  // population outside the register set + norm deficit
};

RegisterDistribution register_distribution(const EnsembleState& state);

// |<a|b>|^2. Both states must share one basis.
double fidelity(const EnsembleState& a, const EnsembleState& b);

}  // namespace rydreg
