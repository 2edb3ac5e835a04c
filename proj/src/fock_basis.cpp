#include "rydreg/fock_basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace rydreg {

namespace {

constexpr int kMaxQubits = 29;  // 2 bits per register level in a 64-bit key

}  // namespace

FockBasis::FockBasis(std::int64_t atom_count, int qubit_count,
                     OccupancyCaps caps)
    : atom_count_(atom_count), qubit_count_(qubit_count), caps_(caps) {
  if (atom_count < 1 || qubit_count < 1) {
    throw std::invalid_argument(
        "invalid-dimensions: atom count and qubit count must be >= 1");
  }
  if (caps.register_cap < 1 || caps.register_cap > 2) {
    throw std::invalid_argument("invalid-dimensions: register_cap must be 1 or 2");
  }
  if (caps.rydberg_cap < 1 || caps.aux_rydberg_cap < 0) {
    throw std::invalid_argument(
        "invalid-dimensions: rydberg_cap >= 1 and aux_rydberg_cap >= 0 required");
  }
  if (qubit_count > kMaxQubits) {
    throw std::invalid_argument("invalid-dimensions: qubit count exceeds 29");
  }
  if (atom_count < static_cast<std::int64_t>(qubit_count) * caps.register_cap) {
    // Every register bitstring must be representable, so at least one atom
    // per register level is required.
    throw std::invalid_argument(
        "invalid-dimensions: atom count too small for the register");
  }

  FockState s;
  s.register_occupations.assign(qubit_count, 0);

  // Lexicographic enumeration on (b_1..b_N, n_r, n_aux); tuples exceeding the
  // atom budget are skipped.
  const std::int64_t budget = atom_count;
  std::vector<int>& b = s.register_occupations;
  while (true) {
    std::int64_t used = s.total_register_occupation();
    if (used <= budget) {
      for (int nr = 0; nr <= caps.rydberg_cap; ++nr) {
        if (used + nr > budget) break;
        for (int na = 0; na <= caps.aux_rydberg_cap; ++na) {
          if (used + nr + na > budget) break;
          s.rydberg_occupation = nr;
          s.aux_rydberg_occupation = na;
          index_.emplace(pack_key(s), static_cast<int>(states_.size()));
          states_.push_back(s);
        }
      }
    }
    // Advance the register occupation vector like a mixed-radix counter with
    // b_N least significant.
    int pos = qubit_count - 1;
    while (pos >= 0 && b[pos] == caps.register_cap) {
      b[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++b[pos];
  }
}

std::uint64_t FockBasis::pack_key(const FockState& s) const {
  std::uint64_t key = 0;
  for (int b : s.register_occupations) key = (key << 2) | static_cast<unsigned>(b);
  key = (key << 3) | static_cast<unsigned>(s.rydberg_occupation);
  key = (key << 3) | static_cast<unsigned>(s.aux_rydberg_occupation);
  return key;
}

int FockBasis::index_of(const FockState& s) const {
  if (static_cast<int>(s.register_occupations.size()) != qubit_count_) return -1;
  for (int b : s.register_occupations) {
    if (b < 0 || b > caps_.register_cap) return -1;
  }
  if (s.rydberg_occupation < 0 || s.rydberg_occupation > caps_.rydberg_cap ||
      s.aux_rydberg_occupation < 0 ||
      s.aux_rydberg_occupation > caps_.aux_rydberg_cap) {
    return -1;
  }
  if (reservoir_occupation(s) < 0) return -1;
  auto it = index_.find(pack_key(s));
  return it == index_.end() ? -1 : it->second;
}

bool FockBasis::is_register_state(int index) const {
  const FockState& s = states_[index];
  if (s.total_rydberg_occupation() != 0) return false;
  for (int b : s.register_occupations) {
    if (b > 1) return false;
  }
  return true;
}

std::string FockBasis::bitstring_of(int index) const {
  const FockState& s = states_[index];
  std::string bits(qubit_count_, '0');
  for (int i = 0; i < qubit_count_; ++i) {
    bits[i] = s.register_occupations[i] ? '1' : '0';
  }
  return bits;
}

int FockBasis::index_of_bitstring(const std::string& bits) const {
  if (static_cast<int>(bits.size()) != qubit_count_) {
    throw std::invalid_argument("length-mismatch: bitstring length != qubit count");
  }
  FockState s;
  s.register_occupations.resize(qubit_count_);
  for (int i = 0; i < qubit_count_; ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw std::invalid_argument("length-mismatch: bitstring must be over {0,1}");
    }
    s.register_occupations[i] = bits[i] - '0';
  }
  return index_of(s);
}

std::shared_ptr<const FockBasis> enumerate_basis(std::int64_t atom_count,
                                                 int qubit_count,
                                                 OccupancyCaps caps) {
  return std::make_shared<const FockBasis>(atom_count, qubit_count, caps);
}

EnsembleState encode_register(std::shared_ptr<const FockBasis> basis,
                              const std::string& bits) {
  int idx = basis->index_of_bitstring(bits);
  if (idx < 0) {
    throw std::invalid_argument(
        "invalid-dimensions: bitstring is not representable in this basis");
  }
  EnsembleState state;
  state.basis = std::move(basis);
  state.amplitudes = Eigen::VectorXcd::Zero(
      static_cast<Eigen::Index>(state.basis->size()));
  state.amplitudes[idx] = Complex(1.0, 0.0);
  return state;
}

RegisterDistribution register_distribution(const EnsembleState& state) {
  RegisterDistribution dist;
  double register_total = 0.0;
  const FockBasis& basis = *state.basis;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
    if (!basis.is_register_state(i)) continue;
    double p = std::norm(state.amplitudes[i]);
    if (p > 0.0) dist.probabilities[basis.bitstring_of(i)] = p;
    register_total += p;
  }
  dist.leakage = 1.0 - register_total;
  return dist;
}

double fidelity(const EnsembleState& a, const EnsembleState& b) {
  if (a.basis != b.basis) {
    // Distinct basis objects with identical content still count as a match.
    if (!a.basis || !b.basis ||
        a.basis->atom_count() != b.basis->atom_count() ||
        a.basis->qubit_count() != b.basis->qubit_count() ||
        a.basis->size() != b.basis->size()) {
      throw std::invalid_argument("basis-mismatch: states live on different bases");
    }
  }
  Complex overlap = a.amplitudes.dot(b.amplitudes);
  return std::norm(overlap);
}

}  // namespace rydreg
