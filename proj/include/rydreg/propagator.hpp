#pragma once

#include "rydreg/fock_basis.hpp"
#include "rydreg/hamiltonian.hpp"

namespace rydreg {

// Controls for evolve(). Pulse Hamiltonians decompose into small invariant
// blocks (states connected by the pulse's transitions); blocks up to
// max_dense_block are propagated by a dense matrix exponential, which is
// exact to machine precision. Larger systems (crosstalk co-simulation) fall
// back to an adaptive embedded Runge-Kutta integrator with the given local
// tolerances.
struct EvolveOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_dense_block = 512;
  bool force_integrator = false;
};

// state <- exp(-i H t) state for a piecewise-constant pulse Hamiltonian.
// With decay included in H the norm decreases monotonically. Throws
// "integrator-failure" if the step size underflows.
EnsembleState evolve(const EnsembleState& state, const SparseOperator& h,
                     double duration, const EvolveOptions& options = {});

}  // namespace rydreg
