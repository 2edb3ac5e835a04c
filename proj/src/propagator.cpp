#include "rydreg/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace rydreg {

namespace {

// Union-find over the sparsity pattern; states coupled by the pulse end up in
// one invariant block.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

std::vector<std::vector<int>> invariant_blocks(const SparseOperator& h) {
  DisjointSets sets(static_cast<int>(h.rows()));
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(h, k); it; ++it) {
      if (it.row() != it.col() && it.value() != Complex(0.0, 0.0)) {
        sets.merge(static_cast<int>(it.row()), static_cast<int>(it.col()));
      }
    }
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of(h.rows(), -1);
  for (int i = 0; i < h.rows(); ++i) {
    int root = sets.find(i);
    if (block_of[root] < 0) {
      block_of[root] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[block_of[root]].push_back(i);
  }
  return blocks;
}

void evolve_blocks(const SparseOperator& h, double t, Eigen::VectorXcd& amp,
                   const std::vector<std::vector<int>>& blocks) {
  const Complex minus_i(0.0, -1.0);
  for (const std::vector<int>& block : blocks) {
    const int m = static_cast<int>(block.size());
    if (m == 1) {
      Complex d = h.coeff(block[0], block[0]);
      if (d != Complex(0.0, 0.0)) {
        amp[block[0]] *= std::exp(minus_i * d * t);
      }
      continue;
    }
    Eigen::MatrixXcd sub(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sub(a, b) = h.coeff(block[a], block[b]);
    }
    Eigen::VectorXcd segment(m);
    for (int a = 0; a < m; ++a) segment[a] = amp[block[a]];

    if (sub.isApprox(sub.adjoint(), 0.0)) {
      // Hermitian block: spectral propagator. Unlike scaling-and-squaring
      // this stays unitary to machine precision even for stiff blocks where
      // the blockade diagonal makes |H t| huge.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sub);
      Eigen::VectorXcd phases =
          (minus_i * t * solver.eigenvalues().array()).exp();
      segment = solver.eigenvectors() *
                (phases.array() *
                 (solver.eigenvectors().adjoint() * segment).array())
                    .matrix();
    } else {
      segment = (minus_i * t * sub).exp() * segment;
    }
    for (int a = 0; a < m; ++a) amp[block[a]] = segment[a];
  }
}

// Dormand-Prince 5(4) with PI-free elementary step control.
void evolve_rk(const SparseOperator& h, double t, Eigen::VectorXcd& y,
               double rel_tol, double abs_tol) {
  const Complex minus_i(0.0, -1.0);
  auto rhs = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return minus_i * (h * v);
  };

  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                      e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  // Initial step from the Hamiltonian scale.
  double h_scale = 0.0;
  for (int k = 0; k < h.outerSize(); ++k) {
    double row_sum = 0.0;
    for (SparseOperator::InnerIterator it(h, k); it; ++it) {
      row_sum += std::abs(it.value());
    }
    h_scale = std::max(h_scale, row_sum);
  }
  double step = h_scale > 0.0 ? std::min(t, 0.1 / h_scale) : t;
  const double min_step = t * 1e-15;

  double time = 0.0;
  Eigen::VectorXcd k1 = rhs(y);
  while (t - time > 4.0 * std::numeric_limits<double>::epsilon() * t) {
    step = std::min(step, t - time);
    if (step < min_step) {
      throw std::runtime_error("integrator-failure: step size underflow");
    }
    Eigen::VectorXcd k2 = rhs(y + step * (a21 * k1));
    Eigen::VectorXcd k3 = rhs(y + step * (a31 * k1 + a32 * k2));
    Eigen::VectorXcd k4 = rhs(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXcd k5 =
        rhs(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXcd k6 = rhs(
        y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXcd y5 =
        y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXcd k7 = rhs(y5);
    Eigen::VectorXcd err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                   e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      double scale =
          abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      double ratio = std::abs(err[i]) / scale;
      err_norm += ratio * ratio;
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(y.size()));

    if (err_norm <= 1.0) {
      time += step;
      y.swap(y5);
      k1.swap(k7);  // FSAL
    }
    double factor = err_norm > 0.0
                        ? 0.9 * std::pow(err_norm, -0.2)
                        : 5.0;
    step *= std::clamp(factor, 0.2, 5.0);
  }
}

}  // namespace

EnsembleState evolve(const EnsembleState& state, const SparseOperator& h,
                     double duration, const EvolveOptions& options) {
  if (duration < 0.0) {
    throw std::invalid_argument("invalid-dimensions: negative pulse duration");
  }
  if (h.rows() != state.amplitudes.size() ||
      h.cols() != state.amplitudes.size()) {
    throw std::invalid_argument(
        "basis-mismatch: operator dimension does not match the state");
  }
  EnsembleState result = state;
  if (duration == 0.0) return result;

  if (!options.force_integrator) {
    std::vector<std::vector<int>> blocks = invariant_blocks(h);
    std::size_t largest = 0;
    for (const auto& block : blocks) largest = std::max(largest, block.size());
    if (largest <= static_cast<std::size_t>(options.max_dense_block)) {
      evolve_blocks(h, duration, result.amplitudes, blocks);
      return result;
    }
  }
  evolve_rk(h, duration, result.amplitudes, options.rel_tol, options.abs_tol);
  return result;
}

}  // namespace rydreg
