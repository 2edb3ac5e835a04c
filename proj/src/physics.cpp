#include "rydreg/physics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "rydreg/hamiltonian.hpp"
#include "rydreg/random.hpp"

namespace rydreg {

ForsterParams ForsterParams::cesium_defaults() {
  static const ForsterParams fitted = fit_forster_params(
      {{3.0, angular_from_mhz(1000.0)}, {5.0, angular_from_mhz(80.0)}});
  return fitted;
}

ForsterParams ForsterParams::scaled_to_n(int n, int n_ref) const {
  if (n < 10 || n_ref < 10) {
    throw std::invalid_argument("invalid-n: principal quantum number must be >= 10");
  }
  ForsterParams scaled = *this;
  double ratio = static_cast<double>(n) / static_cast<double>(n_ref);
  scaled.c3 = c3 * ratio * ratio * ratio * ratio;
  return scaled;
}

std::vector<std::pair<double, double>> forster_curve(
    const ForsterParams& params, const std::vector<double>& r_grid_um) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(r_grid_um.size());
  for (double r : r_grid_um) {
    curve.emplace_back(r, forster_shift(params.c3, params.delta, r));
  }
  return curve;
}

ForsterParams fit_forster_params(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("degenerate-points: at least two (r, U) points required");
  }
  for (auto [r, u] : points) {
    if (r <= 0.0) {
      throw std::invalid_argument("nonpositive-distance: sample point with r <= 0");
    }
    if (u <= 0.0) {
      throw std::invalid_argument("infeasible-fit: sample point with U <= 0");
    }
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].first == points[j].first &&
          points[i].second != points[j].second) {
        throw std::invalid_argument(
            "degenerate-points: equal distances with different shifts");
      }
    }
  }
  bool distinct = false;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first != points[0].first) distinct = true;
  }
  if (!distinct) {
    throw std::invalid_argument("degenerate-points: all sample distances equal");
  }

  // Rows of U_i * delta - (4/3) r_i^-6 * X = -U_i^2 with X = c3^2.
  const Eigen::Index rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(rows, 2);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double r = points[i].first;
    double u = points[i].second;
    double r6 = std::pow(r, 6);
    a(i, 0) = u;
    a(i, 1) = -(4.0 / 3.0) / r6;
    b(i) = -u * u;
  }
  Eigen::Vector2d solution = a.colPivHouseholderQr().solve(b);
  double delta = solution[0];
  double c3_squared = solution[1];
  // A defect that is zero up to roundoff comes out slightly negative.
  double delta_scale = 0.0;
  for (auto [r, u] : points) delta_scale = std::max(delta_scale, u);
  if (delta < 0.0 && delta > -1e-9 * delta_scale) delta = 0.0;
  if (c3_squared <= 0.0 || delta < 0.0) {
    throw std::invalid_argument(
        "infeasible-fit: points are inconsistent with a positive (c3, delta)");
  }
  ForsterParams params;
  params.c3 = std::sqrt(c3_squared);
  params.delta = delta;
  return params;
}

namespace {

// m_j assignment of the targeted Rydberg state: within f = 4 the sign of m
// decides (m = 0 goes up), within f = 3 likewise but with m = 0 going down.
// Together with the linear Zeeman shifts this leaves exactly the stretched
// pair degenerate and all other transitions separated by >= mu_B B / 4.
int assigned_mj_doubled(int f, int m) {
  if (f == 4) return m >= 0 ? +1 : -1;
  return m > 0 ? +1 : -1;
}

// Transition shift (g_j m_j - g_f m) mu_B B in quarters of mu_B B, with
// g_j m_j = +-1 and g_f = +1/4 for f=4, -1/4 for f=3.
int shift_quarters_for(int f, int m, int mj_doubled) {
  int rydberg_quarters = 4 * mj_doubled;  // mj_doubled is +-1
  int ground_quarters = (f == 4 ? m : -m);
  return rydberg_quarters - ground_quarters;
}

}  // namespace

LevelScheme LevelScheme::cesium(bool exclude_stretched, double bias_field_gauss,
                                int rydberg_n) {
  LevelScheme scheme;
  scheme.bias_field_gauss = bias_field_gauss;
  scheme.rydberg_n = rydberg_n;

  auto add = [&](int index, int f, int m, bool excluded) {
    ZeemanEntry e;
    e.register_index = excluded ? -1 : index;
    e.f = f;
    e.m = m;
    e.excluded = excluded;
    e.mj_doubled = assigned_mj_doubled(f, m);
    e.shift_quarters = shift_quarters_for(f, m, e.mj_doubled);
    scheme.entries.push_back(e);
  };

  // Reservoir in the field-insensitive f=4, m=0 state; qubits 1..7 walk the
  // f=4 manifold from m=+4 down (skipping m=0 and the excluded m=-4), qubits
  // 8..14 walk f=3 from m=+3 down.
  add(0, 4, 0, false);
  int index = 1;
  for (int m = 4; m >= -4; --m) {
    if (m == 0) continue;
    bool excluded = exclude_stretched && m == -4;
    add(excluded ? -1 : index, 4, m, excluded);
    if (!excluded) ++index;
  }
  for (int m = 3; m >= -3; --m) {
    add(index++, 3, m, false);
  }
  return scheme;
}

int LevelScheme::usable_count() const {
  int count = 0;
  for (const ZeemanEntry& e : entries) {
    if (!e.excluded) ++count;
  }
  return count;
}

double LevelScheme::quarter_unit() const {
  return angular_from_mhz(kBohrMagnetonMHzPerGauss * bias_field_gauss / 4.0);
}

double LevelScheme::transition_shift(const ZeemanEntry& entry) const {
  return entry.shift_quarters * quarter_unit();
}

const ZeemanEntry* LevelScheme::entry_for_register(int register_index) const {
  for (const ZeemanEntry& e : entries) {
    if (!e.excluded && e.register_index == register_index) return &e;
  }
  return nullptr;
}

ZeemanSelectivity zeeman_selectivity(const LevelScheme& scheme, double rabi) {
  if (scheme.bias_field_gauss <= 0.0) {
    throw std::invalid_argument("nonpositive-field: bias field must be > 0");
  }
  ZeemanSelectivity report;
  int best_quarters = -1;
  for (std::size_t i = 0; i < scheme.entries.size(); ++i) {
    if (scheme.entries[i].excluded) continue;
    for (std::size_t j = i + 1; j < scheme.entries.size(); ++j) {
      if (scheme.entries[j].excluded) continue;
      int gap = std::abs(scheme.entries[i].shift_quarters -
                         scheme.entries[j].shift_quarters);
      if (best_quarters < 0 || gap < best_quarters) best_quarters = gap;
    }
  }
  if (best_quarters < 0) best_quarters = 0;
  report.min_separation = best_quarters * scheme.quarter_unit();

  if (rabi == 0.0) {
    report.worst_case_probability = 0.0;
  } else {
    double d2 = report.min_separation * report.min_separation;
    report.worst_case_probability = rabi * rabi / (rabi * rabi + d2);
  }
  report.time_averaged_probability = 0.5 * report.worst_case_probability;
  return report;
}

std::vector<std::pair<int, int>> degenerate_transition_check(
    const LevelScheme& scheme) {
  std::vector<std::pair<int, int>> pairs;
  const bool zero_field = scheme.bias_field_gauss == 0.0;
  for (std::size_t i = 0; i < scheme.entries.size(); ++i) {
    if (scheme.entries[i].excluded) continue;
    for (std::size_t j = i + 1; j < scheme.entries.size(); ++j) {
      if (scheme.entries[j].excluded) continue;
      if (zero_field || scheme.entries[i].shift_quarters ==
                            scheme.entries[j].shift_quarters) {
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return pairs;
}

void save_level_scheme(const LevelScheme& scheme, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open level scheme file for writing: " + path);
  }
  out << "# Ground-state Zeeman register map.\n"
         "# Columns: register index (-1 = excluded), hyperfine f, magnetic m,\n"
         "# excluded flag (0/1). Index 0 is the reservoir.\n";
  for (const ZeemanEntry& e : scheme.entries) {
    out << e.register_index << " " << e.f << " " << e.m << " "
        << (e.excluded ? 1 : 0) << "\n";
  }
}

LevelScheme load_level_scheme(const std::string& path, double bias_field_gauss,
                              int rydberg_n) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open level scheme file: " + path);
  }
  LevelScheme scheme;
  scheme.bias_field_gauss = bias_field_gauss;
  scheme.rydberg_n = rydberg_n;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    ZeemanEntry e;
    int excluded = 0;
    if (!(ss >> e.register_index >> e.f >> e.m >> excluded)) {
      throw std::runtime_error("level scheme parse error at line " +
                               std::to_string(line_number));
    }
    e.excluded = excluded != 0;
    e.mj_doubled = assigned_mj_doubled(e.f, e.m);
    e.shift_quarters = shift_quarters_for(e.f, e.m, e.mj_doubled);
    scheme.entries.push_back(e);
  }
  return scheme;
}

double rydberg_linewidth(int n, double tau_ref_us, int n_ref) {
  if (n < 10 || n_ref < 10) {
    throw std::invalid_argument("invalid-n: principal quantum number must be >= 10");
  }
  if (tau_ref_us <= 0.0) {
    throw std::invalid_argument("invalid-n: reference lifetime must be > 0");
  }
  double ratio = static_cast<double>(n) / static_cast<double>(n_ref);
  double tau = tau_ref_us * ratio * ratio * ratio;
  return 1.0 / tau;
}

namespace {

std::array<double, 3> sample_position(const TrapGeometry& geometry,
                                      std::mt19937_64& rng, int atom) {
  const double s = geometry.scale_um;
  switch (geometry.shape) {
    case TrapGeometry::Shape::box:
      return {uniform(rng, 0.0, s), uniform(rng, 0.0, s), uniform(rng, 0.0, s)};
    case TrapGeometry::Shape::sphere: {
      const double radius = 0.5 * s;
      while (true) {
        double x = uniform(rng, -radius, radius);
        double y = uniform(rng, -radius, radius);
        double z = uniform(rng, -radius, radius);
        if (x * x + y * y + z * z <= radius * radius) return {x, y, z};
      }
    }
    case TrapGeometry::Shape::gaussian_cloud: {
      const double sigma = s / 4.0;
      return {sigma * standard_normal(rng), sigma * standard_normal(rng),
              sigma * standard_normal(rng)};
    }
    case TrapGeometry::Shape::pinned_pair:
      return {atom == 0 ? 0.0 : s, 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

}  // namespace

BlockadeStatistics blockade_statistics(const TrapGeometry& geometry,
                                       const ForsterParams& params,
                                       int samples, std::uint64_t seed) {
  if (geometry.atom_count < 2) {
    throw std::invalid_argument("invalid-dimensions: need at least two atoms");
  }
  if (samples < 1) {
    throw std::invalid_argument("invalid-dimensions: need at least one sample");
  }
  if (geometry.scale_um <= 0.0) {
    throw std::invalid_argument("nonpositive-distance: trap scale must be > 0");
  }
  if (geometry.shape == TrapGeometry::Shape::pinned_pair &&
      geometry.atom_count != 2) {
    throw std::invalid_argument(
        "invalid-dimensions: pinned-pair geometry requires exactly two atoms");
  }

  const double a = params.anisotropy_fraction;
  BlockadeStatistics stats;
  stats.u_min.reserve(samples);
  for (int sample = 0; sample < samples; ++sample) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(sample)));
    std::vector<std::array<double, 3>> positions(geometry.atom_count);
    for (int atom = 0; atom < geometry.atom_count; ++atom) {
      positions[atom] = sample_position(geometry, rng, atom);
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < geometry.atom_count; ++i) {
      for (int j = i + 1; j < geometry.atom_count; ++j) {
        double dx = positions[i][0] - positions[j][0];
        double dy = positions[i][1] - positions[j][1];
        double dz = positions[i][2] - positions[j][2];
        double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        double factor = uniform(rng, 1.0 - a, 1.0 + a);
        double u = factor * forster_shift(params.c3, params.delta, r);
        worst = std::min(worst, u);
      }
    }
    stats.u_min.push_back(worst);
  }
  return stats;
}

double BlockadeStatistics::median() const {
  std::vector<double> sorted = u_min;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? sorted[n / 2]
                    : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double BlockadeStatistics::minimum() const {
  return *std::min_element(u_min.begin(), u_min.end());
}

double BlockadeStatistics::maximum() const {
  return *std::max_element(u_min.begin(), u_min.end());
}

}  // namespace rydreg
