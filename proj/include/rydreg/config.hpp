#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rydreg/gates.hpp"
#include "rydreg/hamiltonian.hpp"
#include "rydreg/physics.hpp"

namespace rydreg {

// Full physical and numerical configuration of a simulation run. Defaults
// correspond to the cesium scenario: K = 100 atoms, Omega/2pi = 1 MHz,
// B = 15 G, n = 70, Forster blockade evaluated at a 5 um pair distance.
// Config files are flat key = value text; see data/default.cfg for the key
// reference. All frequencies in files are ordinary (MHz, or GHz um^3 for
// c3) and are converted to angular units on load.
struct RunConfig {
  std::int64_t atom_count = 100;
  double rabi = angular_from_mhz(1.0);

  // Blockade: "fixed" uses u_fixed directly, "forster" evaluates the fitted
  // interaction curve at pair_distance_um.
  std::string blockade_mode = "forster";
  double u_fixed = 0.0;
  int blockade_sign = +1;
  ForsterParams forster = ForsterParams::cesium_defaults();
  double pair_distance_um = 5.0;

  double bias_field_gauss = 15.0;
  int rydberg_n = 70;

  // Decay: "auto" derives gamma = 1/tau(n) from the cubic lifetime scaling,
  // "off" disables it, a number is an explicit gamma in 1/us.
  std::string decay_mode = "auto";
  double gamma_explicit = 0.0;
  double lifetime_ref_us = 150.0;
  int lifetime_ref_n = 70;

  OccupancyCaps caps{1, 2, 0};  // aux cap is raised automatically when needed
  CalibrationPolicy calibration;

  // Crosstalk handling: "off", "bound" (analytic budget entry only) or
  // "cosim" (couple every other register transition in the Hamiltonian).
  std::string crosstalk = "bound";

  EvolveOptions evolve;
  std::uint64_t seed = 1;
  double readout_flip_probability = 0.0;  // applied per bit to drawn samples
  std::optional<std::string> level_scheme_file;

  double gamma() const;
  BlockadeModel blockade() const;
  LevelScheme scheme() const;
  void validate() const;
};

// Parses flat key = value text ('#' starts a comment line). Unknown keys are
// rejected. Values override the defaults in `base`.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

}  // namespace rydreg
