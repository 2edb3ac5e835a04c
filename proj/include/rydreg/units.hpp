#pragma once

#include <cmath>
#include <complex>

// Unit conventions used throughout the library:
//   - frequencies and rates are angular, in rad/us
//   - times are in us
//   - distances are in um
//   - magnetic fields are in gauss
// Public interfaces (config files, CLI) accept ordinary frequencies in MHz
// (or GHz where noted) and convert on entry.

namespace rydreg {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Bohr magneton over Planck constant, MHz per gauss.
inline constexpr double kBohrMagnetonMHzPerGauss = 1.399625;

// Ordinary frequency in MHz -> angular frequency in rad/us.
inline constexpr double angular_from_mhz(double mhz) { return kTwoPi * mhz; }

// Angular frequency in rad/us -> ordinary frequency in MHz.
inline constexpr double mhz_from_angular(double w) { return w / kTwoPi; }

inline constexpr double angular_from_ghz(double ghz) {
  return angular_from_mhz(1e3 * ghz);
}

}  // namespace rydreg
