#include "rydreg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rydreg {

double RunConfig::gamma() const {
  if (decay_mode == "off") return 0.0;
  if (decay_mode == "auto") {
    return rydberg_linewidth(rydberg_n, lifetime_ref_us, lifetime_ref_n);
  }
  return gamma_explicit;
}

BlockadeModel RunConfig::blockade() const {
  if (blockade_mode == "fixed") {
    return BlockadeModel::fixed_shift(u_fixed, blockade_sign);
  }
  return BlockadeModel::forster(forster.c3, forster.delta, pair_distance_um,
                                blockade_sign);
}

LevelScheme RunConfig::scheme() const {
  if (level_scheme_file) {
    return load_level_scheme(*level_scheme_file, bias_field_gauss, rydberg_n);
  }
  return LevelScheme::cesium(true, bias_field_gauss, rydberg_n);
}

void RunConfig::validate() const {
  if (atom_count < 2) {
    throw std::invalid_argument("invalid-dimensions: atom count must be >= 2");
  }
  if (rabi <= 0.0) {
    throw std::invalid_argument("invalid-dimensions: Rabi frequency must be > 0");
  }
  if (blockade_mode != "fixed" && blockade_mode != "forster") {
    throw std::invalid_argument("unknown-parameter: blockade mode '" +
                                blockade_mode + "'");
  }
  if (crosstalk != "off" && crosstalk != "bound" && crosstalk != "cosim") {
    throw std::invalid_argument("unknown-parameter: crosstalk mode '" +
                                crosstalk + "'");
  }
  if (decay_mode != "off" && decay_mode != "auto" && decay_mode != "explicit") {
    throw std::invalid_argument("unknown-parameter: decay mode '" + decay_mode +
                                "'");
  }
  if (readout_flip_probability < 0.0 || readout_flip_probability > 1.0) {
    throw std::invalid_argument(
        "invalid-dimensions: readout flip probability outside [0, 1]");
  }
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("unknown-parameter: bad numeric value for '" +
                                key + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("unknown-parameter: bad numeric value for '" +
                                key + "'");
  }
  return parsed;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("unknown-parameter: bad integer value for '" +
                                key + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("unknown-parameter: bad integer value for '" +
                                key + "'");
  }
  return parsed;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  std::size_t end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig base) {
  RunConfig config = std::move(base);
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("syntax-error (line " +
                                  std::to_string(line_number) +
                                  "): expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));

    if (key == "atoms") {
      config.atom_count = parse_int(key, value);
    } else if (key == "rabi_mhz") {
      config.rabi = angular_from_mhz(parse_double(key, value));
    } else if (key == "blockade") {
      config.blockade_mode = value;
    } else if (key == "u_fixed_mhz") {
      config.u_fixed = angular_from_mhz(parse_double(key, value));
    } else if (key == "blockade_sign") {
      config.blockade_sign = parse_int(key, value) >= 0 ? +1 : -1;
    } else if (key == "c3_ghz_um3") {
      config.forster.c3 = angular_from_ghz(parse_double(key, value));
    } else if (key == "delta_mhz") {
      config.forster.delta = angular_from_mhz(parse_double(key, value));
    } else if (key == "anisotropy") {
      config.forster.anisotropy_fraction = parse_double(key, value);
    } else if (key == "pair_distance_um") {
      config.pair_distance_um = parse_double(key, value);
    } else if (key == "b_field_gauss") {
      config.bias_field_gauss = parse_double(key, value);
    } else if (key == "rydberg_n") {
      config.rydberg_n = static_cast<int>(parse_int(key, value));
    } else if (key == "decay") {
      if (value == "off" || value == "auto") {
        config.decay_mode = value;
      } else {
        config.decay_mode = "explicit";
        config.gamma_explicit = parse_double(key, value);
      }
    } else if (key == "lifetime_ref_us") {
      config.lifetime_ref_us = parse_double(key, value);
    } else if (key == "lifetime_ref_n") {
      config.lifetime_ref_n = static_cast<int>(parse_int(key, value));
    } else if (key == "register_cap") {
      config.caps.register_cap = static_cast<int>(parse_int(key, value));
    } else if (key == "rydberg_cap") {
      config.caps.rydberg_cap = static_cast<int>(parse_int(key, value));
    } else if (key == "aux_rydberg_cap") {
      config.caps.aux_rydberg_cap = static_cast<int>(parse_int(key, value));
    } else if (key == "reference_occupancy") {
      config.calibration.reference_occupancy =
          value == "auto" ? 0 : parse_int(key, value);
    } else if (key == "composite") {
      if (value == "none") {
        config.calibration.composite = CalibrationPolicy::CompositeMode::none;
      } else if (value == "bb1") {
        config.calibration.composite =
            CalibrationPolicy::CompositeMode::amplitude_robust;
      } else {
        throw std::invalid_argument("unknown-parameter: composite mode '" +
                                    value + "'");
      }
    } else if (key == "crosstalk") {
      config.crosstalk = value;
    } else if (key == "integrator_rel_tol") {
      config.evolve.rel_tol = parse_double(key, value);
    } else if (key == "integrator_abs_tol") {
      config.evolve.abs_tol = parse_double(key, value);
    } else if (key == "max_dense_block") {
      config.evolve.max_dense_block = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "readout_flip_probability") {
      config.readout_flip_probability = parse_double(key, value);
    } else if (key == "level_scheme_file") {
      config.level_scheme_file = value;
    } else {
      throw std::invalid_argument("unknown-parameter: '" + key + "'");
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace rydreg
