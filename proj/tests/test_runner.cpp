#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "rydreg/circuit.hpp"
#include "rydreg/config.hpp"
#include "rydreg/random.hpp"
#include "rydreg/runner.hpp"

using namespace rydreg;

namespace {

// Every imperfection turned off: huge ensemble (no coupling spread), strong
// blockade, no decay, enormous Zeeman splitting.
RunConfig ideal_config() {
  RunConfig config;
  config.atom_count = 1000000;
  config.blockade_mode = "fixed";
  config.u_fixed = 1e8 * config.rabi;
  config.decay_mode = "off";
  config.bias_field_gauss = 1e6;
  return config;
}

const char* kBellCircuit =
    "qubits 2\n"
    "ROT 1 1.5707963267948966 0\n"
    "CNOT 1 2\n"
    "measure\n";

}  // namespace

TEST_CASE("circuit parsing") {
  SUBCASE("well-formed program") {
    Circuit c = parse_circuit(
        "qubits 2\nROT 1 3.14159265 0\nCZ 1 2\nmeasure\n");
    CHECK(c.qubit_count == 2);
    REQUIRE(c.ops.size() == 2);
    CHECK(c.ops[0].kind == GateOp::Kind::rot);
    CHECK(c.ops[0].target == 1);
    CHECK(c.ops[0].angle == doctest::Approx(3.14159265));
    CHECK(c.ops[1].kind == GateOp::Kind::cz);
    CHECK(c.measure);
  }
  SUBCASE("comments and blank lines are skipped") {
    Circuit c = parse_circuit("# preamble\nqubits 1\n\n# body\nRZ 1 0.5\n");
    CHECK(c.ops.size() == 1);
    CHECK_FALSE(c.measure);
  }
  SUBCASE("identical indices carry the line number") {
    CHECK_THROWS_WITH_AS(parse_circuit("qubits 2\nCZ 1 1\n"),
                         doctest::Contains("identical-indices (line 2)"),
                         std::invalid_argument);
  }
  SUBCASE("missing header") {
    CHECK_THROWS_WITH_AS(parse_circuit("ROT 1 1.0 0\n"),
                         doctest::Contains("missing-header"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_circuit(""), doctest::Contains("missing-header"),
                         std::invalid_argument);
  }
  SUBCASE("index range and syntax diagnostics") {
    CHECK_THROWS_WITH_AS(parse_circuit("qubits 2\nROT 3 1.0 0\n"),
                         doctest::Contains("index-out-of-range (line 2)"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_circuit("qubits 2\nROT 1 abc 0\n"),
                         doctest::Contains("syntax-error (line 2)"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_circuit("qubits 2\nHADAMARD 1\n"),
                         doctest::Contains("syntax-error"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_circuit("qubits 2\nmeasure\nROT 1 1.0 0\n"),
                         doctest::Contains("syntax-error (line 3)"),
                         std::invalid_argument);
  }
  SUBCASE("format and reparse reproduce the structure") {
    Circuit c = parse_circuit(
        "qubits 3\nROT 2 0.25 1.5\nRZ 3 2.75\nCZ 1 3\nCNOT 3 2\nmeasure\n");
    Circuit round = parse_circuit(format_circuit(c));
    CHECK(round.qubit_count == c.qubit_count);
    CHECK(round.measure == c.measure);
    REQUIRE(round.ops.size() == c.ops.size());
    for (std::size_t k = 0; k < c.ops.size(); ++k) {
      CHECK(round.ops[k].kind == c.ops[k].kind);
      CHECK(round.ops[k].target == c.ops[k].target);
      CHECK(round.ops[k].target2 == c.ops[k].target2);
      CHECK(round.ops[k].angle == c.ops[k].angle);
      CHECK(round.ops[k].axis_phase == c.ops[k].axis_phase);
    }
  }
  SUBCASE("round trip holds for generated circuits") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 40; ++trial) {
      Circuit c;
      c.qubit_count = 2 + int(rng() % 8);
      int gates = int(rng() % 12);
      for (int g = 0; g < gates; ++g) {
        int a = 1 + int(rng() % c.qubit_count);
        int b = 1 + int(rng() % c.qubit_count);
        if (b == a) b = a % c.qubit_count + 1;
        double angle = uniform(rng, -8.0, 8.0);
        double phase = uniform(rng, -4.0, 4.0);
        switch (rng() % 4) {
          case 0: c.ops.push_back(GateOp::rot(a, angle, phase)); break;
          case 1: c.ops.push_back(GateOp::rz(a, angle)); break;
          case 2: c.ops.push_back(GateOp::cz(a, b)); break;
          default: c.ops.push_back(GateOp::cnot(a, b)); break;
        }
      }
      c.measure = rng() % 2 == 0;
      Circuit round = parse_circuit(format_circuit(c));
      CHECK(format_circuit(round) == format_circuit(c));
      REQUIRE(round.ops.size() == c.ops.size());
      bool equal = round.qubit_count == c.qubit_count &&
                   round.measure == c.measure;
      for (std::size_t k = 0; k < c.ops.size(); ++k) {
        equal = equal && round.ops[k].kind == c.ops[k].kind &&
                round.ops[k].target == c.ops[k].target &&
                round.ops[k].target2 == c.ops[k].target2 &&
                round.ops[k].angle == c.ops[k].angle &&
                round.ops[k].axis_phase == c.ops[k].axis_phase;
      }
      CHECK(equal);
    }
  }
}

TEST_CASE("config parsing") {
  SUBCASE("defaults are the cesium scenario") {
    RunConfig config;
    CHECK(config.atom_count == 100);
    CHECK(mhz_from_angular(config.rabi) == doctest::Approx(1.0));
    CHECK(config.bias_field_gauss == 15.0);
    CHECK(config.rydberg_n == 70);
    CHECK(mhz_from_angular(blockade_shift(config.blockade())) ==
          doctest::Approx(80.0).epsilon(1e-9));
  }
  SUBCASE("file values override defaults") {
    RunConfig config = parse_config(
        "# test\natoms = 42\nrabi_mhz = 2.5\nblockade = fixed\n"
        "u_fixed_mhz = 500\ndecay = off\ncomposite = bb1\nseed = 99\n");
    CHECK(config.atom_count == 42);
    CHECK(mhz_from_angular(config.rabi) == doctest::Approx(2.5));
    CHECK(config.blockade_mode == "fixed");
    CHECK(mhz_from_angular(config.u_fixed) == doctest::Approx(500.0));
    CHECK(config.gamma() == 0.0);
    CHECK(config.calibration.composite ==
          CalibrationPolicy::CompositeMode::amplitude_robust);
    CHECK(config.seed == 99);
  }
  SUBCASE("lifetime scaling feeds the decay rate") {
    RunConfig config = parse_config("rydberg_n = 140\nlifetime_ref_us = 150\n");
    CHECK(config.gamma() == doctest::Approx(1.0 / (8.0 * 150.0)));
  }
  SUBCASE("a level scheme file can replace the built-in map") {
    const std::string path = "config_scheme_tmp.txt";
    save_level_scheme(LevelScheme::cesium(), path);
    RunConfig config = parse_config("level_scheme_file = " + path + "\n");
    LevelScheme loaded = config.scheme();
    CHECK(loaded.entries.size() == 16);
    CHECK(loaded.usable_count() == 15);
    std::remove(path.c_str());
  }
  SUBCASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("no_such_key = 1\n"),
                         doctest::Contains("unknown-parameter"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("atoms = twelve\n"),
                         doctest::Contains("unknown-parameter"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("atoms\n"),
                         doctest::Contains("syntax-error"),
                         std::invalid_argument);
  }
}

TEST_CASE("run_circuit basics") {
  SUBCASE("pi rotation moves 00 to 10") {
    Circuit c = parse_circuit("qubits 2\nROT 1 3.141592653589793 0\n");
    RunReport report = run_circuit(c, ideal_config(), "00");
    CHECK(report.distribution.probabilities.at("10") ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report.gates.size() == 1);
    CHECK(report.gates[0].fidelity_vs_ideal >= 1.0 - 1e-6);
  }
  SUBCASE("Bell circuit from 00") {
    Circuit c = parse_circuit(kBellCircuit);
    RunReport report = run_circuit(c, ideal_config(), "00");
    CHECK(report.distribution.probabilities.at("00") ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(report.distribution.probabilities.at("11") ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(report.distribution.leakage <= 1e-8);
  }
  SUBCASE("empty circuit is the identity") {
    Circuit c = parse_circuit("qubits 4\n");
    RunReport report = run_circuit(c, ideal_config(), "0110");
    CHECK(report.distribution.probabilities.at("0110") ==
          doctest::Approx(1.0));
    CHECK(report.gates.empty());
  }
  SUBCASE("probability closure under realistic imperfections") {
    RunConfig config;  // cesium defaults: finite blockade and decay
    Circuit c = parse_circuit(kBellCircuit);
    RunReport report = run_circuit(c, config, "00");
    double total = report.distribution.leakage;
    for (const auto& [bits, p] : report.distribution.probabilities) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(report.distribution.leakage > 0.0);
  }
  SUBCASE("initial bitstring validation") {
    Circuit c = parse_circuit("qubits 2\n");
    CHECK_THROWS_WITH_AS(run_circuit(c, ideal_config(), "011"),
                         doctest::Contains("length-mismatch"),
                         std::invalid_argument);
  }
  SUBCASE("ensemble must outnumber the register") {
    Circuit c = parse_circuit("qubits 4\n");
    RunConfig small = ideal_config();
    small.atom_count = 4;
    CHECK_THROWS_WITH_AS(run_circuit(c, small, "0000"),
                         doctest::Contains("invalid-dimensions"),
                         std::invalid_argument);
  }
}

TEST_CASE("error budget attribution") {
  Circuit rot = parse_circuit("qubits 2\nROT 1 3.141592653589793 0\n");
  Circuit cz = parse_circuit("qubits 2\nCZ 1 2\n");
  const double threshold = 1e-8;

  SUBCASE("all components quiet at ideal parameters") {
    RunReport report = run_circuit(rot, ideal_config(), "00");
    CHECK(report.budget.blockade_leakage <= threshold);
    CHECK(report.budget.decay_loss <= threshold);
    CHECK(report.budget.inhomogeneity_infidelity <= threshold);
    CHECK(report.budget.zeeman_crosstalk_bound <= threshold);
  }
  SUBCASE("weak blockade raises only the blockade component") {
    RunConfig config = ideal_config();
    config.u_fixed = 50.5 * config.rabi;
    RunReport report = run_circuit(cz, config, "11");
    CHECK(report.budget.blockade_leakage > threshold);
    CHECK(report.budget.decay_loss <= threshold);
    CHECK(report.budget.inhomogeneity_infidelity <= threshold);
    CHECK(report.budget.zeeman_crosstalk_bound <= threshold);
  }
  SUBCASE("decay raises only the decay component") {
    RunConfig config = ideal_config();
    config.decay_mode = "explicit";
    config.gamma_explicit = 0.02;
    RunReport report = run_circuit(rot, config, "00");
    CHECK(report.budget.decay_loss > threshold);
    CHECK(report.budget.blockade_leakage <= threshold);
    CHECK(report.budget.inhomogeneity_infidelity <= threshold);
    CHECK(report.budget.zeeman_crosstalk_bound <= threshold);
  }
  SUBCASE("small ensembles raise only the inhomogeneity component") {
    RunConfig config = ideal_config();
    config.atom_count = 8;
    RunReport report = run_circuit(rot, config, "00");
    CHECK(report.budget.inhomogeneity_infidelity > threshold);
    CHECK(report.budget.blockade_leakage <= threshold);
    CHECK(report.budget.decay_loss <= threshold);
    CHECK(report.budget.zeeman_crosstalk_bound <= threshold);
  }
  SUBCASE("a realistic bias field raises only the Zeeman bound") {
    RunConfig config = ideal_config();
    config.bias_field_gauss = 15.0;
    RunReport report = run_circuit(rot, config, "00");
    CHECK(report.budget.zeeman_crosstalk_bound > threshold);
    CHECK(report.budget.blockade_leakage <= threshold);
    CHECK(report.budget.decay_loss <= threshold);
    CHECK(report.budget.inhomogeneity_infidelity <= threshold);
  }
}

TEST_CASE("crosstalk co-simulation") {
  Circuit rot = parse_circuit("qubits 2\nROT 1 3.141592653589793 0\n");
  RunConfig off = ideal_config();
  off.bias_field_gauss = 15.0;
  off.crosstalk = "off";
  RunConfig cosim = off;
  cosim.crosstalk = "cosim";

  RunReport clean = run_circuit(rot, off, "01");
  RunReport coupled = run_circuit(rot, cosim, "01");
  // With the neighbour level populated, off-resonant driving costs fidelity.
  CHECK(coupled.gates[0].fidelity_vs_ideal <
        clean.gates[0].fidelity_vs_ideal - 1e-6);
  double total = coupled.distribution.leakage;
  for (const auto& [bits, p] : coupled.distribution.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("measurement sampling") {
  Circuit c = parse_circuit(kBellCircuit);
  RunConfig config = ideal_config();
  config.seed = 2024;

  RunReport a = run_circuit(c, config, "00", 200);
  RunReport b = run_circuit(c, config, "00", 200);
  REQUIRE(a.sample_counts.size() > 0);
  CHECK(a.sample_counts == b.sample_counts);
  int total = 0;
  for (const auto& [bits, count] : a.sample_counts) {
    total += count;
    CHECK((bits == "00" || bits == "11"));
  }
  CHECK(total == 200);

  SUBCASE("different seeds shuffle the outcomes") {
    RunConfig other = config;
    other.seed = 2025;
    RunReport d = run_circuit(c, other, "00", 200);
    CHECK(d.sample_counts != a.sample_counts);
  }
  SUBCASE("readout flip stub") {
    RunConfig flipped = config;
    flipped.readout_flip_probability = 1.0;
    Circuit rot = parse_circuit("qubits 1\nROT 1 3.141592653589793 0\nmeasure\n");
    RunReport report = run_circuit(rot, flipped, "0", 50);
    CHECK(report.sample_counts.at("0") == 50);  // true outcome is 1
  }
}

TEST_CASE("parameter sweeps") {
  Circuit cz = parse_circuit("qubits 2\nCZ 1 2\n");
  RunConfig config = ideal_config();

  SUBCASE("U axis shows the quadratic blockade scaling") {
    std::vector<double> grid{30.0, 100.0, 300.0, 1000.0};
    std::vector<SweepRow> rows = sweep("U", grid, cz, config);
    REQUIRE(rows.size() == 4);
    std::vector<double> log_u, log_eps;
    for (const SweepRow& row : rows) {
      log_u.push_back(std::log(row.value));
      log_eps.push_back(std::log(1.0 - row.average_fidelity));
    }
    double n = double(grid.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      sx += log_u[k];
      sy += log_eps[k];
      sxx += log_u[k] * log_u[k];
      sxy += log_u[k] * log_eps[k];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
  }
  SUBCASE("K axis shows shrinking coupling spread") {
    Circuit rot = parse_circuit("qubits 4\nROT 1 3.141592653589793 0\n");
    std::vector<SweepRow> rows = sweep("K", {8.0, 20.0, 80.0}, rot, config);
    CHECK(rows[0].worst_fidelity < rows[1].worst_fidelity);
    CHECK(rows[1].worst_fidelity < rows[2].worst_fidelity);
  }
  SUBCASE("singleton grid gives a single row") {
    std::vector<SweepRow> rows = sweep("omega", {1.0}, cz, config);
    CHECK(rows.size() == 1);
  }
  SUBCASE("n axis rescales interaction and lifetime together") {
    RunConfig realistic;  // forster blockade at 5 um, lifetime scaling on
    std::vector<SweepRow> rows = sweep("n", {70.0, 140.0}, cz, realistic);
    REQUIRE(rows.size() == 2);
    // Higher n: 16x interaction anchor and 8x lifetime, so both blockade
    // leakage and decay shrink.
    CHECK(rows[1].average_fidelity > rows[0].average_fidelity);
    CHECK(rows[1].leakage < rows[0].leakage);
  }
  SUBCASE("unknown axis and empty grid are rejected") {
    CHECK_THROWS_WITH_AS(sweep("tau", {1.0}, cz, config),
                         doctest::Contains("unknown-parameter"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(sweep("U", {}, cz, config),
                         doctest::Contains("invalid-dimensions"),
                         std::invalid_argument);
  }
}

TEST_CASE("a 14-qubit register runs end to end") {
  RunConfig config = ideal_config();
  config.atom_count = 100;
  // Calibrate for the all-spectators-idle branch this run exercises; the
  // auto midpoint would cost the usual few-permille branch spread.
  config.calibration.reference_occupancy = 100;
  Circuit c = parse_circuit(
      "qubits 14\nROT 7 3.141592653589793 0\nCZ 7 8\nmeasure\n");
  RunReport report = run_circuit(c, config, std::string(14, '0'), 20);
  CHECK(report.basis_size == 98304);  // 2^14 register patterns x 3 x 2
  std::string expected(14, '0');
  expected[6] = '1';
  CHECK(report.distribution.probabilities.at(expected) ==
        doctest::Approx(1.0).epsilon(1e-4));
  double total = report.distribution.leakage;
  for (const auto& [bits, p] : report.distribution.probabilities) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(report.sample_counts.at(expected) == 20);
}

TEST_CASE("rendered outputs are deterministic") {
  Circuit c = parse_circuit(kBellCircuit);
  RunConfig config = ideal_config();

  SUBCASE("reports") {
    RunReport a = run_circuit(c, config, "00", 25);
    RunReport b = run_circuit(c, config, "00", 25);
    CHECK(report_kv(a) == report_kv(b));
    CHECK(report_text(a) == report_text(b));
    CHECK(report_kv(a).find("p_00 = ") != std::string::npos);
  }
  SUBCASE("sweep CSV") {
    std::vector<double> grid{50.0, 500.0};
    std::string csv1 = sweep_csv("U", sweep("U", grid, c, config));
    std::string csv2 = sweep_csv("U", sweep("U", grid, c, config));
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("u_mhz,average_fidelity,worst_fidelity,leakage\n", 0) ==
          0);
    CHECK(csv1.find("\r") == std::string::npos);
  }
  SUBCASE("interaction curve CSV") {
    ForsterParams params = ForsterParams::cesium_defaults();
    std::string csv = interaction_curve_csv(params, {3.0, 5.0});
    CHECK(csv.rfind("r_um,u_mhz\n", 0) == 0);
    CHECK(csv.find("\n3,") != std::string::npos);
    CHECK(csv.find("1000") != std::string::npos);
    CHECK(csv.find("\n5,") != std::string::npos);

    std::string descending = interaction_curve_csv(params, {5.0, 3.0});
    CHECK(descending.find("\n5,") < descending.find("\n3,"));
  }
  SUBCASE("Monte-Carlo CSV") {
    TrapGeometry geometry;
    geometry.atom_count = 25;
    ForsterParams params = ForsterParams::cesium_defaults();
    std::string csv1 = blockade_mc_csv(blockade_statistics(geometry, params, 4, 5));
    std::string csv2 = blockade_mc_csv(blockade_statistics(geometry, params, 4, 5));
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("sample,u_min_mhz\n", 0) == 0);
  }
  SUBCASE("zeeman report") {
    std::string text = zeeman_report_text(LevelScheme::cesium(),
                                          angular_from_mhz(1.0));
    CHECK(text.find("usable states: 15") != std::string::npos);
    CHECK(text.find("degenerate transition pairs: 0") != std::string::npos);
  }
}
