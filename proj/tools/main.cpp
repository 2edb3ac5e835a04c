#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydreg/circuit.hpp"
#include "rydreg/config.hpp"
#include "rydreg/runner.hpp"
#include "rydreg/units.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grid.push_back(std::stod(item));
  }
  return grid;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string initial;
  int samples = 0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value config file");
    app->add_option("--seed", seed, "random seed override");
    app->add_option("--out", out_path, "output file path");
    app->add_option("--initial", initial, "initial register bitstring");
    app->add_option("--samples", samples, "number of measurement samples");
  }

  rydreg::RunConfig load() const {
    rydreg::RunConfig config;
    if (!config_path.empty()) config = rydreg::load_config(config_path);
    if (seed) config.seed = *seed;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level simulator of a collectively encoded atomic "
               "ensemble register"};
  app.require_subcommand(1);

  CommonOptions common;

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "run a circuit file and print the simulation report");
  std::string circuit_path;
  simulate->add_option("circuit", circuit_path, "circuit file")->required();
  common.attach(simulate);

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "re-run a circuit while sweeping one parameter; emits CSV");
  std::string axis;
  std::string grid_csv;
  std::string sweep_circuit_path;
  sweep_cmd->add_option("axis", axis, "U | K | B | omega | n")->required();
  sweep_cmd->add_option("grid", grid_csv, "comma-separated values")->required();
  sweep_cmd->add_option("circuit", sweep_circuit_path, "circuit file")
      ->required();
  common.attach(sweep_cmd);

  // interaction-curve
  auto* curve_cmd = app.add_subcommand(
      "interaction-curve", "emit the pair interaction curve U(r) as CSV");
  std::string r_grid_csv;
  double r_min = 2.0, r_max = 10.0;
  int r_points = 50;
  curve_cmd->add_option("--r-grid", r_grid_csv,
                        "explicit comma-separated distances in um");
  curve_cmd->add_option("--r-min", r_min, "grid start, um");
  curve_cmd->add_option("--r-max", r_max, "grid end, um");
  curve_cmd->add_option("--points", r_points, "number of grid points");
  common.attach(curve_cmd);

  // zeeman-report
  auto* zeeman_cmd = app.add_subcommand(
      "zeeman-report", "print the level scheme, degeneracies and selectivity");
  common.attach(zeeman_cmd);

  // blockade-mc
  auto* mc_cmd = app.add_subcommand(
      "blockade-mc", "Monte-Carlo worst-pair interaction over trap geometry");
  int mc_atoms = 300;
  int mc_samples = 100;
  std::string mc_shape = "sphere";
  double mc_scale = 5.0;
  mc_cmd->add_option("--atoms", mc_atoms, "atoms per configuration");
  mc_cmd->add_option("--mc-samples", mc_samples, "number of configurations");
  mc_cmd->add_option("--shape", mc_shape,
                     "box | sphere | gaussian-cloud | pinned-pair");
  mc_cmd->add_option("--scale", mc_scale, "trap length scale, um");
  common.attach(mc_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      rydreg::RunConfig config = common.load();
      rydreg::Circuit circuit = rydreg::parse_circuit(read_file(circuit_path));
      rydreg::RunReport report =
          rydreg::run_circuit(circuit, config, common.initial, common.samples);
      std::string text = rydreg::report_text(report);
      std::cout << text;
      std::cerr << "wall time: " << report.wall_seconds << " s\n";
      if (!common.out_path.empty()) {
        write_file(common.out_path, text);
        write_file(common.out_path + ".kv", rydreg::report_kv(report));
      }
    } else if (*sweep_cmd) {
      rydreg::RunConfig config = common.load();
      rydreg::Circuit circuit =
          rydreg::parse_circuit(read_file(sweep_circuit_path));
      auto rows = rydreg::sweep(axis, parse_grid(grid_csv), circuit, config);
      std::string csv = rydreg::sweep_csv(axis, rows);
      std::cout << csv;
      if (!common.out_path.empty()) write_file(common.out_path, csv);
    } else if (*curve_cmd) {
      rydreg::RunConfig config = common.load();
      std::vector<double> grid;
      if (!r_grid_csv.empty()) {
        grid = parse_grid(r_grid_csv);
      } else {
        for (int k = 0; k < r_points; ++k) {
          grid.push_back(r_min + (r_max - r_min) * k /
                                     std::max(1, r_points - 1));
        }
      }
      std::string csv = rydreg::interaction_curve_csv(config.forster, grid);
      std::cout << csv;
      if (!common.out_path.empty()) write_file(common.out_path, csv);
    } else if (*zeeman_cmd) {
      rydreg::RunConfig config = common.load();
      std::string text =
          rydreg::zeeman_report_text(config.scheme(), config.rabi);
      std::cout << text;
      if (!common.out_path.empty()) write_file(common.out_path, text);
    } else if (*mc_cmd) {
      rydreg::RunConfig config = common.load();
      rydreg::TrapGeometry geometry;
      geometry.atom_count = mc_atoms;
      geometry.scale_um = mc_scale;
      if (mc_shape == "box") {
        geometry.shape = rydreg::TrapGeometry::Shape::box;
      } else if (mc_shape == "sphere") {
        geometry.shape = rydreg::TrapGeometry::Shape::sphere;
      } else if (mc_shape == "gaussian-cloud") {
        geometry.shape = rydreg::TrapGeometry::Shape::gaussian_cloud;
      } else if (mc_shape == "pinned-pair") {
        geometry.shape = rydreg::TrapGeometry::Shape::pinned_pair;
      } else {
        throw std::invalid_argument("unknown-parameter: shape '" + mc_shape +
                                    "'");
      }
      rydreg::BlockadeStatistics stats = rydreg::blockade_statistics(
          geometry, config.forster, mc_samples, config.seed);
      std::string csv = rydreg::blockade_mc_csv(stats);
      std::cout << csv;
      std::cerr << "median worst-pair shift /2pi MHz: "
                << rydreg::mhz_from_angular(stats.median()) << "\n";
      std::cerr << "min: " << rydreg::mhz_from_angular(stats.minimum())
                << "  max: " << rydreg::mhz_from_angular(stats.maximum())
                << "\n";
      if (!common.out_path.empty()) write_file(common.out_path, csv);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
