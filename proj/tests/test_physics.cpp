#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "rydreg/hamiltonian.hpp"
#include "rydreg/physics.hpp"
#include "rydreg/random.hpp"

using namespace rydreg;

TEST_CASE("fitted defaults reproduce the interaction anchors") {
  ForsterParams params = ForsterParams::cesium_defaults();
  auto curve = forster_curve(params, {3.0, 5.0});
  CHECK(mhz_from_angular(curve[0].second) ==
        doctest::Approx(1000.0).epsilon(1e-9));
  CHECK(mhz_from_angular(curve[1].second) ==
        doctest::Approx(80.0).epsilon(1e-9));
  // Within the quoted 20% bands by construction.
  CHECK(std::abs(mhz_from_angular(curve[0].second) - 1000.0) < 200.0);
  CHECK(std::abs(mhz_from_angular(curve[1].second) - 80.0) < 16.0);
  CHECK(params.c3 > 0.0);
  CHECK(params.delta > 0.0);
}

TEST_CASE("interaction curve shape") {
  ForsterParams params = ForsterParams::cesium_defaults();
  SUBCASE("strictly decreasing and convex in r") {
    std::vector<double> grid;
    for (int k = 0; k < 60; ++k) grid.push_back(1.0 + 0.2 * k);
    auto curve = forster_curve(params, grid);
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      CHECK(curve[k].second > curve[k + 1].second);
    }
    for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
      double second_difference =
          curve[k - 1].second - 2.0 * curve[k].second + curve[k + 1].second;
      CHECK(second_difference > 0.0);
    }
  }
  SUBCASE("resonant limit follows the 1/r^3 law") {
    ForsterParams resonant;
    resonant.c3 = angular_from_ghz(30.0);
    resonant.delta = 0.0;
    auto curve = forster_curve(resonant, {1.5, 3.0});
    CHECK(curve[1].second / curve[0].second ==
          doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  }
  SUBCASE("grid order is preserved, including descending grids") {
    auto curve = forster_curve(params, {5.0, 3.0});
    CHECK(curve[0].first == 5.0);
    CHECK(curve[1].first == 3.0);
    CHECK(curve[0].second < curve[1].second);
  }
}

TEST_CASE("two-point fit inverts the curve exactly") {
  const double u1 = angular_from_mhz(1000.0);
  const double u2 = angular_from_mhz(80.0);
  ForsterParams fitted = fit_forster_params({{3.0, u1}, {5.0, u2}});

  auto [c3_oracle, delta_oracle] =
      oracles::two_point_forster_inversion(3.0, u1, 5.0, u2);
  CHECK(fitted.c3 == doctest::Approx(c3_oracle).epsilon(1e-12));
  CHECK(fitted.delta == doctest::Approx(delta_oracle).epsilon(1e-12));

  SUBCASE("round trip through the curve") {
    auto curve = forster_curve(fitted, {3.0, 5.0});
    CHECK(curve[0].second == doctest::Approx(u1).epsilon(1e-9));
    CHECK(curve[1].second == doctest::Approx(u2).epsilon(1e-9));
  }
  SUBCASE("round trip on random parameter draws") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
      ForsterParams truth;
      truth.c3 = uniform(rng, 1e3, 1e6);
      truth.delta = uniform(rng, 0.0, 1e4);
      double r1 = uniform(rng, 1.5, 4.0);
      double r2 = uniform(rng, 4.5, 9.0);
      auto curve = forster_curve(truth, {r1, r2});
      ForsterParams fit = fit_forster_params(
          {{r1, curve[0].second}, {r2, curve[1].second}});
      CHECK(fit.c3 == doctest::Approx(truth.c3).epsilon(1e-9));
      CHECK(fit.delta ==
            doctest::Approx(truth.delta).epsilon(1e-7).scale(truth.c3 / 100.0));
    }
  }
  SUBCASE("points on a resonant curve recover delta = 0") {
    ForsterParams resonant;
    resonant.c3 = angular_from_ghz(25.0);
    resonant.delta = 0.0;
    auto curve = forster_curve(resonant, {2.0, 6.0});
    ForsterParams fit =
        fit_forster_params({{2.0, curve[0].second}, {6.0, curve[1].second}});
    CHECK(std::abs(fit.delta) < 1e-6 * resonant.c3);
    CHECK(fit.c3 == doctest::Approx(resonant.c3).epsilon(1e-9));
  }
  SUBCASE("an overdetermined consistent system is still exact") {
    ForsterParams truth;
    truth.c3 = 2.5e5;
    truth.delta = 4.0e3;
    std::vector<std::pair<double, double>> points;
    for (double r : {2.0, 3.0, 4.5, 6.0, 8.0}) {
      points.emplace_back(r, forster_shift(truth.c3, truth.delta, r));
    }
    ForsterParams fit = fit_forster_params(points);
    CHECK(fit.c3 == doctest::Approx(truth.c3).epsilon(1e-9));
    CHECK(fit.delta == doctest::Approx(truth.delta).epsilon(1e-9));
  }
  SUBCASE("degenerate and infeasible inputs are rejected") {
    CHECK_THROWS_WITH_AS(fit_forster_params({{3.0, u1}}),
                         doctest::Contains("degenerate-points"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(fit_forster_params({{3.0, u1}, {3.0, u2}}),
                         doctest::Contains("degenerate-points"),
                         std::invalid_argument);
    // An increasing shift with distance cannot come from this interaction.
    CHECK_THROWS_WITH_AS(fit_forster_params({{3.0, u2}, {5.0, u1}}),
                         doctest::Contains("infeasible-fit"),
                         std::invalid_argument);
  }
}

TEST_CASE("n-scaling of the interaction anchor") {
  ForsterParams base = ForsterParams::cesium_defaults();
  ForsterParams same = base.scaled_to_n(70, 70);
  CHECK(same.c3 == base.c3);
  ForsterParams doubled = base.scaled_to_n(140, 70);
  CHECK(doubled.c3 == doctest::Approx(16.0 * base.c3).epsilon(1e-12));
  CHECK(doubled.delta == base.delta);
  CHECK_THROWS_WITH_AS(base.scaled_to_n(5, 70), doctest::Contains("invalid-n"),
                       std::invalid_argument);
}

TEST_CASE("cesium level scheme") {
  LevelScheme scheme = LevelScheme::cesium();

  SUBCASE("sixteen entries, one excluded, reservoir plus fourteen qubits") {
    CHECK(scheme.entries.size() == 16);
    CHECK(scheme.usable_count() == 15);
    int excluded_count = 0;
    for (const ZeemanEntry& e : scheme.entries) {
      if (e.excluded) {
        ++excluded_count;
        CHECK(e.f == 4);
        CHECK(e.m == -4);
      }
    }
    CHECK(excluded_count == 1);
    for (int index = 0; index <= 14; ++index) {
      CHECK(scheme.entry_for_register(index) != nullptr);
    }
  }
  SUBCASE("register anchors of the default map") {
    const ZeemanEntry* reservoir = scheme.entry_for_register(0);
    CHECK(reservoir->f == 4);
    CHECK(reservoir->m == 0);
    const ZeemanEntry* three = scheme.entry_for_register(3);
    CHECK(three->f == 4);
    CHECK(three->m == 2);
    const ZeemanEntry* six = scheme.entry_for_register(6);
    CHECK(six->f == 4);
    CHECK(six->m == -2);
  }
  SUBCASE("only the stretched transitions are degenerate") {
    LevelScheme all = LevelScheme::cesium(false);
    auto pairs = degenerate_transition_check(all);
    REQUIRE(pairs.size() == 1);
    const ZeemanEntry& a = all.entries[pairs[0].first];
    const ZeemanEntry& b = all.entries[pairs[0].second];
    CHECK(a.f == 4);
    CHECK(b.f == 4);
    CHECK(std::abs(a.m) == 4);
    CHECK(std::abs(b.m) == 4);
    CHECK(a.m == -b.m);
  }
  SUBCASE("excluding one stretched state removes the degeneracy") {
    CHECK(degenerate_transition_check(scheme).empty());
  }
  SUBCASE("zero field degenerates everything, reported not rejected") {
    LevelScheme zero = LevelScheme::cesium(true, 0.0);
    auto pairs = degenerate_transition_check(zero);
    CHECK(pairs.size() == 15 * 14 / 2);
  }
  SUBCASE("file round trip") {
    const std::string path = "scheme_roundtrip_tmp.txt";
    save_level_scheme(scheme, path);
    LevelScheme loaded = load_level_scheme(path, scheme.bias_field_gauss,
                                           scheme.rydberg_n);
    REQUIRE(loaded.entries.size() == scheme.entries.size());
    for (std::size_t k = 0; k < scheme.entries.size(); ++k) {
      CHECK(loaded.entries[k].register_index ==
            scheme.entries[k].register_index);
      CHECK(loaded.entries[k].f == scheme.entries[k].f);
      CHECK(loaded.entries[k].m == scheme.entries[k].m);
      CHECK(loaded.entries[k].excluded == scheme.entries[k].excluded);
      CHECK(loaded.entries[k].shift_quarters ==
            scheme.entries[k].shift_quarters);
    }
    std::remove(path.c_str());
  }
}

TEST_CASE("zeeman selectivity") {
  LevelScheme scheme = LevelScheme::cesium();

  SUBCASE("B = 15 G separates transitions by 5.25 MHz") {
    ZeemanSelectivity sel = zeeman_selectivity(scheme, angular_from_mhz(1.0));
    double expected_mhz = kBohrMagnetonMHzPerGauss * 15.0 / 4.0;
    CHECK(mhz_from_angular(sel.min_separation) ==
          doctest::Approx(expected_mhz).epsilon(1e-12));
    CHECK(std::abs(mhz_from_angular(sel.min_separation) - 5.25) < 0.01);

    double expected_peak = oracles::detuned_peak(
        angular_from_mhz(1.0), angular_from_mhz(expected_mhz));
    CHECK(sel.worst_case_probability ==
          doctest::Approx(expected_peak).epsilon(1e-12));
    CHECK(sel.worst_case_probability == doctest::Approx(0.035).epsilon(0.01));
    CHECK(sel.time_averaged_probability ==
          doctest::Approx(0.5 * expected_peak).epsilon(1e-12));
  }
  SUBCASE("separation is linear in B") {
    LevelScheme strong = LevelScheme::cesium(true, 30.0);
    double d15 =
        zeeman_selectivity(scheme, angular_from_mhz(1.0)).min_separation;
    double d30 =
        zeeman_selectivity(strong, angular_from_mhz(1.0)).min_separation;
    CHECK(d30 == doctest::Approx(2.0 * d15).epsilon(1e-12));
  }
  SUBCASE("suppression improves with B and worsens with Omega") {
    double p15 = zeeman_selectivity(scheme, angular_from_mhz(1.0))
                     .worst_case_probability;
    double p30 = zeeman_selectivity(LevelScheme::cesium(true, 30.0),
                                    angular_from_mhz(1.0))
                     .worst_case_probability;
    double p_fast =
        zeeman_selectivity(scheme, angular_from_mhz(2.0)).worst_case_probability;
    CHECK(p30 < p15);
    CHECK(p_fast > p15);
  }
  SUBCASE("no drive, no excitation") {
    CHECK(zeeman_selectivity(scheme, 0.0).worst_case_probability == 0.0);
  }
  SUBCASE("nonpositive field is rejected") {
    LevelScheme zero = LevelScheme::cesium(true, 0.0);
    CHECK_THROWS_WITH_AS(zeeman_selectivity(zero, 1.0),
                         doctest::Contains("nonpositive-field"),
                         std::invalid_argument);
  }
}

TEST_CASE("rydberg lifetime scaling") {
  CHECK(rydberg_linewidth(70, 150.0, 70) ==
        doctest::Approx(1.0 / 150.0).epsilon(1e-15));
  CHECK(rydberg_linewidth(140, 150.0, 70) ==
        doctest::Approx(1.0 / (8.0 * 150.0)).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(rydberg_linewidth(9, 150.0, 70),
                       doctest::Contains("invalid-n"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(rydberg_linewidth(70, 0.0, 70),
                       doctest::Contains("invalid-n"), std::invalid_argument);
}

TEST_CASE("blockade statistics") {
  ForsterParams params = ForsterParams::cesium_defaults();

  SUBCASE("pinned pair at 5 um reproduces the curve point") {
    TrapGeometry pair;
    pair.shape = TrapGeometry::Shape::pinned_pair;
    pair.scale_um = 5.0;
    pair.atom_count = 2;
    ForsterParams isotropic = params;
    isotropic.anisotropy_fraction = 0.0;
    BlockadeStatistics stats = blockade_statistics(pair, isotropic, 3, 42);
    for (double u : stats.u_min) {
      CHECK(mhz_from_angular(u) == doctest::Approx(80.0).epsilon(1e-9));
    }
  }
  SUBCASE("fixed seed is reproducible") {
    TrapGeometry sphere;
    sphere.atom_count = 40;
    BlockadeStatistics a = blockade_statistics(sphere, params, 5, 7);
    BlockadeStatistics b = blockade_statistics(sphere, params, 5, 7);
    REQUIRE(a.u_min.size() == b.u_min.size());
    for (std::size_t k = 0; k < a.u_min.size(); ++k) {
      CHECK(a.u_min[k] == b.u_min[k]);
    }
    BlockadeStatistics c = blockade_statistics(sphere, params, 5, 8);
    bool any_different = false;
    for (std::size_t k = 0; k < a.u_min.size(); ++k) {
      if (a.u_min[k] != c.u_min[k]) any_different = true;
    }
    CHECK(any_different);
  }
  SUBCASE("worst pair never beats the maximum-separation bound") {
    TrapGeometry sphere;
    sphere.atom_count = 30;
    sphere.scale_um = 5.0;
    BlockadeStatistics stats = blockade_statistics(sphere, params, 10, 3);
    double floor_shift = (1.0 - params.anisotropy_fraction) *
                         forster_shift(params.c3, params.delta, 5.0);
    for (double u : stats.u_min) {
      CHECK(u >= floor_shift);
    }
  }
  SUBCASE("invalid inputs") {
    TrapGeometry bad;
    bad.atom_count = 1;
    CHECK_THROWS_WITH_AS(blockade_statistics(bad, params, 1, 0),
                         doctest::Contains("invalid-dimensions"),
                         std::invalid_argument);
    TrapGeometry pinned;
    pinned.shape = TrapGeometry::Shape::pinned_pair;
    pinned.atom_count = 3;
    CHECK_THROWS_WITH_AS(blockade_statistics(pinned, params, 1, 0),
                         doctest::Contains("invalid-dimensions"),
                         std::invalid_argument);
    TrapGeometry sphere;
    CHECK_THROWS_WITH_AS(blockade_statistics(sphere, params, 0, 0),
                         doctest::Contains("invalid-dimensions"),
                         std::invalid_argument);
  }
}
