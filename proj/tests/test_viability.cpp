#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "evykit/lotka_volterra.hpp"
#include "evykit/viability.hpp"
#include "test_support.hpp"

using namespace evy;

namespace {

ConstraintSet near_cap_constraints(double shave) {
  return ConstraintSet({7e6, 2e5}, {evytest::kPreyCap * (1.0 - shave),
                                    evytest::kPredCap * (1.0 - shave)});
}

}  // namespace

TEST_CASE("favorable conditions at the reference floors") {
  const LotkaVolterraModel model(evytest::reference_params());

  CHECK(favorable_conditions(model, evytest::reference_floors()));

  // Catch floors right at the sustainable caps: the growth factors equal 1.
  // A sliver of margin keeps the equality case on the favorable side of
  // floating-point rounding.
  CHECK(favorable_conditions(model, near_cap_constraints(1e-12)));
  CHECK_FALSE(favorable_conditions(model, near_cap_constraints(-1e-9)));

  // An excessive prey catch floor drags the prey factor below 1.
  CHECK_FALSE(favorable_conditions(
      model, ConstraintSet({7e6, 2e5}, {6e6, 0.0})));

  // Positive catch demanded of a species with a zero biomass floor.
  CHECK_THROWS_WITH_AS(
      favorable_conditions(model, ConstraintSet({0.0, 2e5}, {1e3, 0.0})),
      doctest::Contains("zero minimal biomass"), std::domain_error);

  CHECK_THROWS_AS(
      favorable_conditions(model, ConstraintSet({7e6}, {0.0})),
      std::invalid_argument);

  // With zero floors the predator factor L < 1 is unfavorable.
  CHECK_FALSE(favorable_conditions(model, ConstraintSet({0.0, 0.0},
                                                        {0.0, 0.0})));
}

TEST_CASE("analytic kernel membership") {
  const LotkaVolterraModel model(evytest::reference_params());

  CHECK_THROWS_AS(AnalyticKernel(model, ConstraintSet({7e6, 2e5}, {6e6, 0.0})),
                  std::domain_error);

  const AnalyticKernel kernel(model, evytest::reference_floors());
  CHECK(kernel.contains(BiomassState{7e6, 2e5}));
  CHECK(kernel.contains(BiomassState{1.5e7, 4e5}));
  CHECK_FALSE(kernel.contains(BiomassState{6.9e6, 2e5}));
  CHECK_FALSE(kernel.contains(BiomassState{7e6, 1.9e5}));
  // Overcrowded prey: its successor collapses below the floor.
  CHECK_FALSE(kernel.contains(BiomassState{5.9e7, 2e5}));
  CHECK_THROWS_AS(kernel.contains(BiomassState{7e6}), std::invalid_argument);

  // Near-cap catch floors: the floors themselves sit on the boundary.
  const AnalyticKernel tight(model, near_cap_constraints(1e-12));
  CHECK(tight.contains(BiomassState{7e6, 2e5}));
  CHECK_FALSE(tight.contains(BiomassState{7e6, 6e5}));
}

TEST_CASE("viable control box at the reference floors") {
  const LotkaVolterraModel model(evytest::reference_params());
  const AnalyticKernel kernel(model, evytest::reference_floors());
  const BiomassState floors{7e6, 2e5};

  const ViableControlBox box = viable_control_box(kernel, floors);
  CHECK(box.lower[0] == 0.0);
  CHECK(box.lower[1] == 0.0);
  // Affine factors make the upper efforts explicit.
  CHECK(box.upper[0] ==
        doctest::Approx(evytest::kPreyFactorAtFloors - 1.0).epsilon(1e-8));
  CHECK(box.upper[1] ==
        doctest::Approx(evytest::kPredFactorAtFloors - 1.0).epsilon(1e-8));

  // Conservative side: the appraised successor still clears the floor.
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(floors[i] * model.growth_factor(i, floors, box.upper[i]) >= floors[i]);
  }

  // The filter accepts the endpoints and rejects efforts beyond the box.
  CHECK(box.successor_filter(box.lower));
  CHECK(box.successor_filter(box.upper));
  CHECK_FALSE(box.successor_filter(
      EffortVector{box.upper[0] + 1e-3, box.upper[1] + 1e-3}));

  CHECK_THROWS_AS(viable_control_box(kernel, BiomassState{6e6, 2e5}),
                  std::domain_error);
}

TEST_CASE("viable control box rejects zero-biomass species") {
  const evytest::DecoupledLogistic model(2.0, 1000.0, 1.5, 500.0);
  const AnalyticKernel kernel(model, ConstraintSet({0.0, 0.0}, {0.0, 0.0}));
  REQUIRE(kernel.contains(BiomassState{100.0, 0.0}));
  CHECK_THROWS_WITH_AS(viable_control_box(kernel, BiomassState{100.0, 0.0}),
                       doctest::Contains("zero biomass"), std::domain_error);
}

TEST_CASE("control box roots and filters on random admissible draws") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 30; ++trial) {
    const auto draw = evytest::draw_admissible(rng);
    const LotkaVolterraModel model(draw.params);
    const AnalyticKernel kernel(model, draw.constraints);
    const BiomassState state = evytest::draw_kernel_state(rng, kernel);

    const ViableControlBox box = viable_control_box(kernel, state);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(box.lower[i] <= box.upper[i]);
      CHECK(box.lower[i] ==
            draw.constraints.min_catch[i] / state[i]);

      // Successor at the upper effort sits on the floor, within the
      // advertised effort tolerance scaled by the local slope.
      const double at_upper =
          state[i] * model.growth_factor(i, state, box.upper[i]);
      const double floor_i = draw.constraints.min_biomass[i];
      CHECK(at_upper >= floor_i);
      CHECK(at_upper - floor_i <= 2e-9 * state[i] + 1e-9);
      // A nudge past the upper effort drops the successor below the floor.
      CHECK(state[i] * model.growth_factor(i, state, box.upper[i] + 1e-6) <
            floor_i);
    }
    // Harvesting both species down to their floors lands back in the kernel.
    CHECK(box.successor_filter(box.upper));
  }
}

TEST_CASE("grid geometry indexing") {
  GridGeometry geom;
  geom.bounds = {{0.0, 3.0}, {0.0, 2.0}};
  geom.cells = {3, 2};
  geom.validate();

  CHECK(geom.cell_count() == 6);
  CHECK(geom.width(0) == 1.0);
  CHECK(geom.center(0, 0) == 0.5);
  CHECK(geom.center(1, 1) == 1.5);

  CHECK(geom.locate(0, 0.0).value() == 0);
  CHECK(geom.locate(0, 0.999).value() == 0);
  CHECK(geom.locate(0, 1.0).value() == 1);
  CHECK(geom.locate(0, 3.0).value() == 2);  // closed upper edge
  CHECK_FALSE(geom.locate(0, 3.0001).has_value());
  CHECK_FALSE(geom.locate(0, -0.0001).has_value());

  for (std::size_t flat = 0; flat < geom.cell_count(); ++flat) {
    CHECK(geom.flatten(geom.unflatten(flat)) == flat);
  }
  CHECK(geom.flatten({1, 1}) == 3);  // row-major, last dimension fastest

  GridGeometry bad = geom;
  bad.cells = {1, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = geom;
  bad.bounds[0] = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("grid kernel matches the analytic kernel on the reference model") {
  const LotkaVolterraModel model(evytest::reference_params());
  const ConstraintSet floors = evytest::reference_floors();
  const AnalyticKernel analytic(model, floors);

  GridGeometry geom;
  geom.bounds = {{0.0, 4e7}, {0.0, 1.5e6}};
  geom.cells = {100, 100};

  const KernelGrid grid = grid_kernel(model, floors, geom, 50);

  // Layers shrink monotonically and stabilize quickly.
  REQUIRE(grid.layer_count() >= 2);
  for (std::size_t k = 0; k + 1 < grid.layer_count(); ++k) {
    const auto& outer = grid.layer(k);
    const auto& inner = grid.layer(k + 1);
    for (std::size_t f = 0; f < outer.size(); ++f) {
      if (inner[f]) CHECK(outer[f]);
    }
    CHECK(grid.member_count(k + 1) <= grid.member_count(k));
  }
  CHECK(grid.stationary_iteration() >= 1);
  CHECK(grid.stationary_iteration() <= 3);

  // Cell-center agreement with the analytic membership test.
  std::size_t agree = 0;
  const auto& final_layer = grid.final_layer();
  for (std::size_t f = 0; f < final_layer.size(); ++f) {
    const bool analytic_member = analytic.contains(geom.center_state(f));
    if (analytic_member == (final_layer[f] != 0)) ++agree;
  }
  CHECK(agree >= final_layer.size() * 99 / 100);

  // The floors cell is a member of every layer.
  const std::vector<std::size_t> floors_idx{
      geom.locate(0, 7e6).value(), geom.locate(1, 2e5).value()};
  for (std::size_t k = 0; k < grid.layer_count(); ++k) {
    CHECK(grid.layer(k)[geom.flatten(floors_idx)]);
  }
  CHECK(grid.contains(BiomassState{7e6, 2e5}));
  CHECK_FALSE(grid.contains(BiomassState{1e6, 2e5}));
  CHECK_FALSE(grid.contains(BiomassState{5e7, 2e5}));  // outside the bounds

  // The stationary layer is weakly invariant; the initial layer is not.
  CHECK(is_viability_domain(model, floors, geom, grid.final_layer()));
  CHECK_FALSE(is_viability_domain(model, floors, geom, grid.layer(0)));
}

TEST_CASE("grid kernel edge cases") {
  const LotkaVolterraModel model(evytest::reference_params());

  SUBCASE("floors above the grid bounds give an empty kernel") {
    GridGeometry geom;
    geom.bounds = {{0.0, 5e6}, {0.0, 1e5}};
    geom.cells = {10, 10};
    const KernelGrid grid =
        grid_kernel(model, evytest::reference_floors(), geom, 10);
    CHECK(grid.member_count(0) == 0);
    CHECK(grid.member_count(grid.layer_count() - 1) == 0);
    CHECK(grid.stationary_iteration() == 1);
    CHECK_FALSE(grid.contains(BiomassState{4e6, 5e4}));
    // The empty set is trivially weakly invariant.
    CHECK(is_viability_domain(model, evytest::reference_floors(), geom,
                              grid.final_layer()));
  }

  SUBCASE("dimension mismatch is rejected") {
    GridGeometry geom;
    geom.bounds = {{0.0, 4e7}};
    geom.cells = {16};
    CHECK_THROWS_AS(
        grid_kernel(model, evytest::reference_floors(), geom, 5),
        std::invalid_argument);
  }

  SUBCASE("max_iters zero reports no stationarity") {
    GridGeometry geom;
    geom.bounds = {{0.0, 4e7}, {0.0, 1.5e6}};
    geom.cells = {8, 8};
    const KernelGrid grid =
        grid_kernel(model, evytest::reference_floors(), geom, 0);
    CHECK(grid.layer_count() == 1);
    CHECK(grid.stationary_iteration() == -1);
  }
}

TEST_CASE("kernel grid export format") {
  const LotkaVolterraModel model(evytest::reference_params());
  GridGeometry geom;
  geom.bounds = {{0.0, 3.0}, {0.0, 2.0}};
  geom.cells = {3, 2};
  // Floors outside these toy bounds: everything is excluded at layer 0.
  const KernelGrid grid =
      grid_kernel(model, evytest::reference_floors(), geom, 2);

  std::ostringstream os;
  grid.export_csv(os);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "i,j,y_center,z_center,layer_first_excluded");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
  CHECK(os.str().find("0,0,0.5,0.5,0") != std::string::npos);
}

TEST_CASE("default grid geometry covers the reachable box") {
  const LVParams p = evytest::reference_params();
  const GridGeometry geom = lv_default_geometry(p.R, p.K, p.alpha);
  geom.validate();
  CHECK(geom.cells[0] == 200);
  CHECK(geom.cells[1] == 200);
  CHECK(geom.bounds[0][0] == 0.0);
  CHECK(geom.bounds[0][1] == doctest::Approx(1.2 * p.kappa()).epsilon(1e-15));
  CHECK(geom.bounds[1][1] ==
        doctest::Approx(1.2 * (p.R - 1.0) / p.alpha).epsilon(1e-15));

  const GridGeometry coarse = lv_default_geometry(p.R, p.K, p.alpha, 16);
  CHECK(coarse.cells[0] == 16);
}
