#pragma once

#include <optional>
#include <string>

#include "evykit/ecosystem.hpp"
#include "evykit/errors.hpp"
#include "evykit/lotka_volterra.hpp"

// Flat INI-style run configuration:
//
//   [model]        R, L, alpha, beta, K            (all five together)
//   [constraints]  min_biomass_prey, min_biomass_predator,
//                  min_catch_prey, min_catch_predator   (catches default 0)
//   [initial]      biomass_prey, biomass_predator
//   [grid]         y_min, y_max, z_min, z_max, y_cells, z_cells, max_iters
//   [fit]          cg_max_iters, grad_step_rel, converge_tol, grad_tol,
//                  weight_prey, weight_predator
//   [simulate]     policy, horizon, effort_prey, effort_predator,
//                  catch_prey, catch_predator
//   [msy]          v_max, w_max, grid_points, refine_rounds
//
// '#' and ';' start comments. Unknown sections or keys are rejected. Values
// are validated against the owning type's invariants at load time.

namespace evy {

struct GridBlock {
  std::optional<double> y_min, y_max, z_min, z_max;  // default: LV envelope
  std::size_t y_cells = 200;
  std::size_t z_cells = 200;
  std::size_t max_iters = 50;
};

struct FitBlock {
  int cg_max_iters = 500;
  double grad_step_rel = 1e-5;
  double converge_tol = 1e-10;
  double grad_tol = 1e-8;
  std::optional<double> weight_prey, weight_predator;  // default: 1/mean²
};

struct SimulateBlock {
  bool present = false;
  std::string policy;  // constant_effort|constant_catch|viable_min|viable_greedy
  int horizon = 0;
  std::optional<double> effort_prey, effort_predator;
  std::optional<double> catch_prey, catch_predator;
};

struct MsyBlock {
  std::optional<double> v_max, w_max;  // default: effort exhausting growth
  std::size_t grid_points = 200;
  int refine_rounds = 4;
};

struct RunConfig {
  std::optional<LVParams> model;
  std::optional<ConstraintSet> constraints;
  std::optional<BiomassState> initial;
  GridBlock grid;
  FitBlock fit;
  SimulateBlock simulate;
  MsyBlock msy;
  std::string config_hash;  // FNV-1a of the raw file bytes, hex
};

// Throws io_error when the file cannot be read, config_error on syntax or
// validation problems.
RunConfig load_config(const std::string& path);

// The same parser over in-memory text (used by load_config and tests).
RunConfig parse_config(const std::string& text, const std::string& source_name);

}  // namespace evy
