#pragma once

#include <vector>

#include "evykit/ecosystem.hpp"

// Sustainable-yield computations.
//
// Equilibrium catches C⋆_i are the largest catches that hold the system
// exactly at the biomass floors: R_i(B♭, C/B♭_i) = 1. The ecosystem viable
// yields (EVY) are the largest catch floors, capped by C⋆, that the initial
// state can honor on its first transition while staying above the biomass
// floors — by weak invariance they can then be honored forever.

namespace evy {

struct EquilibriumCatchesResult {
  std::vector<double> catches;  // C⋆_i, tonnes/year
};

// Throws std::domain_error naming the species when R_i(B♭, 0) < 1 (no
// nonnegative sustainable catch exists at the floor). Uses the model's exact
// effort inverse when available, bracketing + bisection otherwise.
EquilibriumCatchesResult equilibrium_catches(const GrowthModel& model,
                                             const ConstraintSet& constraints);

struct EvyResult {
  std::vector<double> evy;               // tonnes/year
  std::vector<double> equilibrium_caps;  // C⋆_i, tonnes/year
  std::vector<EvyBranch> binding_branch;
};

// Per-species largest C in [0, C⋆_i] with
// state0_i × R_i(state0, C/state0_i) >= B♭_i, found by bisection on the
// monotone catch → successor-biomass map. Requires state0 >= B♭ and
// state0_i × R_i(state0, 0) >= B♭_i; violations throw std::domain_error
// listing every failed inequality.
EvyResult evy(const GrowthModel& model, const ConstraintSet& constraints,
              const BiomassState& state0);

struct EquilibriumPoint {
  BiomassState state;
  EffortVector efforts;
};

struct MsyResult {
  bool found = false;  // some equilibrium with positive objective biomass
  double msy = 0.0;    // tonnes/year of the objective species
  EquilibriumPoint equilibrium;
  bool viable = false;  // equilibrium state >= B♭ componentwise
};

// Rectangular effort-space search box.
struct EffortBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct MsyOptions {
  std::size_t grid_points = 200;   // per effort dimension, initial scan
  int refine_rounds = 4;           // local refinements around the incumbent
  std::size_t refine_points = 21;  // per dimension per refinement
  // Seed for the generic fixed-point equilibrium solver; when empty,
  // max(B♭_i, 1) per species is used.
  BiomassState seed;
};

// One result per objective species: maximize that species' equilibrium catch
// effort_i × state_i over effort vectors in the box admitting an equilibrium
// with positive objective biomass. Dense grid scan plus shrinking local
// refinement; equilibria from GrowthModel::equilibria (closed form where
// overridden, damped fixed-point iteration otherwise — a documented
// heuristic for non-LV models). found = false when no effort in the box
// yields an equilibrium with positive objective biomass.
std::vector<MsyResult> msy_multispecies(const GrowthModel& model,
                                        const ConstraintSet& constraints,
                                        const EffortBox& search_bounds,
                                        const MsyOptions& options = {});

struct SchaeferMsy {
  double msy;      // tonnes/year
  double biomass;  // argmax equilibrium biomass, tonnes
  double effort;   // effort sustaining it, /year
};

// Single-stock logistic surplus production: equilibrium catch
// h(B) = B(R − 1)(1 − B/K) is maximized at B = K/2, giving (R−1)K/4.
// Requires R > 1, K > 0 (std::invalid_argument otherwise).
SchaeferMsy msy_schaefer(double R, double K);

}  // namespace evy
