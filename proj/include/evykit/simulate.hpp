#pragma once

#include <string>
#include <vector>

#include "evykit/ecosystem.hpp"

// Multi-year trajectory simulation. Policies pick per-year efforts from the
// current state; viable kinds select from the per-state control box and only
// accept efforts whose successor stays inside the analytic viability kernel.

namespace evy {

enum class PolicyKind {
  ConstantEffort,
  ConstantCatch,
  ViableMin,    // cautious: smallest admissible efforts above the catch floors
  ViableGreedy  // largest admissible efforts (maximal current catch)
};

struct HarvestPolicy {
  PolicyKind kind = PolicyKind::ConstantEffort;
  EffortVector efforts;         // ConstantEffort
  std::vector<double> catches;  // ConstantCatch, tonnes/year

  static HarvestPolicy constant_effort(EffortVector e);
  static HarvestPolicy constant_catch(std::vector<double> c);
  static HarvestPolicy viable_min();
  static HarvestPolicy viable_greedy();
};

struct TrajectoryStep {
  int year = 0;
  BiomassState state;
  EffortVector efforts;
  std::vector<double> catches;
  bool in_kernel = false;       // analytic kernel membership (when defined)
  bool constraints_ok = false;  // biomass and catch floors both cleared
  bool extinction = false;      // a negative growth factor was clamped to 0
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // years 0..horizon
};

// Simulates `horizon` transitions, recording horizon+1 yearly rows (the last
// row carries the efforts the policy would apply next, with no transition
// after it). Viable kinds require favorable conditions and state0 inside the
// analytic kernel (std::domain_error otherwise); they pick efforts by
// scanning the control-box ladder and, for greedy, bisecting back toward the
// last admissible point. A viable policy that finds no admissible effort at
// some visited state throws std::domain_error rather than violating the
// constraints silently.
Trajectory run(const GrowthModel& model, const BiomassState& state0,
               const HarvestPolicy& policy, const ConstraintSet& constraints,
               int horizon);

struct AuditViolation {
  int year;
  std::string what;
};

struct AuditReport {
  std::vector<AuditViolation> violations;  // in year order
  bool biomass_ok = true;
  bool catch_ok = true;
  int first_violation_year = -1;
  bool ok() const { return violations.empty(); }
};

// Checks every recorded year against the floors.
AuditReport audit(const Trajectory& trajectory,
                  const ConstraintSet& constraints);

}  // namespace evy
