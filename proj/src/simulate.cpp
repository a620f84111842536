#include "evykit/simulate.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "evykit/viability.hpp"

namespace evy {

HarvestPolicy HarvestPolicy::constant_effort(EffortVector e) {
  HarvestPolicy p;
  p.kind = PolicyKind::ConstantEffort;
  p.efforts = std::move(e);
  return p;
}

HarvestPolicy HarvestPolicy::constant_catch(std::vector<double> c) {
  HarvestPolicy p;
  p.kind = PolicyKind::ConstantCatch;
  p.catches = std::move(c);
  return p;
}

HarvestPolicy HarvestPolicy::viable_min() {
  HarvestPolicy p;
  p.kind = PolicyKind::ViableMin;
  return p;
}

HarvestPolicy HarvestPolicy::viable_greedy() {
  HarvestPolicy p;
  p.kind = PolicyKind::ViableGreedy;
  return p;
}

namespace {

constexpr std::size_t kLadderInterior = 32;  // matches the grid effort search

// The box lower bound is C♭_i/state_i, but the recorded catch is the product
// effort × biomass, which can round one ulp below C♭_i. Walk each effort up
// by ulps until the product clears the floor exactly as audited.
EffortVector clear_catch_floors(EffortVector e, const BiomassState& x,
                                const ConstraintSet& constraints) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double floor = constraints.min_catch[i];
    if (floor <= 0.0 || !(x[i] > 0.0)) continue;
    for (int k = 0; k < 16 && e[i] * x[i] < floor; ++k) {
      e[i] = std::nextafter(e[i], std::numeric_limits<double>::infinity());
    }
  }
  return e;
}

struct LadderContext {
  const ViableControlBox& box;
  const BiomassState& state;
  const ConstraintSet& constraints;
  std::size_t n;
};

EffortVector ladder_point(const LadderContext& ctx, double t) {
  std::vector<double> e(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    e[i] = ctx.box.lower[i] + t * (ctx.box.upper[i] - ctx.box.lower[i]);
  }
  return clear_catch_floors(EffortVector(std::move(e)), ctx.state,
                            ctx.constraints);
}

// Smallest ladder point whose successor stays in the kernel.
EffortVector pick_viable_min(const LadderContext& ctx, int year) {
  const std::size_t top = kLadderInterior + 1;
  for (std::size_t s = 0; s <= top; ++s) {
    const double t = static_cast<double>(s) / static_cast<double>(top);
    EffortVector e = ladder_point(ctx, t);
    if (ctx.box.successor_filter(e)) return e;
  }
  throw std::domain_error(
      "viable_min: no sampled admissible effort keeps the successor in the "
      "kernel at year " +
      std::to_string(year));
}

// Largest admissible point: try the top of the box, else bisect between the
// highest passing ladder point and the first failing one above it.
EffortVector pick_viable_greedy(const LadderContext& ctx, int year) {
  const std::size_t top = kLadderInterior + 1;
  std::optional<std::size_t> pass;
  for (std::size_t s = top + 1; s-- > 0;) {
    const double t = static_cast<double>(s) / static_cast<double>(top);
    if (ctx.box.successor_filter(ladder_point(ctx, t))) {
      pass = s;
      break;
    }
  }
  if (!pass) {
    throw std::domain_error(
        "viable_greedy: no sampled admissible effort keeps the successor in "
        "the kernel at year " +
        std::to_string(year));
  }
  if (*pass == top) return ladder_point(ctx, 1.0);

  double good = static_cast<double>(*pass) / static_cast<double>(top);
  double bad = static_cast<double>(*pass + 1) / static_cast<double>(top);
  for (int it = 0; it < 60 && bad - good > 1e-12; ++it) {
    const double mid = 0.5 * (good + bad);
    if (ctx.box.successor_filter(ladder_point(ctx, mid)))
      good = mid;
    else
      bad = mid;
  }
  return ladder_point(ctx, good);
}

}  // namespace

Trajectory run(const GrowthModel& model, const BiomassState& state0,
               const HarvestPolicy& policy, const ConstraintSet& constraints,
               int horizon) {
  const std::size_t n = model.n_species();
  if (horizon < 1) {
    throw std::invalid_argument("run: horizon must be >= 1, got " +
                                std::to_string(horizon));
  }
  if (state0.size() != n || constraints.size() != n) {
    throw std::invalid_argument(
        "run: state0 and constraints must match the model's species count");
  }
  const bool viable_kind = policy.kind == PolicyKind::ViableMin ||
                           policy.kind == PolicyKind::ViableGreedy;
  if (policy.kind == PolicyKind::ConstantEffort && policy.efforts.size() != n) {
    throw std::invalid_argument(
        "run: constant_effort policy needs one effort per species");
  }
  if (policy.kind == PolicyKind::ConstantCatch && policy.catches.size() != n) {
    throw std::invalid_argument(
        "run: constant_catch policy needs one catch per species");
  }

  // The analytic kernel is used for per-year flags whenever the constraints
  // allow it; viable policies cannot do without it.
  std::optional<AnalyticKernel> kernel;
  try {
    if (favorable_conditions(model, constraints))
      kernel.emplace(model, constraints);
  } catch (const std::domain_error&) {
    // undefined favorable-conditions effort: leave the kernel unset
  }
  if (viable_kind) {
    if (!kernel) {
      throw std::domain_error(
          "run: viable policies require favorable conditions");
    }
    if (!kernel->contains(state0)) {
      throw std::domain_error(
          "run: viable policies require an initial state inside the "
          "viability kernel");
    }
  }

  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(horizon) + 1);
  BiomassState state = state0;
  for (int year = 0; year <= horizon; ++year) {
    EffortVector efforts;
    switch (policy.kind) {
      case PolicyKind::ConstantEffort:
        efforts = policy.efforts;
        break;
      case PolicyKind::ConstantCatch: {
        std::vector<double> e(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (state[i] > 0.0) e[i] = policy.catches[i] / state[i];
        }
        efforts = EffortVector(std::move(e));
        break;
      }
      case PolicyKind::ViableMin:
      case PolicyKind::ViableGreedy: {
        const auto box = viable_control_box(*kernel, state);
        const LadderContext ctx{box, state, constraints, n};
        efforts = policy.kind == PolicyKind::ViableMin
                      ? pick_viable_min(ctx, year)
                      : pick_viable_greedy(ctx, year);
        break;
      }
    }

    TrajectoryStep row;
    row.year = year;
    row.state = state;
    row.efforts = efforts;
    row.catches = catches(state, efforts);
    row.in_kernel = kernel && kernel->contains(state);
    row.constraints_ok = check_acceptable(state, efforts, constraints);
    row.extinction = false;
    if (year < horizon) {
      bool extinct = false;
      state = step(model, state, efforts, &extinct);
      row.extinction = extinct;
    }
    traj.steps.push_back(std::move(row));
  }
  return traj;
}

AuditReport audit(const Trajectory& trajectory,
                  const ConstraintSet& constraints) {
  AuditReport report;
  for (const auto& row : trajectory.steps) {
    if (row.state.size() != constraints.size()) {
      throw std::invalid_argument(
          "audit: trajectory species count does not match the constraints");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (row.state[i] < constraints.min_biomass[i]) {
        std::ostringstream os;
        os.precision(17);
        os << "biomass[" << i << "] = " << row.state[i]
           << " below floor " << constraints.min_biomass[i];
        report.violations.push_back({row.year, os.str()});
        report.biomass_ok = false;
      }
      const double c =
          i < row.catches.size() ? row.catches[i] : 0.0;
      if (c < constraints.min_catch[i]) {
        std::ostringstream os;
        os.precision(17);
        os << "catch[" << i << "] = " << c << " below floor "
           << constraints.min_catch[i];
        report.violations.push_back({row.year, os.str()});
        report.catch_ok = false;
      }
    }
  }
  if (!report.violations.empty()) {
    report.first_violation_year = report.violations.front().year;
  }
  return report;
}

}  // namespace evy
