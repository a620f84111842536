#include "evykit/yields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evykit/rootfind.hpp"

namespace evy {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

EquilibriumCatchesResult equilibrium_catches(const GrowthModel& model,
                                             const ConstraintSet& constraints) {
  if (constraints.size() != model.n_species()) {
    throw std::invalid_argument("equilibrium_catches: constraints cover " +
                                std::to_string(constraints.size()) +
                                " species, model has " +
                                std::to_string(model.n_species()));
  }
  const BiomassState floor(constraints.min_biomass);
  EquilibriumCatchesResult out;
  out.catches.resize(constraints.size());

  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const double b = constraints.min_biomass[i];
    if (b == 0.0) {
      // A zero floor is sustained by a zero catch whatever the growth factor.
      out.catches[i] = 0.0;
      continue;
    }
    const double factor0 = model.growth_factor(i, floor, 0.0);
    if (factor0 < 1.0) {
      throw std::domain_error(
          "equilibrium_catches: species " + std::to_string(i) +
          " growth factor at the minimal biomasses is " + fmt(factor0) +
          " < 1; no nonnegative sustainable catch exists");
    }
    if (auto e = model.effort_at_factor(i, floor, 1.0)) {
      out.catches[i] = b * *e;
      continue;
    }
    auto f = [&](double e) { return model.growth_factor(i, floor, e); };
    const auto e = largest_arg_at_least(f, 0.0, 1.0);
    out.catches[i] = b * (e ? *e : 0.0);
  }
  return out;
}

EvyResult evy(const GrowthModel& model, const ConstraintSet& constraints,
              const BiomassState& state0) {
  if (state0.size() != model.n_species()) {
    throw std::invalid_argument("evy: state0 has " +
                                std::to_string(state0.size()) +
                                " species, model has " +
                                std::to_string(model.n_species()));
  }
  const auto caps = equilibrium_catches(model, constraints);

  std::string violations;
  for (std::size_t i = 0; i < state0.size(); ++i) {
    if (state0[i] < constraints.min_biomass[i]) {
      violations += "; species " + std::to_string(i) + " initial biomass " +
                    fmt(state0[i]) + " < minimal biomass " +
                    fmt(constraints.min_biomass[i]);
    }
    const double next = state0[i] * model.growth_factor(i, state0, 0.0);
    if (next < constraints.min_biomass[i]) {
      violations += "; species " + std::to_string(i) +
                    " unharvested successor " + fmt(next) +
                    " < minimal biomass " + fmt(constraints.min_biomass[i]);
    }
  }
  if (!violations.empty()) {
    throw std::domain_error("evy: initial state inadmissible" + violations);
  }

  EvyResult out;
  out.evy.resize(state0.size());
  out.equilibrium_caps = caps.catches;
  out.binding_branch.resize(state0.size());

  for (std::size_t i = 0; i < state0.size(); ++i) {
    const double cap = caps.catches[i];
    if (cap <= 0.0) {
      out.evy[i] = 0.0;
      out.binding_branch[i] = EvyBranch::EquilibriumCapped;
      continue;
    }
    // cap > 0 requires B♭_i > 0 and hence state0_i > 0.
    auto successor = [&](double c) {
      return state0[i] * model.growth_factor(i, state0, c / state0[i]);
    };
    if (successor(cap) >= constraints.min_biomass[i]) {
      out.evy[i] = cap;
      out.binding_branch[i] = EvyBranch::EquilibriumCapped;
      continue;
    }
    const auto c = largest_in_range_at_least(successor, 0.0, cap,
                                             constraints.min_biomass[i]);
    // The precondition guarantees successor(0) >= B♭_i, so c is engaged.
    out.evy[i] = c ? *c : 0.0;
    out.binding_branch[i] = EvyBranch::InitialStateCapped;
  }
  return out;
}

namespace {

struct ScanBest {
  bool found = false;
  double catch_value = 0.0;
  BiomassState state;
  std::vector<double> efforts;
};

// Evaluate one effort vector: best objective-species equilibrium catch.
void consider(const GrowthModel& model, std::size_t objective,
              const std::vector<double>& efforts, const BiomassState& seed,
              ScanBest& best) {
  const EffortVector e{std::vector<double>(efforts)};
  for (const auto& eq : model.equilibria(e, seed)) {
    if (!(eq[objective] > 0.0)) continue;
    const double c = efforts[objective] * eq[objective];
    if (!best.found || c > best.catch_value) {
      best.found = true;
      best.catch_value = c;
      best.state = eq;
      best.efforts = efforts;
    }
  }
}

// Scan a box with `points` per dimension, updating `best`.
void scan_box(const GrowthModel& model, std::size_t objective,
              const std::vector<double>& lo, const std::vector<double>& hi,
              std::size_t points, const BiomassState& seed, ScanBest& best) {
  const std::size_t n = lo.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> efforts(n);
  while (true) {
    for (std::size_t d = 0; d < n; ++d) {
      const double t = points > 1 ? static_cast<double>(idx[d]) /
                                        static_cast<double>(points - 1)
                                  : 0.0;
      efforts[d] = lo[d] + t * (hi[d] - lo[d]);
    }
    consider(model, objective, efforts, seed, best);
    std::size_t d = n;
    while (d-- > 0) {
      if (++idx[d] < points) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

}  // namespace

std::vector<MsyResult> msy_multispecies(const GrowthModel& model,
                                        const ConstraintSet& constraints,
                                        const EffortBox& search_bounds,
                                        const MsyOptions& options) {
  const std::size_t n = model.n_species();
  if (search_bounds.lo.size() != n || search_bounds.hi.size() != n) {
    throw std::invalid_argument(
        "msy_multispecies: search bounds must cover every species");
  }
  if (constraints.size() != n) {
    throw std::invalid_argument(
        "msy_multispecies: constraints must cover every species");
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (!(search_bounds.lo[d] >= 0.0) ||
        !(search_bounds.hi[d] >= search_bounds.lo[d])) {
      throw std::invalid_argument(
          "msy_multispecies: effort bounds must satisfy 0 <= lo <= hi");
    }
  }
  BiomassState seed = options.seed;
  if (seed.size() == 0) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
      s[i] = std::max(constraints.min_biomass[i], 1.0);
    seed = BiomassState(std::move(s));
  }
  const std::size_t points = std::max<std::size_t>(options.grid_points, 2);
  const std::size_t refine_points = std::max<std::size_t>(options.refine_points, 3);

  std::vector<MsyResult> results(n);
  for (std::size_t objective = 0; objective < n; ++objective) {
    ScanBest best;
    scan_box(model, objective, search_bounds.lo, search_bounds.hi, points,
             seed, best);
    if (best.found) {
      std::vector<double> span(n);
      for (std::size_t d = 0; d < n; ++d) {
        span[d] = (search_bounds.hi[d] - search_bounds.lo[d]) /
                  static_cast<double>(points - 1);
      }
      for (int round = 0; round < options.refine_rounds; ++round) {
        std::vector<double> lo(n), hi(n);
        for (std::size_t d = 0; d < n; ++d) {
          lo[d] = std::max(search_bounds.lo[d], best.efforts[d] - span[d]);
          hi[d] = std::min(search_bounds.hi[d], best.efforts[d] + span[d]);
          span[d] = (hi[d] - lo[d]) / static_cast<double>(refine_points - 1);
        }
        scan_box(model, objective, lo, hi, refine_points, seed, best);
      }
    }

    MsyResult& r = results[objective];
    r.found = best.found;
    if (best.found) {
      r.msy = best.catch_value;
      r.equilibrium.state = best.state;
      r.equilibrium.efforts = EffortVector(best.efforts);
      r.viable = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (best.state[i] < constraints.min_biomass[i]) r.viable = false;
      }
    }
  }
  return results;
}

SchaeferMsy msy_schaefer(double R, double K) {
  if (!(std::isfinite(R) && R > 1.0)) {
    throw std::invalid_argument("msy_schaefer: R must be > 1, got " + fmt(R));
  }
  if (!(std::isfinite(K) && K > 0.0)) {
    throw std::invalid_argument("msy_schaefer: K must be > 0, got " + fmt(K));
  }
  SchaeferMsy out;
  out.msy = (R - 1.0) * K / 4.0;
  out.biomass = K / 2.0;
  out.effort = (R - 1.0) / 2.0;
  return out;
}

}  // namespace evy
