#include "evykit/lotka_volterra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace evy {

namespace {

void require_two_species(std::size_t n, const char* what) {
  if (n != 2) {
    throw std::invalid_argument(std::string(what) +
                                " expects 2 species, got " +
                                std::to_string(n));
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

void LVParams::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("LVParams: " + msg);
  };
  if (!(std::isfinite(R) && R > 1.0)) fail("R must be > 1, got " + fmt(R));
  if (!(std::isfinite(L) && L > 0.0 && L < 1.0))
    fail("L must be in (0, 1), got " + fmt(L));
  if (!(std::isfinite(alpha) && alpha > 0.0))
    fail("alpha must be > 0, got " + fmt(alpha));
  if (!(std::isfinite(beta) && beta > 0.0))
    fail("beta must be > 0, got " + fmt(beta));
  if (!(std::isfinite(K) && K > 0.0)) fail("K must be > 0, got " + fmt(K));
}

std::pair<double, double> lv_growth_factors(const LVParams& params,
                                            const BiomassState& state,
                                            const EffortVector& efforts) {
  require_two_species(state.size(), "lv_growth_factors state");
  require_two_species(efforts.size(), "lv_growth_factors efforts");
  const double y = state[0];
  const double z = state[1];
  const double r1 =
      params.R - (params.R / params.kappa()) * y - params.alpha * z - efforts[0];
  const double r2 = params.L + params.beta * y - efforts[1];
  return {r1, r2};
}

LotkaVolterraModel::LotkaVolterraModel(LVParams params) : params_(params) {
  params_.validate();
}

double LotkaVolterraModel::growth_factor(std::size_t i,
                                         const BiomassState& state,
                                         double effort) const {
  require_two_species(state.size(), "LotkaVolterraModel state");
  if (i >= 2) {
    throw std::invalid_argument("LotkaVolterraModel species index " +
                                std::to_string(i) + " out of range");
  }
  const double y = state[0];
  const double z = state[1];
  if (i == 0)
    return params_.R - (params_.R / params_.kappa()) * y - params_.alpha * z -
           effort;
  return params_.L + params_.beta * y - effort;
}

std::optional<double> LotkaVolterraModel::effort_at_factor(
    std::size_t i, const BiomassState& state, double target) const {
  return growth_factor(i, state, 0.0) - target;
}

std::vector<BiomassState> LotkaVolterraModel::equilibria(
    const EffortVector& efforts, const BiomassState& /*seed*/) const {
  require_two_species(efforts.size(), "LotkaVolterraModel equilibria");
  const double v = efforts[0];
  const double w = efforts[1];
  const double R = params_.R;
  const double kappa = params_.kappa();

  std::vector<BiomassState> out;
  out.push_back(BiomassState{0.0, 0.0});

  // Predator-free branch: z = 0, prey factor = 1.
  const double y_alone = kappa * (R - 1.0 - v) / R;
  if (y_alone > 0.0) out.push_back(BiomassState{y_alone, 0.0});

  // Coexistence: predator factor = 1 fixes y, prey factor = 1 then fixes z.
  const double y_co = (1.0 - params_.L + w) / params_.beta;
  if (y_co > 0.0) {
    const double z_co = (R - 1.0 - v - (R / kappa) * y_co) / params_.alpha;
    if (z_co > 0.0) out.push_back(BiomassState{y_co, z_co});
  }
  return out;
}

bool lv_viability_precondition(const LVParams& params,
                               const ConstraintSet& constraints,
                               const BiomassState& state0) {
  require_two_species(constraints.size(), "lv_viability_precondition");
  require_two_species(state0.size(), "lv_viability_precondition");
  const double y0 = state0[0];
  const double z0 = state0[1];
  if (y0 < constraints.min_biomass[0]) return false;
  if (z0 < constraints.min_biomass[1]) return false;
  const double next_floor =
      y0 * (params.R - (params.R / params.kappa()) * y0 - params.alpha * z0);
  return next_floor >= constraints.min_biomass[0];
}

LvEvyResult lv_evy_closed_form(const LVParams& params,
                               const ConstraintSet& constraints,
                               const BiomassState& state0) {
  require_two_species(constraints.size(), "lv_evy_closed_form");
  require_two_species(state0.size(), "lv_evy_closed_form");

  const double y_min = constraints.min_biomass[0];
  const double z_min = constraints.min_biomass[1];
  const double y0 = state0[0];
  const double z0 = state0[1];
  const double slope = params.R / params.kappa();

  auto fail = [](const std::string& msg) {
    throw std::domain_error("lv_evy_closed_form: " + msg);
  };

  if (y0 < y_min)
    fail("initial prey biomass " + fmt(y0) + " < minimal biomass " +
         fmt(y_min));
  if (z0 < z_min)
    fail("initial predator biomass " + fmt(z0) + " < minimal biomass " +
         fmt(z_min));
  const double y0_next = y0 * (params.R - slope * y0 - params.alpha * z0);
  if (y0_next < y_min)
    fail("unharvested prey successor " + fmt(y0_next) +
         " < minimal biomass " + fmt(y_min) + " (initial point too far out)");

  // A zero floor yields a zero sustainable catch whatever the factor, so the
  // factor conditions only bind for positive floors.
  const double prey_factor_floor = params.R - slope * y_min - params.alpha * z_min;
  if (y_min > 0.0 && prey_factor_floor < 1.0)
    fail("prey growth factor at minimal biomasses " + fmt(prey_factor_floor) +
         " < 1");
  const double pred_factor_floor = params.L + params.beta * y_min;
  if (z_min > 0.0 && pred_factor_floor < 1.0)
    fail("predator growth factor at minimal biomasses " +
         fmt(pred_factor_floor) + " < 1");

  const double equilibrium_term =
      y_min > 0.0 ? y_min * prey_factor_floor - y_min : 0.0;
  const double initial_term = y0_next - y_min;
  LvEvyResult out;
  if (equilibrium_term <= initial_term) {
    out.evy_prey = equilibrium_term;
    out.prey_branch = EvyBranch::EquilibriumCapped;
  } else {
    out.evy_prey = initial_term;
    out.prey_branch = EvyBranch::InitialStateCapped;
  }
  out.evy_predator = z_min * (pred_factor_floor - 1.0);
  return out;
}

}  // namespace evy
