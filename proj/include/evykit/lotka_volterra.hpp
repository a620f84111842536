#pragma once

#include <utility>

#include "evykit/ecosystem.hpp"

// Discrete-time predator–prey model with density dependence in the prey:
//
//   y(t+1) = y(t) [ R − (R/κ) y(t) − α z(t) − v(t) ]   (prey, index 0)
//   z(t+1) = z(t) [ L + β y(t) − w(t) ]                 (predator, index 1)
//
// κ is tied to the carrying capacity K by κ = R·K/(R−1): at z = 0, v = 0 the
// prey map has fixed point K.

namespace evy {

struct LVParams {
  double R;      // prey growth factor, /year
  double L;      // predator survival factor, /year
  double alpha;  // predation rate, 1/tonne
  double beta;   // conversion rate, 1/tonne
  double K;      // prey carrying capacity, tonnes

  // Derived, never stored: kappa = R K / (R − 1).
  double kappa() const { return R * K / (R - 1.0); }

  // Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

// Growth factors (R1, R2) at `state` under `efforts` = (v, w).
std::pair<double, double> lv_growth_factors(const LVParams& params,
                                            const BiomassState& state,
                                            const EffortVector& efforts);

class LotkaVolterraModel final : public GrowthModel {
 public:
  explicit LotkaVolterraModel(LVParams params);

  std::size_t n_species() const override { return 2; }

  double growth_factor(std::size_t i, const BiomassState& state,
                       double effort) const override;

  // Both factors are affine in own effort with slope −1, so the equation
  // R_i(state, e) = target has the unique root e = R_i(state, 0) − target.
  std::optional<double> effort_at_factor(std::size_t i,
                                         const BiomassState& state,
                                         double target) const override;

  // Closed-form equilibria under constant efforts (v, w): the origin, the
  // predator-free prey equilibrium, and the coexistence point when positive.
  std::vector<BiomassState> equilibria(const EffortVector& efforts,
                                       const BiomassState& seed) const override;

  const LVParams& params() const { return params_; }

 private:
  LVParams params_;
};

// True iff y0 ≥ y♭, z0 ≥ z♭, and y0(R − (R/κ)y0 − αz0) ≥ y♭ — the condition
// under which the closed-form guaranteed yields below are attainable from
// (y0, z0).
bool lv_viability_precondition(const LVParams& params,
                               const ConstraintSet& constraints,
                               const BiomassState& state0);

struct LvEvyResult {
  double evy_prey;       // tonnes/year
  double evy_predator;   // tonnes/year
  EvyBranch prey_branch; // which term of the prey min binds
};

// Closed-form ecosystem viable yields:
//   evy_prey = min{ y♭(R − (R/κ)y♭ − αz♭) − y♭ , y0(R − (R/κ)y0 − αz0) − y♭ }
//   evy_predator = z♭(L + βy♭ − 1)
// Requires lv_viability_precondition and, so that both yields are
// nonnegative, growth factors ≥ 1 at B♭ without harvesting
// (R − (R/κ)y♭ − αz♭ ≥ 1 and L + βy♭ ≥ 1); a species with a zero floor is
// exempt, its guaranteed yield being 0 regardless. Violations throw
// std::domain_error naming the failed inequality.
LvEvyResult lv_evy_closed_form(const LVParams& params,
                               const ConstraintSet& constraints,
                               const BiomassState& state0);

}  // namespace evy
