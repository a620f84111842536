#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

// Core vocabulary for harvested multispecies ecosystems in discrete time.
//
// The population update is multiplicative: each species i evolves as
//   x_i(t+1) = x_i(t) * R_i(x(t), e_i(t))
// where R_i is the growth factor supplied by a GrowthModel and e_i is the
// harvesting effort (fraction of current biomass removed as catch, so the
// catch of species i is e_i * x_i).

namespace evy {

// Biomass vector, one nonnegative entry per species (tonnes).
struct BiomassState {
  std::vector<double> biomass;

  BiomassState() = default;
  explicit BiomassState(std::vector<double> b);
  BiomassState(std::initializer_list<double> b);

  std::size_t size() const { return biomass.size(); }
  double operator[](std::size_t i) const { return biomass[i]; }
  double& operator[](std::size_t i) { return biomass[i]; }

  bool operator==(const BiomassState&) const = default;
};

// Harvesting effort vector, one nonnegative rate per species (1/year).
struct EffortVector {
  std::vector<double> effort;

  EffortVector() = default;
  explicit EffortVector(std::vector<double> e);
  EffortVector(std::initializer_list<double> e);

  std::size_t size() const { return effort.size(); }
  double operator[](std::size_t i) const { return effort[i]; }
  double& operator[](std::size_t i) { return effort[i]; }

  bool operator==(const EffortVector&) const = default;
};

// Sustainability thresholds: biomass floors B♭ and catch floors C♭,
// one pair per species. All entries are nonnegative.
struct ConstraintSet {
  std::vector<double> min_biomass;
  std::vector<double> min_catch;

  ConstraintSet() = default;
  ConstraintSet(std::vector<double> b_min, std::vector<double> c_min);

  std::size_t size() const { return min_biomass.size(); }
};

// Which cap binds a guaranteed-yield computation for one species.
enum class EvyBranch {
  EquilibriumCapped,   // the stay-above-the-floor equilibrium cap binds
  InitialStateCapped,  // the first-transition cap from the initial state binds
};

// Growth-factor interface. Implementations must be "nice": R_i is continuous
// in (state, effort), nonincreasing in own effort, and tends to a limit <= 0
// as own effort grows without bound.
class GrowthModel {
 public:
  virtual ~GrowthModel() = default;

  virtual std::size_t n_species() const = 0;

  // Growth factor of species i at `state` when species i is harvested with
  // rate `effort` (other efforts do not enter R_i by assumption).
  virtual double growth_factor(std::size_t i, const BiomassState& state,
                               double effort) const = 0;

  // Optional exact inverse: the largest effort e with R_i(state, e) = target,
  // for models where that equation has a closed form. Returns nullopt when no
  // closed form is available; callers then fall back to bracketing/bisection.
  virtual std::optional<double> effort_at_factor(std::size_t i,
                                                 const BiomassState& state,
                                                 double target) const;

  // All nonnegative equilibria of x_i = x_i * R_i(x, e_i) under the given
  // efforts. The default is a damped fixed-point iteration started from
  // `seed` and from `seed` with single species zeroed out; models with
  // closed-form equilibria should override.
  virtual std::vector<BiomassState> equilibria(const EffortVector& efforts,
                                               const BiomassState& seed) const;
};

// One synchronous update x_i <- x_i * R_i(x, e_i), clamped at zero.
// If `extinction_event` is non-null it is set to true when some species had
// positive biomass but a negative growth factor (biomass driven to zero).
BiomassState step(const GrowthModel& model, const BiomassState& state,
                  const EffortVector& efforts,
                  bool* extinction_event = nullptr);

// Instantaneous catches c_i = e_i * x_i.
std::vector<double> catches(const BiomassState& state,
                            const EffortVector& efforts);

// True when state and catches clear the floors: x_i >= B♭_i and
// e_i * x_i >= C♭_i for every species.
bool check_acceptable(const BiomassState& state, const EffortVector& efforts,
                      const ConstraintSet& constraints);

}  // namespace evy
