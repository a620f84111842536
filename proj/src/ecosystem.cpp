#include "evykit/ecosystem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evy {

namespace {

void require_nonneg_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      throw std::invalid_argument(std::string(what) + "[" +
                                  std::to_string(i) +
                                  "] must be finite and >= 0, got " +
                                  std::to_string(v[i]));
    }
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string("dimension mismatch in ") + what +
                                ": " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

BiomassState::BiomassState(std::vector<double> b) : biomass(std::move(b)) {
  require_nonneg_finite(biomass, "biomass");
}

BiomassState::BiomassState(std::initializer_list<double> b)
    : BiomassState(std::vector<double>(b)) {}

EffortVector::EffortVector(std::vector<double> e) : effort(std::move(e)) {
  require_nonneg_finite(effort, "effort");
}

EffortVector::EffortVector(std::initializer_list<double> e)
    : EffortVector(std::vector<double>(e)) {}

ConstraintSet::ConstraintSet(std::vector<double> b_min,
                             std::vector<double> c_min)
    : min_biomass(std::move(b_min)), min_catch(std::move(c_min)) {
  require_same_size(min_biomass.size(), min_catch.size(), "ConstraintSet");
  require_nonneg_finite(min_biomass, "min_biomass");
  require_nonneg_finite(min_catch, "min_catch");
}

std::optional<double> GrowthModel::effort_at_factor(std::size_t,
                                                    const BiomassState&,
                                                    double) const {
  return std::nullopt;
}

std::vector<BiomassState> GrowthModel::equilibria(
    const EffortVector& efforts, const BiomassState& seed) const {
  require_same_size(efforts.size(), n_species(), "equilibria");
  require_same_size(seed.size(), n_species(), "equilibria seed");

  const std::size_t n = n_species();
  const double damping = 0.5;
  const int max_sweeps = 2000;

  auto relax = [&](BiomassState x) -> std::optional<BiomassState> {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      // Residual scaled per species: stocks of very different magnitude must
      // each sit on their own fixed point, not hide under the largest one.
      double residual = 0.0;
      BiomassState next = x;
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double target =
            xi > 0.0 ? xi * growth_factor(i, x, efforts[i]) : 0.0;
        const double clamped = std::max(0.0, target);
        residual =
            std::max(residual, std::abs(clamped - xi) / (1.0 + std::abs(xi)));
        next[i] = (1.0 - damping) * xi + damping * clamped;
      }
      if (residual <= 1e-12) {
        return x;
      }
      x = next;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return std::nullopt;
        if (x[i] < 0.0) x[i] = 0.0;
      }
    }
    return std::nullopt;
  };

  std::vector<BiomassState> found;
  auto add_unique = [&](const BiomassState& x) {
    for (const auto& y : found) {
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        diff = std::max(diff, std::abs(x[i] - y[i]) / (1.0 + std::abs(y[i])));
      if (diff <= 1e-6) return;
    }
    found.push_back(x);
  };

  // One run from the seed, plus runs with single species knocked out, plus
  // the origin (always an equilibrium of a multiplicative update).
  std::vector<BiomassState> starts{seed};
  for (std::size_t i = 0; i < n; ++i) {
    BiomassState s = seed;
    s[i] = 0.0;
    starts.push_back(s);
  }
  for (auto& s : starts) {
    if (auto eq = relax(std::move(s))) add_unique(*eq);
  }
  add_unique(BiomassState(std::vector<double>(n, 0.0)));
  return found;
}

BiomassState step(const GrowthModel& model, const BiomassState& state,
                  const EffortVector& efforts, bool* extinction_event) {
  require_same_size(state.size(), model.n_species(), "step state");
  require_same_size(efforts.size(), model.n_species(), "step efforts");

  bool extinct = false;
  BiomassState next = state;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double factor = model.growth_factor(i, state, efforts[i]);
    const double raw = state[i] * factor;
    if (state[i] > 0.0 && factor < 0.0) extinct = true;
    next[i] = std::max(0.0, raw);
  }
  if (extinction_event) *extinction_event = extinct;
  return next;
}

std::vector<double> catches(const BiomassState& state,
                            const EffortVector& efforts) {
  require_same_size(state.size(), efforts.size(), "catches");
  std::vector<double> c(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) c[i] = efforts[i] * state[i];
  return c;
}

bool check_acceptable(const BiomassState& state, const EffortVector& efforts,
                      const ConstraintSet& constraints) {
  require_same_size(state.size(), constraints.size(), "check_acceptable");
  require_same_size(efforts.size(), constraints.size(), "check_acceptable");
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < constraints.min_biomass[i]) return false;
    if (efforts[i] * state[i] < constraints.min_catch[i]) return false;
  }
  return true;
}

}  // namespace evy
