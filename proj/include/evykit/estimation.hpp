#pragma once

#include <array>
#include <vector>

#include "evykit/lotka_volterra.hpp"

// Fits LVParams to yearly biomass/catch records by minimizing a weighted
// residual squares sum (WRSS). The predicted trajectory starts at the first
// observed biomasses and advances the dynamics with the observed catches
// subtracted directly, so the prediction is self-contained given the data.

namespace evy {

struct ObservationSeries {
  std::vector<int> years;                         // strictly consecutive
  std::vector<std::array<double, 2>> biomass_obs; // tonnes, (prey, predator)
  std::vector<std::array<double, 2>> catch_obs;   // tonnes/year

  std::size_t size() const { return years.size(); }
  // Throws std::invalid_argument on shape/ordering/sign violations.
  void validate() const;
};

using Weights = std::vector<std::array<double, 2>>;

// 1 / mean(observed biomass)² per species, uniform over years — residuals of
// species with very different stock sizes then count comparably.
Weights default_weights(const ObservationSeries& series);

// Predicted biomasses: pred(0) = biomass_obs(0), then
//   y(t+1) = y(R − (R/κ)y − αz) − catch_obs_prey(t),  clamped at 0,
// and likewise for the predator. Params are taken as given (no invariant
// check): the optimizer must be free to probe the boundary.
std::vector<std::array<double, 2>> replay(const LVParams& params,
                                          const ObservationSeries& series);

// Σ_t Σ_i weights[t][i] (pred_i(t) − obs_i(t))²
double wrss(const LVParams& params, const ObservationSeries& series,
            const Weights& weights);

// Central-difference gradient of wrss with respect to the log-parameters
// (log R, log L, log K, log α, log β): each coordinate is probed at
// params_j × exp(±rel_step), i.e. a relative step of the parameter.
std::array<double, 5> wrss_gradient(const ObservationSeries& series,
                                    const Weights& weights,
                                    const LVParams& params, double rel_step);

struct FitConfig {
  Weights weights;  // empty → default_weights(series)
  LVParams initial_guess;
  int cg_max_iters = 500;
  double grad_step_rel = 1e-5;
  double converge_tol = 1e-10;  // relative objective decrease
  double grad_tol = 1e-8;       // sup norm of the log-space gradient
};

struct FitResult {
  LVParams params;
  double objective = 0.0;  // wrss(params), re-evaluated at the end
  std::vector<std::array<double, 2>> trajectory_pred;
  bool converged = false;
  int iterations = 0;  // accepted line searches
};

// Polak–Ribière nonlinear conjugate gradient on the 5 log-parameters with
// automatic restart on non-descent directions, backtracking line search with
// a sufficient-decrease test, and central-difference gradients. Throws
// std::invalid_argument when the initial guess violates the LVParams
// invariants or gives a non-finite objective.
FitResult fit(const ObservationSeries& series, const FitConfig& config);

}  // namespace evy
