#include "evykit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evy {

void ObservationSeries::validate() const {
  if (years.empty()) {
    throw std::invalid_argument("ObservationSeries: no records");
  }
  if (biomass_obs.size() != years.size() || catch_obs.size() != years.size()) {
    throw std::invalid_argument(
        "ObservationSeries: years, biomasses and catches must have equal "
        "lengths");
  }
  for (std::size_t t = 0; t + 1 < years.size(); ++t) {
    if (years[t + 1] != years[t] + 1) {
      throw std::invalid_argument(
          "ObservationSeries: years must be strictly consecutive, got " +
          std::to_string(years[t]) + " followed by " +
          std::to_string(years[t + 1]));
    }
  }
  for (std::size_t t = 0; t < years.size(); ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (!std::isfinite(biomass_obs[t][i]) || biomass_obs[t][i] < 0.0 ||
          !std::isfinite(catch_obs[t][i]) || catch_obs[t][i] < 0.0) {
        throw std::invalid_argument(
            "ObservationSeries: negative or non-finite record in year " +
            std::to_string(years[t]));
      }
    }
  }
}

Weights default_weights(const ObservationSeries& series) {
  series.validate();
  std::array<double, 2> mean{0.0, 0.0};
  for (const auto& b : series.biomass_obs) {
    mean[0] += b[0];
    mean[1] += b[1];
  }
  const auto n = static_cast<double>(series.size());
  Weights w(series.size());
  for (std::size_t i = 0; i < 2; ++i) {
    mean[i] /= n;
    if (!(mean[i] > 0.0)) {
      throw std::invalid_argument(
          "default_weights: species " + std::to_string(i) +
          " has zero mean observed biomass; provide explicit weights");
    }
  }
  for (auto& row : w) {
    row = {1.0 / (mean[0] * mean[0]), 1.0 / (mean[1] * mean[1])};
  }
  return w;
}

std::vector<std::array<double, 2>> replay(const LVParams& params,
                                          const ObservationSeries& series) {
  series.validate();
  std::vector<std::array<double, 2>> pred(series.size());
  pred[0] = series.biomass_obs[0];
  const double slope = params.R / params.kappa();
  for (std::size_t t = 0; t + 1 < series.size(); ++t) {
    const double y = pred[t][0];
    const double z = pred[t][1];
    const double y1 = y * (params.R - slope * y - params.alpha * z) -
                      series.catch_obs[t][0];
    const double z1 = z * (params.L + params.beta * y) - series.catch_obs[t][1];
    pred[t + 1] = {std::max(0.0, y1), std::max(0.0, z1)};
  }
  return pred;
}

double wrss(const LVParams& params, const ObservationSeries& series,
            const Weights& weights) {
  if (weights.size() != series.size()) {
    throw std::invalid_argument(
        "wrss: weights must have one row per observation year");
  }
  const auto pred = replay(params, series);
  double sum = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double r = pred[t][i] - series.biomass_obs[t][i];
      sum += weights[t][i] * r * r;
    }
  }
  return sum;
}

namespace {

using LogParams = std::array<double, 5>;  // log(R, L, K, alpha, beta)

LogParams to_log(const LVParams& p) {
  return {std::log(p.R), std::log(p.L), std::log(p.K), std::log(p.alpha),
          std::log(p.beta)};
}

LVParams from_log(const LogParams& t) {
  LVParams p;
  p.R = std::exp(t[0]);
  p.L = std::exp(t[1]);
  p.K = std::exp(t[2]);
  p.alpha = std::exp(t[3]);
  p.beta = std::exp(t[4]);
  return p;
}

double sup_norm(const LogParams& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::array<double, 5> wrss_gradient(const ObservationSeries& series,
                                    const Weights& weights,
                                    const LVParams& params, double rel_step) {
  if (!(rel_step > 0.0)) {
    throw std::invalid_argument("wrss_gradient: rel_step must be > 0");
  }
  const LogParams at = to_log(params);
  LogParams g{};
  for (std::size_t j = 0; j < 5; ++j) {
    LogParams hi = at, lo = at;
    hi[j] += rel_step;
    lo[j] -= rel_step;
    g[j] = (wrss(from_log(hi), series, weights) -
            wrss(from_log(lo), series, weights)) /
           (2.0 * rel_step);
  }
  return g;
}

FitResult fit(const ObservationSeries& series, const FitConfig& config) {
  series.validate();
  config.initial_guess.validate();
  if (config.cg_max_iters < 0) {
    throw std::invalid_argument("fit: cg_max_iters must be >= 0");
  }
  if (!(config.grad_step_rel > 0.0)) {
    throw std::invalid_argument("fit: grad_step_rel must be > 0");
  }
  Weights weights =
      config.weights.empty() ? default_weights(series) : config.weights;
  if (weights.size() != series.size()) {
    throw std::invalid_argument(
        "fit: weights must have one row per observation year");
  }
  for (const auto& row : weights) {
    if (!(row[0] >= 0.0) || !(row[1] >= 0.0)) {
      throw std::invalid_argument("fit: weights must be nonnegative");
    }
  }

  auto objective = [&](const LogParams& t) {
    return wrss(from_log(t), series, weights);
  };
  auto gradient = [&](const LogParams& t) {
    return wrss_gradient(series, weights, from_log(t), config.grad_step_rel);
  };

  LogParams x = to_log(config.initial_guess);
  double f = objective(x);
  if (!std::isfinite(f)) {
    throw std::invalid_argument(
        "fit: objective is not finite at the initial guess");
  }

  FitResult result;
  result.converged = false;
  result.iterations = 0;

  LogParams g = gradient(x);
  LogParams d;
  for (std::size_t j = 0; j < 5; ++j) d[j] = -g[j];

  if (sup_norm(g) <= config.grad_tol || f == 0.0) {
    result.converged = true;
  } else {
    double t_prev = 0.0;
    for (int iter = 0; iter < config.cg_max_iters; ++iter) {
      double gd = 0.0;
      for (std::size_t j = 0; j < 5; ++j) gd += g[j] * d[j];
      if (gd >= 0.0) {  // restart: not a descent direction
        for (std::size_t j = 0; j < 5; ++j) d[j] = -g[j];
        gd = 0.0;
        for (std::size_t j = 0; j < 5; ++j) gd -= g[j] * g[j];
        if (gd == 0.0) {
          result.converged = true;
          break;
        }
      }

      auto probe = [&](double t, LogParams& x_at) {
        for (std::size_t j = 0; j < 5; ++j) x_at[j] = x[j] + t * d[j];
        return objective(x_at);
      };

      const double dn = sup_norm(d);
      double t = t_prev > 0.0 ? std::min(1.0, 2.0 * t_prev)
                              : std::min(1.0, 1.0 / (1.0 + dn));
      bool accepted = false;
      double f_new = f;
      LogParams x_new = x;
      for (int restart = 0; restart < 2 && !accepted; ++restart) {
        LogParams x_try;
        for (int half = 0; half < 60; ++half) {
          const double f_try = probe(t, x_try);
          if (std::isfinite(f_try) && f_try <= f + 1e-4 * t * gd) {
            accepted = true;
            f_new = f_try;
            x_new = x_try;
            if (half == 0) {
              // The first trial already held: grow the step while the
              // sufficient-decrease bound keeps improving, so a collapsed
              // step size from an earlier iteration can recover.
              double t_big = t;
              for (int grow = 0; grow < 40; ++grow) {
                t_big *= 2.0;
                const double f_big = probe(t_big, x_try);
                if (!std::isfinite(f_big) ||
                    f_big > f + 1e-4 * t_big * gd || f_big >= f_new) {
                  break;
                }
                t = t_big;
                f_new = f_big;
                x_new = x_try;
              }
            }
            break;
          }
          t *= 0.5;
        }
        if (!accepted && restart == 0) {
          // steepest-descent retry from a fresh unit-scaled step
          for (std::size_t j = 0; j < 5; ++j) d[j] = -g[j];
          gd = 0.0;
          for (std::size_t j = 0; j < 5; ++j) gd -= g[j] * g[j];
          t = std::min(1.0, 1.0 / (1.0 + sup_norm(d)));
        }
      }
      if (!accepted) {
        // Even the pure gradient ray admits no measurable decrease: the
        // point is stationary at the resolution of the objective.
        result.converged = true;
        break;
      }

      const double f_old = f;
      x = x_new;
      f = f_new;
      t_prev = t;
      result.iterations = iter + 1;

      const LogParams g_new = gradient(x);
      if (sup_norm(g_new) <= config.grad_tol) {
        g = g_new;
        result.converged = true;
        break;
      }
      if (f_old - f <= config.converge_tol * std::max(1.0, std::abs(f_old))) {
        g = g_new;
        result.converged = true;
        break;
      }

      // Polak–Ribière+ update; the nonnegativity floor is the automatic
      // restart (beta = 0 falls back to steepest descent).
      double gg = 0.0, g_dot = 0.0, g_cross = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        gg += g[j] * g[j];
        g_dot += g_new[j] * g_new[j];
        g_cross += g_new[j] * g[j];
      }
      const double beta = std::max(0.0, (g_dot - g_cross) / gg);
      for (std::size_t j = 0; j < 5; ++j) d[j] = -g_new[j] + beta * d[j];
      g = g_new;
    }
  }

  result.params = from_log(x);
  result.objective = wrss(result.params, series, weights);
  result.trajectory_pred = replay(result.params, series);
  return result;
}

}  // namespace evy
