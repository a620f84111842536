#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "evykit/estimation.hpp"
#include "evykit/lotka_volterra.hpp"
#include "test_support.hpp"

using namespace evy;

namespace {

// Zero interaction coefficients decouple the two stocks, so every prediction
// follows a one-line recursion that can be checked by hand.  replay() and
// wrss() never validate parameters, which is what makes this usable.
LVParams decoupled_params() {
  LVParams p;
  p.R = 2.0;
  p.L = 0.875;  // dyadic, so predator arithmetic below is exact
  p.alpha = 0.0;
  p.beta = 0.0;
  p.K = 1000.0;  // kappa = 2000, R/kappa = 1e-3
  return p;
}

// Two years of data for the decoupled stocks.  Predictions: the prey factor is
// 2 - 1e-3*500 = 1.5, so y1 = 750 - 50 = 700 against an observation of 600
// (residual 100); the predator lands exactly on its observation, 82.5.
ObservationSeries two_year_series() {
  ObservationSeries s;
  s.years = {2000, 2001};
  s.biomass_obs = {{500.0, 100.0}, {600.0, 82.5}};
  s.catch_obs = {{50.0, 5.0}, {0.0, 0.0}};
  return s;
}

Weights unit_weights(std::size_t n) {
  return Weights(n, {1.0, 1.0});
}

// Runs the biomass recursion with catches taken as fixed fractions of the
// current stock, recording both series.  The update is written exactly like
// the replay recursion so the stored biomasses are bitwise reproducible.
ObservationSeries synthetic_series(
    const LVParams& params, double y0, double z0,
    const std::vector<std::array<double, 2>>& fractions) {
  ObservationSeries s;
  const double slope = params.R / params.kappa();
  double y = y0;
  double z = z0;
  for (std::size_t t = 0; t <= fractions.size(); ++t) {
    s.years.push_back(2000 + static_cast<int>(t));
    s.biomass_obs.push_back({y, z});
    const double cy = t < fractions.size() ? fractions[t][0] * y : 0.0;
    const double cz = t < fractions.size() ? fractions[t][1] * z : 0.0;
    s.catch_obs.push_back({cy, cz});
    const double y1 = y * (params.R - slope * y - params.alpha * z) - cy;
    const double z1 = z * (params.L + params.beta * y) - cz;
    y = std::max(0.0, y1);
    z = std::max(0.0, z1);
  }
  return s;
}

// A varied harvesting schedule: both growth factors sweep a wide range, so
// all five parameters leave a clear signature in the data.
std::vector<std::array<double, 2>> varied_fractions() {
  return {{0.25, 0.10}, {0.10, 0.30}, {0.40, 0.05}, {0.20, 0.35},
          {0.15, 0.40}, {0.30, 0.50}, {0.05, 0.50}, {0.10, 0.45},
          {0.20, 0.20}, {0.25, 0.10}};
}

LVParams perturbed_guess() {
  LVParams guess = evytest::reference_params();
  guess.R *= 1.15;
  guess.L *= 0.97;
  guess.alpha *= 1.2;
  guess.beta *= 0.8;
  guess.K *= 0.85;
  return guess;
}

}  // namespace

TEST_CASE("observation series validation") {
  ObservationSeries s;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("no records"),
                       std::invalid_argument);

  s = two_year_series();
  CHECK_NOTHROW(s.validate());

  SUBCASE("length mismatch") {
    s.catch_obs.pop_back();
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("equal lengths"),
                         std::invalid_argument);
  }
  SUBCASE("years must be consecutive") {
    s.years = {2000, 2002};
    CHECK_THROWS_WITH_AS(s.validate(),
                         doctest::Contains("strictly consecutive"),
                         std::invalid_argument);
  }
  SUBCASE("negative records") {
    s.biomass_obs[1][0] = -1.0;
    CHECK_THROWS_WITH_AS(s.validate(),
                         doctest::Contains("negative or non-finite"),
                         std::invalid_argument);
  }
  SUBCASE("non-finite records name the year") {
    s.catch_obs[1][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("in year 2001"),
                         std::invalid_argument);
  }
  SUBCASE("a single year is a valid series") {
    s.years = {2010};
    s.biomass_obs = {{5e6, 1e5}};
    s.catch_obs = {{0.0, 0.0}};
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("replay reproduces hand arithmetic for decoupled stocks") {
  const auto s = two_year_series();
  const auto pred = replay(decoupled_params(), s);

  REQUIRE(pred.size() == 2);
  // The first prediction is anchored at the first observed biomass.
  CHECK(pred[0][0] == 500.0);
  CHECK(pred[0][1] == 100.0);
  // y1 = 500*(2 - 1e-3*500) - 50 = 700; z1 = 100*0.875 - 5 = 82.5.
  CHECK(pred[1][0] == 700.0);
  CHECK(pred[1][1] == 82.5);
}

TEST_CASE("replay clamps an overfished stock at zero and keeps it there") {
  ObservationSeries s;
  s.years = {2000, 2001, 2002};
  s.biomass_obs = {{10.0, 100.0}, {0.0, 0.0}, {0.0, 0.0}};
  s.catch_obs = {{1000.0, 0.0}, {500.0, 0.0}, {0.0, 0.0}};

  const auto pred = replay(decoupled_params(), s);
  REQUIRE(pred.size() == 3);
  CHECK(pred[1][0] == 0.0);  // 10*(2 - 0.01) - 1000 < 0 clamps to zero
  CHECK(pred[2][0] == 0.0);  // and a further catch cannot resurrect it
  CHECK(pred[1][1] == 87.5);
  CHECK(pred[2][1] == 76.5625);
}

TEST_CASE("replay holds the reference fixed point under full-surplus catches") {
  // Catching exactly the equilibrium surplus every year keeps both stocks
  // pinned at their minimal biomasses.
  const std::size_t n = 5;
  ObservationSeries s;
  for (std::size_t t = 0; t < n; ++t) {
    s.years.push_back(static_cast<int>(t));
    s.biomass_obs.push_back({7e6, 2e5});
    s.catch_obs.push_back({evytest::kPreyCap, evytest::kPredCap});
  }

  const auto pred = replay(evytest::reference_params(), s);
  for (std::size_t t = 0; t < n; ++t) {
    CHECK(pred[t][0] == doctest::Approx(7e6).epsilon(1e-13));
    CHECK(pred[t][1] == doctest::Approx(2e5).epsilon(1e-13));
  }
  CHECK(wrss(evytest::reference_params(), s, default_weights(s)) <= 1e-24);
}

TEST_CASE("wrss weights each squared residual") {
  const auto p = decoupled_params();
  auto s = two_year_series();

  // Single residual of 100 t on the prey, weight one.
  CHECK(wrss(p, s, unit_weights(2)) == 10000.0);
  // Only the second row carries a residual, so the first row's weights are
  // irrelevant and the prey weight scales the objective linearly.
  CHECK(wrss(p, s, {{7.0, 9.0}, {2.0, 3.0}}) == 20000.0);
  // Observations equal to the predictions zero the objective exactly.
  s.biomass_obs[1] = {700.0, 82.5};
  CHECK(wrss(p, s, unit_weights(2)) == 0.0);

  CHECK_THROWS_WITH_AS(wrss(p, s, unit_weights(3)),
                       doctest::Contains("one row per observation year"),
                       std::invalid_argument);
}

TEST_CASE("default weights are inverse squared mean biomasses") {
  ObservationSeries s;
  s.years = {2000, 2001};
  s.biomass_obs = {{100.0, 10.0}, {300.0, 30.0}};
  s.catch_obs = {{0.0, 0.0}, {0.0, 0.0}};

  const auto w = default_weights(s);
  REQUIRE(w.size() == 2);
  for (const auto& row : w) {
    CHECK(row[0] == 1.0 / (200.0 * 200.0));
    CHECK(row[1] == 1.0 / (20.0 * 20.0));
  }

  for (auto& b : s.biomass_obs) b[1] = 0.0;
  CHECK_THROWS_WITH_AS(default_weights(s),
                       doctest::Contains("species 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(default_weights(s),
                       doctest::Contains("zero mean observed biomass"),
                       std::invalid_argument);
}

TEST_CASE("wrss vanishes on data generated by the model") {
  const auto params = evytest::reference_params();
  const auto s = synthetic_series(params, 1e7, 2.5e5, varied_fractions());
  REQUIRE(s.size() == 11);

  // The schedule was chosen to keep both stocks well away from collapse.
  for (const auto& b : s.biomass_obs) {
    REQUIRE(b[0] > 1e6);
    REQUIRE(b[1] > 1e5);
  }

  // The generator mirrors the replay recursion, so predictions match the
  // recorded biomasses bitwise and the objective is exactly zero.
  const auto pred = replay(params, s);
  for (std::size_t t = 0; t < s.size(); ++t) {
    CHECK(pred[t][0] == s.biomass_obs[t][0]);
    CHECK(pred[t][1] == s.biomass_obs[t][1]);
  }
  CHECK(wrss(params, s, default_weights(s)) == 0.0);
  CHECK(wrss(params, s, unit_weights(s.size())) == 0.0);
}

TEST_CASE("gradient matches the hand derivative on a decoupled series") {
  const auto p = decoupled_params();
  const auto s = two_year_series();
  const auto w = unit_weights(2);

  // With residual r = 100 on the prey only:
  //   d wrss / d log R = 2 r * R (y0 - y0^2/K)     = 2*100*2*250  = 100000
  //   d wrss / d log K = 2 r * (R-1) y0^2 / K      = 2*100*250    = 50000
  // The predator residual is zero, so the log L component vanishes to first
  // order, and the zero interaction coefficients stay zero under a log-space
  // perturbation, so those components are exactly zero.
  const auto g = wrss_gradient(s, w, p, 1e-7);
  CHECK(g[0] == doctest::Approx(100000.0).epsilon(1e-8));
  CHECK(g[2] == doctest::Approx(50000.0).epsilon(1e-8));
  CHECK(std::abs(g[1]) < 1e-4);
  CHECK(g[3] == 0.0);
  CHECK(g[4] == 0.0);

  CHECK_THROWS_WITH_AS(wrss_gradient(s, w, p, 0.0),
                       doctest::Contains("rel_step"), std::invalid_argument);
}

TEST_CASE("gradient is stable under step halving") {
  const auto s =
      synthetic_series(evytest::reference_params(), 1e7, 2.5e5,
                       varied_fractions());
  const auto w = default_weights(s);
  const auto guess = perturbed_guess();

  const auto coarse = wrss_gradient(s, w, guess, 1e-5);
  const auto fine = wrss_gradient(s, w, guess, 5e-6);
  for (std::size_t j = 0; j < 5; ++j) {
    CAPTURE(j);
    CHECK(coarse[j] == doctest::Approx(fine[j]).epsilon(1e-4));
  }
}

TEST_CASE("a one-record series has zero objective and gradient") {
  ObservationSeries s;
  s.years = {2010};
  s.biomass_obs = {{5e6, 1e5}};
  s.catch_obs = {{0.0, 0.0}};

  // replay anchors at the observation, so the fit problem is trivially flat.
  CHECK(wrss(evytest::reference_params(), s, unit_weights(1)) == 0.0);
  const auto g =
      wrss_gradient(s, unit_weights(1), evytest::reference_params(), 1e-5);
  for (double gj : g) CHECK(gj == 0.0);
}

TEST_CASE("fit recovers the generating parameters from clean data") {
  const auto truth = evytest::reference_params();
  const auto s = synthetic_series(truth, 1e7, 2.5e5, varied_fractions());
  const auto w = default_weights(s);

  FitConfig cfg;
  cfg.initial_guess = perturbed_guess();
  cfg.cg_max_iters = 2000;
  const double f0 = wrss(cfg.initial_guess, s, w);
  REQUIRE(f0 > 0.0);

  const auto r = fit(s, cfg);
  CHECK(r.converged);
  CHECK(r.iterations >= 1);
  CHECK(r.objective <= 1e-4 * f0);

  CHECK(r.params.R == doctest::Approx(truth.R).epsilon(0.05));
  CHECK(r.params.L == doctest::Approx(truth.L).epsilon(0.05));
  CHECK(r.params.alpha == doctest::Approx(truth.alpha).epsilon(0.05));
  CHECK(r.params.beta == doctest::Approx(truth.beta).epsilon(0.05));
  CHECK(r.params.K == doctest::Approx(truth.K).epsilon(0.05));

  // The reported objective and trajectory are re-evaluations at the fitted
  // parameters, nothing stale from the line search.
  CHECK(r.objective == wrss(r.params, s, w));
  CHECK(r.trajectory_pred == replay(r.params, s));
}

TEST_CASE("fit stops immediately at a stationary point") {
  const auto truth = evytest::reference_params();
  const auto s = synthetic_series(truth, 1e7, 2.5e5, varied_fractions());

  FitConfig cfg;
  cfg.initial_guess = truth;
  const auto r = fit(s, cfg);

  CHECK(r.converged);
  CHECK(r.iterations == 0);
  // The optimizer works on log parameters; the exp/log round trip may move
  // each parameter by an ulp, so "zero" here is zero to fifty decimal places
  // in the weighted units rather than bitwise.
  CHECK(r.objective <= 1e-18);
  CHECK(r.params.R == doctest::Approx(truth.R).epsilon(1e-12));
  CHECK(r.params.L == doctest::Approx(truth.L).epsilon(1e-12));
  CHECK(r.params.alpha == doctest::Approx(truth.alpha).epsilon(1e-12));
  CHECK(r.params.beta == doctest::Approx(truth.beta).epsilon(1e-12));
  CHECK(r.params.K == doctest::Approx(truth.K).epsilon(1e-12));
}

TEST_CASE("fit with a zero iteration budget reports no convergence") {
  const auto s = synthetic_series(evytest::reference_params(), 1e7, 2.5e5,
                                  varied_fractions());
  FitConfig cfg;
  cfg.initial_guess = perturbed_guess();
  cfg.cg_max_iters = 0;
  cfg.weights = unit_weights(s.size());

  const auto r = fit(s, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.params.R == doctest::Approx(cfg.initial_guess.R).epsilon(1e-12));
  CHECK(r.objective == wrss(r.params, s, cfg.weights));
  CHECK(r.objective ==
        doctest::Approx(wrss(cfg.initial_guess, s, cfg.weights)).epsilon(1e-9));
}

TEST_CASE("fit validates its configuration") {
  const auto s = synthetic_series(evytest::reference_params(), 1e7, 2.5e5,
                                  varied_fractions());
  FitConfig cfg;
  cfg.initial_guess = evytest::reference_params();

  SUBCASE("invalid initial guess") {
    cfg.initial_guess.R = 1.0;
    CHECK_THROWS_WITH_AS(fit(s, cfg), doctest::Contains("R must be > 1"),
                         std::invalid_argument);
  }
  SUBCASE("negative iteration budget") {
    cfg.cg_max_iters = -1;
    CHECK_THROWS_WITH_AS(fit(s, cfg), doctest::Contains("cg_max_iters"),
                         std::invalid_argument);
  }
  SUBCASE("nonpositive gradient step") {
    cfg.grad_step_rel = 0.0;
    CHECK_THROWS_WITH_AS(fit(s, cfg), doctest::Contains("grad_step_rel"),
                         std::invalid_argument);
  }
  SUBCASE("weights of the wrong length") {
    cfg.weights = unit_weights(3);
    CHECK_THROWS_WITH_AS(fit(s, cfg),
                         doctest::Contains("one row per observation year"),
                         std::invalid_argument);
  }
  SUBCASE("negative weights") {
    cfg.weights = unit_weights(s.size());
    cfg.weights[4][1] = -1.0;
    CHECK_THROWS_WITH_AS(fit(s, cfg), doctest::Contains("nonnegative"),
                         std::invalid_argument);
  }
  SUBCASE("overflowing objective at the guess") {
    // A finite but absurd R passes parameter validation yet sends the replay
    // to infinity, which the fit must refuse up front.
    cfg.initial_guess.R = 1e300;
    CHECK_THROWS_WITH_AS(fit(s, cfg),
                         doctest::Contains("not finite at the initial guess"),
                         std::invalid_argument);
  }
}
