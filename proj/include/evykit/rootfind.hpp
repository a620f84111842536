#pragma once

#include <cmath>
#include <optional>

namespace evy {

struct BisectOptions {
  double abs_tol = 1e-9;
  int max_iters = 200;
};

// Largest x >= lo with f(x) >= target, for f continuous and nonincreasing on
// [lo, ∞) with limit below target (the "nice" tail). Brackets by doubling
// the offset from lo until f drops below target, then bisects. Returns the
// end of the final bracket where f >= target still holds, so the caller can
// rely on f(result) >= target as evaluated. nullopt when already f(lo) <
// target. If f never drops below target within ~2^200 of lo the argument is
// treated as unbounded and the last probed point is returned.
template <class F>
std::optional<double> largest_arg_at_least(F&& f, double lo, double target,
                                           BisectOptions opt = {}) {
  if (!(f(lo) >= target)) return std::nullopt;
  double step = std::max(1.0, std::abs(lo));
  double good = lo;
  double bad = lo + step;
  for (int doublings = 0; f(bad) >= target; ++doublings) {
    if (doublings >= 200) return bad;
    good = bad;
    step *= 2.0;
    bad = lo + step;
  }
  for (int it = 0; it < opt.max_iters && bad - good > opt.abs_tol; ++it) {
    const double mid = 0.5 * (good + bad);
    if (!(mid > good && mid < bad)) break;
    if (f(mid) >= target)
      good = mid;
    else
      bad = mid;
  }
  return good;
}

// Largest x in [lo, hi] with f(x) >= target, same monotonicity contract.
// Returns hi when f(hi) >= target; nullopt when even f(lo) < target.
template <class F>
std::optional<double> largest_in_range_at_least(F&& f, double lo, double hi,
                                                double target,
                                                BisectOptions opt = {}) {
  if (f(hi) >= target) return hi;
  if (!(f(lo) >= target)) return std::nullopt;
  double good = lo;
  double bad = hi;
  for (int it = 0; it < opt.max_iters && bad - good > opt.abs_tol; ++it) {
    const double mid = 0.5 * (good + bad);
    if (!(mid > good && mid < bad)) break;
    if (f(mid) >= target)
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace evy
