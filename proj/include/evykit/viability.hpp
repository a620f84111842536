#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "evykit/ecosystem.hpp"

// Viability machinery: states from which some harvesting path keeps every
// species above its biomass floor while every catch floor is met, forever.
//
// Two routes are provided. The analytic route characterizes kernel
// membership directly from the growth factors under favorable conditions.
// The grid route runs the general decreasing induction
//   V_0 = {states above the biomass floors},
//   V_{k+1} = {x in V_k : some acceptable effort sends x into V_k},
// on a rectangular grid until the layers stop shrinking.

namespace evy {

// True iff R_i(B♭, C♭_i/B♭_i) >= 1 for every species (effort taken as 0
// where B♭_i = C♭_i = 0). Throws std::domain_error when some B♭_i = 0 with
// C♭_i > 0 (the required effort is undefined).
bool favorable_conditions(const GrowthModel& model,
                          const ConstraintSet& constraints);

// Membership test for the viability kernel under favorable conditions:
// state is viable iff it clears the biomass floors and, for each species,
// harvesting just the catch floor keeps the successor above the floor.
// Holds a non-owning reference to the model; keep the model alive as long as
// the kernel (and any ViableControlBox derived from it) is in use.
class AnalyticKernel {
 public:
  // Throws std::domain_error unless favorable_conditions(model, constraints).
  AnalyticKernel(const GrowthModel& model, ConstraintSet constraints);

  bool contains(const BiomassState& state) const;

  const GrowthModel& model() const { return *model_; }
  const ConstraintSet& constraints() const { return constraints_; }

 private:
  const GrowthModel* model_;
  ConstraintSet constraints_;
};

inline bool analytic_kernel_membership(const AnalyticKernel& kernel,
                                       const BiomassState& state) {
  return kernel.contains(state);
}

// Per-species interval of viable efforts at a kernel state: lower delivers
// exactly the catch floor, upper is the largest effort that still keeps the
// species at or above its biomass floor one step ahead.
struct ViableControlBox {
  EffortVector lower;
  EffortVector upper;
  // Accepts efforts whose successor state is again in the kernel.
  std::function<bool(const EffortVector&)> successor_filter;
};

// Throws std::domain_error when state is outside the kernel or some
// component is zero. Upper bounds are found by bracketing and bisection
// (abs_tol 1e-9 on effort), so f(upper) >= floor holds as evaluated.
ViableControlBox viable_control_box(const AnalyticKernel& kernel,
                                    const BiomassState& state);

// Rectangular grid over the state space; cell membership is decided at cell
// centers and successors map to the cell containing them (states outside the
// bounds belong to no cell).
struct GridGeometry {
  std::vector<std::array<double, 2>> bounds;  // per-dimension [lo, hi]
  std::vector<std::size_t> cells;             // per-dimension resolution

  std::size_t dims() const { return cells.size(); }
  std::size_t cell_count() const;
  double width(std::size_t d) const;
  double center(std::size_t d, std::size_t idx) const;
  // Index of the cell containing x along dimension d; the upper bound is
  // closed (x == hi falls in the last cell). nullopt outside [lo, hi].
  std::optional<std::size_t> locate(std::size_t d, double x) const;
  std::size_t flatten(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  BiomassState center_state(std::size_t flat) const;

  void validate() const;  // >= 2 cells per dimension, hi > lo
};

struct GridOptions {
  std::size_t effort_samples = 32;  // interior points per species interval
};

// Decreasing layers V_0 ⊇ V_1 ⊇ … over a grid, as produced by grid_kernel.
class KernelGrid {
 public:
  KernelGrid(GridGeometry geometry, std::vector<std::vector<std::uint8_t>> layers,
             int stationary_iteration);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<std::uint8_t>& layer(std::size_t k) const;
  const std::vector<std::uint8_t>& final_layer() const;

  // Iteration index k at which V_k equalled V_{k-1}; -1 when the induction
  // stopped at max_iters without stabilizing.
  int stationary_iteration() const { return stationary_iteration_; }

  // Smallest k with cell ∉ V_k, or -1 if the cell is in the final layer.
  int first_excluded(std::size_t flat_index) const;

  std::size_t member_count(std::size_t k) const;
  // True iff the cell containing state is a member of the final layer.
  bool contains(const BiomassState& state) const;

  // Two-species export: `i,j,y_center,z_center,layer_first_excluded`.
  void export_csv(std::ostream& os) const;

 private:
  GridGeometry geometry_;
  std::vector<std::vector<std::uint8_t>> layers_;
  int stationary_iteration_;
};

// Grid viability-kernel induction. Layer 0 keeps the cells whose center
// clears the biomass floors; each following layer keeps the cells with some
// acceptable sampled effort whose successor cell is in the previous layer.
// Stops when a layer repeats (that layer approximates the kernel) or after
// max_iters inductions. An empty layer 0 yields an empty kernel, not an
// error.
KernelGrid grid_kernel(const GrowthModel& model,
                       const ConstraintSet& constraints,
                       const GridGeometry& geometry, std::size_t max_iters,
                       const GridOptions& options = {});

// One induction step applied to `members`: true iff the set maps into
// itself, i.e. every member cell admits an acceptable effort whose successor
// cell is again a member (weak invariance on the grid).
bool is_viability_domain(const GrowthModel& model,
                         const ConstraintSet& constraints,
                         const GridGeometry& geometry,
                         const std::vector<std::uint8_t>& members,
                         const GridOptions& options = {});

// Default LV grid: [0, 1.2κ] × [0, 1.2(R−1)/α] at 200×200 — covers every
// state reachable from the positive orthant after one transient step.
GridGeometry lv_default_geometry(double R, double K, double alpha,
                                 std::size_t cells_per_dim = 200);

}  // namespace evy
