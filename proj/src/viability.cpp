#include "evykit/viability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "evykit/rootfind.hpp"

namespace evy {

namespace {

void require_model_match(const GrowthModel& model,
                         const ConstraintSet& constraints) {
  if (constraints.size() != model.n_species()) {
    throw std::invalid_argument(
        "constraints cover " + std::to_string(constraints.size()) +
        " species, model has " + std::to_string(model.n_species()));
  }
}

}  // namespace

bool favorable_conditions(const GrowthModel& model,
                          const ConstraintSet& constraints) {
  require_model_match(model, constraints);
  BiomassState floor(constraints.min_biomass);
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const double b = constraints.min_biomass[i];
    const double c = constraints.min_catch[i];
    double effort = 0.0;
    if (b > 0.0) {
      effort = c / b;
    } else if (c > 0.0) {
      throw std::domain_error(
          "favorable_conditions: species " + std::to_string(i) +
          " has zero minimal biomass but positive minimal catch; the "
          "required effort is undefined");
    }
    if (model.growth_factor(i, floor, effort) < 1.0) return false;
  }
  return true;
}

AnalyticKernel::AnalyticKernel(const GrowthModel& model,
                               ConstraintSet constraints)
    : model_(&model), constraints_(std::move(constraints)) {
  if (!favorable_conditions(model, constraints_)) {
    throw std::domain_error(
        "AnalyticKernel: growth factors at the minimal biomasses under "
        "minimal-catch efforts fall below 1 (unfavorable conditions)");
  }
}

bool AnalyticKernel::contains(const BiomassState& state) const {
  if (state.size() != constraints_.size()) {
    throw std::invalid_argument("AnalyticKernel: state has " +
                                std::to_string(state.size()) +
                                " species, constraints cover " +
                                std::to_string(constraints_.size()));
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] < constraints_.min_biomass[i]) return false;
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double c = constraints_.min_catch[i];
    double effort = 0.0;
    if (state[i] > 0.0) {
      effort = c / state[i];
    } else if (c > 0.0) {
      return false;  // no effort can deliver a positive catch from nothing
    }
    const double successor = state[i] * model_->growth_factor(i, state, effort);
    if (successor < constraints_.min_biomass[i]) return false;
  }
  return true;
}

ViableControlBox viable_control_box(const AnalyticKernel& kernel,
                                    const BiomassState& state) {
  if (!kernel.contains(state)) {
    throw std::domain_error(
        "viable_control_box: state is outside the viability kernel");
  }
  const auto& constraints = kernel.constraints();
  const GrowthModel& model = kernel.model();
  const std::size_t n = state.size();

  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(state[i] > 0.0)) {
      throw std::domain_error("viable_control_box: species " +
                              std::to_string(i) +
                              " has zero biomass; efforts are undefined");
    }
    lower[i] = constraints.min_catch[i] / state[i];
    auto f = [&, i](double e) {
      return state[i] * model.growth_factor(i, state, e);
    };
    auto up = largest_arg_at_least(f, lower[i], constraints.min_biomass[i]);
    // Membership guarantees f(lower) >= floor, so the bracket always exists.
    upper[i] = up ? *up : lower[i];
  }

  ViableControlBox box;
  box.lower = EffortVector(std::move(lower));
  box.upper = EffortVector(std::move(upper));
  const AnalyticKernel* k = &kernel;
  BiomassState at = state;
  box.successor_filter = [k, at](const EffortVector& efforts) {
    return k->contains(step(k->model(), at, efforts));
  };
  return box;
}

std::size_t GridGeometry::cell_count() const {
  std::size_t n = 1;
  for (std::size_t c : cells) n *= c;
  return n;
}

double GridGeometry::width(std::size_t d) const {
  return (bounds[d][1] - bounds[d][0]) / static_cast<double>(cells[d]);
}

double GridGeometry::center(std::size_t d, std::size_t idx) const {
  return bounds[d][0] + (static_cast<double>(idx) + 0.5) * width(d);
}

std::optional<std::size_t> GridGeometry::locate(std::size_t d, double x) const {
  if (x < bounds[d][0] || x > bounds[d][1]) return std::nullopt;
  if (x == bounds[d][1]) return cells[d] - 1;  // closed upper edge
  const auto idx =
      static_cast<std::size_t>((x - bounds[d][0]) / width(d));
  return std::min(idx, cells[d] - 1);
}

std::size_t GridGeometry::flatten(const std::vector<std::size_t>& idx) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dims(); ++d) flat = flat * cells[d] + idx[d];
  return flat;
}

std::vector<std::size_t> GridGeometry::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(dims());
  for (std::size_t d = dims(); d-- > 0;) {
    idx[d] = flat % cells[d];
    flat /= cells[d];
  }
  return idx;
}

BiomassState GridGeometry::center_state(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::vector<double> x(dims());
  for (std::size_t d = 0; d < dims(); ++d) x[d] = center(d, idx[d]);
  return BiomassState(std::move(x));
}

void GridGeometry::validate() const {
  if (bounds.size() != cells.size() || cells.empty()) {
    throw std::invalid_argument("GridGeometry: bounds/cells size mismatch");
  }
  for (std::size_t d = 0; d < dims(); ++d) {
    if (cells[d] < 2) {
      throw std::invalid_argument(
          "GridGeometry: need at least 2 cells per dimension, got " +
          std::to_string(cells[d]));
    }
    if (!(bounds[d][1] > bounds[d][0])) {
      throw std::invalid_argument(
          "GridGeometry: upper bound must exceed lower bound in dimension " +
          std::to_string(d));
    }
  }
}

namespace {

// One backward-induction sweep: keep the member cells whose center admits an
// acceptable sampled effort sending the successor into `current`.
std::vector<std::uint8_t> induction_step(const GrowthModel& model,
                                         const ConstraintSet& constraints,
                                         const GridGeometry& geom,
                                         const std::vector<std::uint8_t>& current,
                                         std::size_t interior_samples) {
  const std::size_t n = model.n_species();
  std::vector<std::uint8_t> next(current.size(), 0);
  std::vector<std::vector<std::size_t>> succ_idx(n);

  for (std::size_t flat = 0; flat < current.size(); ++flat) {
    if (!current[flat]) continue;
    const BiomassState x = geom.center_state(flat);

    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      succ_idx[i].clear();
      double lower = 0.0;
      if (x[i] > 0.0) {
        lower = constraints.min_catch[i] / x[i];
      } else if (constraints.min_catch[i] > 0.0) {
        ok = false;
        break;
      }
      auto f = [&](double e) { return x[i] * model.growth_factor(i, x, e); };
      const auto upper =
          largest_arg_at_least(f, lower, constraints.min_biomass[i]);
      if (!upper) {
        ok = false;
        break;
      }
      for (std::size_t s = 0; s <= interior_samples + 1; ++s) {
        const double t =
            static_cast<double>(s) / static_cast<double>(interior_samples + 1);
        const double e = lower + t * (*upper - lower);
        const double raw = x[i] * model.growth_factor(i, x, e);
        const auto cell = geom.locate(i, std::max(0.0, raw));
        if (!cell) continue;  // left the grid: counts as non-member
        if (std::find(succ_idx[i].begin(), succ_idx[i].end(), *cell) ==
            succ_idx[i].end()) {
          succ_idx[i].push_back(*cell);
        }
      }
      if (succ_idx[i].empty()) ok = false;
    }
    if (!ok) continue;

    // Efforts act independently per species, so any combination of per-species
    // successor cells is reachable; search the cross product for a member.
    std::vector<std::size_t> pick(n, 0);
    bool found = false;
    while (!found) {
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = succ_idx[i][pick[i]];
      if (current[geom.flatten(idx)]) {
        found = true;
        break;
      }
      std::size_t d = n;
      while (d-- > 0) {
        if (++pick[d] < succ_idx[d].size()) break;
        pick[d] = 0;
        if (d == 0) goto exhausted;
      }
    }
  exhausted:
    next[flat] = found ? 1 : 0;
  }
  return next;
}

}  // namespace

KernelGrid::KernelGrid(GridGeometry geometry,
                       std::vector<std::vector<std::uint8_t>> layers,
                       int stationary_iteration)
    : geometry_(std::move(geometry)),
      layers_(std::move(layers)),
      stationary_iteration_(stationary_iteration) {}

const std::vector<std::uint8_t>& KernelGrid::layer(std::size_t k) const {
  return layers_.at(k);
}

const std::vector<std::uint8_t>& KernelGrid::final_layer() const {
  return layers_.back();
}

int KernelGrid::first_excluded(std::size_t flat_index) const {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (!layers_[k][flat_index]) return static_cast<int>(k);
  }
  return -1;
}

std::size_t KernelGrid::member_count(std::size_t k) const {
  const auto& l = layers_.at(k);
  return static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));
}

bool KernelGrid::contains(const BiomassState& state) const {
  std::vector<std::size_t> idx(geometry_.dims());
  for (std::size_t d = 0; d < geometry_.dims(); ++d) {
    const auto c = geometry_.locate(d, state[d]);
    if (!c) return false;
    idx[d] = *c;
  }
  return final_layer()[geometry_.flatten(idx)] != 0;
}

void KernelGrid::export_csv(std::ostream& os) const {
  if (geometry_.dims() != 2) {
    throw std::invalid_argument(
        "KernelGrid::export_csv supports two-species grids only");
  }
  os << "i,j,y_center,z_center,layer_first_excluded\n";
  char buf[64];
  for (std::size_t i = 0; i < geometry_.cells[0]; ++i) {
    for (std::size_t j = 0; j < geometry_.cells[1]; ++j) {
      const std::size_t flat = geometry_.flatten({i, j});
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%d\n", i, j,
                    geometry_.center(0, i), geometry_.center(1, j),
                    first_excluded(flat));
      os << buf;
    }
  }
}

KernelGrid grid_kernel(const GrowthModel& model,
                       const ConstraintSet& constraints,
                       const GridGeometry& geometry, std::size_t max_iters,
                       const GridOptions& options) {
  geometry.validate();
  require_model_match(model, constraints);
  if (geometry.dims() != model.n_species()) {
    throw std::invalid_argument("grid_kernel: grid has " +
                                std::to_string(geometry.dims()) +
                                " dimensions, model has " +
                                std::to_string(model.n_species()) + " species");
  }

  const std::size_t n_cells = geometry.cell_count();
  std::vector<std::uint8_t> layer0(n_cells, 0);
  for (std::size_t flat = 0; flat < n_cells; ++flat) {
    const BiomassState x = geometry.center_state(flat);
    bool ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < constraints.min_biomass[i] ||
          (x[i] == 0.0 && constraints.min_catch[i] > 0.0)) {
        ok = false;
        break;
      }
    }
    layer0[flat] = ok ? 1 : 0;
  }

  std::vector<std::vector<std::uint8_t>> layers{std::move(layer0)};
  int stationary = -1;
  for (std::size_t k = 1; k <= max_iters; ++k) {
    auto next = induction_step(model, constraints, geometry, layers.back(),
                               options.effort_samples);
    const bool fixed = (next == layers.back());
    layers.push_back(std::move(next));
    if (fixed) {
      stationary = static_cast<int>(k);
      break;
    }
  }
  return KernelGrid(geometry, std::move(layers), stationary);
}

bool is_viability_domain(const GrowthModel& model,
                         const ConstraintSet& constraints,
                         const GridGeometry& geometry,
                         const std::vector<std::uint8_t>& members,
                         const GridOptions& options) {
  geometry.validate();
  require_model_match(model, constraints);
  if (members.size() != geometry.cell_count()) {
    throw std::invalid_argument(
        "is_viability_domain: member flags do not match the grid size");
  }
  const auto next = induction_step(model, constraints, geometry, members,
                                   options.effort_samples);
  return next == members;
}

GridGeometry lv_default_geometry(double R, double K, double alpha,
                                 std::size_t cells_per_dim) {
  const double kappa = R * K / (R - 1.0);
  GridGeometry geom;
  geom.bounds = {{0.0, 1.2 * kappa}, {0.0, 1.2 * (R - 1.0) / alpha}};
  geom.cells = {cells_per_dim, cells_per_dim};
  return geom;
}

}  // namespace evy
