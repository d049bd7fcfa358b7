#include "bdf/momentum_grid.hpp"

#include <algorithm>
#include <string>

#include "bdf/errors.hpp"

namespace bdf {

void GridSpec::validate() const {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw ConfigError("grid cutoff must be positive, got " + std::to_string(cutoff));
  if (points_per_axis < 4 || points_per_axis % 2 != 0)
    throw ConfigError("points_per_axis must be even and >= 4, got " +
                      std::to_string(points_per_axis));
}

namespace {

// Twice the lattice coordinate in units of δ/2, centred on the origin.
int doubled_offset(int c, const GridSpec& spec) noexcept {
  return spec.offset ? 2 * c + 1 - spec.points_per_axis : 2 * c - spec.points_per_axis;
}

}  // namespace

MomentumGrid::MomentumGrid(const GridSpec& spec, std::vector<LatticeCoord> coords)
    : spec_(spec),
      spacing_(spec.spacing()),
      axis_(spec.offset ? spec.points_per_axis : spec.points_per_axis + 1),
      coords_(std::move(coords)),
      lookup_(static_cast<std::size_t>(axis_) * axis_, -1) {
  points_.reserve(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const auto c = coords_[i];
    if (c.x < 0 || c.y < 0 || c.x >= axis_ || c.y >= axis_ || !in_disk(c))
      throw ConfigError("lattice site outside the cutoff disk");
    auto& slot = lookup_[static_cast<std::size_t>(c.y) * axis_ + c.x];
    if (slot >= 0) throw ConfigError("duplicate lattice site in grid");
    slot = static_cast<int>(i);
    points_.push_back(momentum_of(c));
  }
}

MomentumGrid MomentumGrid::from_coordinates(const GridSpec& spec,
                                            std::vector<LatticeCoord> coords) {
  spec.validate();
  return MomentumGrid(spec, std::move(coords));
}

Momentum MomentumGrid::momentum_of(LatticeCoord c) const noexcept {
  const double unit = spec_.cutoff / spec_.points_per_axis;
  return {doubled_offset(c.x, spec_) * unit, doubled_offset(c.y, spec_) * unit};
}

bool MomentumGrid::in_disk(LatticeCoord c) const noexcept {
  const long a = doubled_offset(c.x, spec_);
  const long b = doubled_offset(c.y, spec_);
  const long n = spec_.points_per_axis;
  return a * a + b * b <= n * n;
}

GridPtr build_grid(const GridSpec& spec) {
  spec.validate();
  const int axis = spec.offset ? spec.points_per_axis : spec.points_per_axis + 1;
  std::vector<LatticeCoord> coords;
  const long n = spec.points_per_axis;
  for (int y = 0; y < axis; ++y) {
    for (int x = 0; x < axis; ++x) {
      const long a = doubled_offset(x, spec);
      const long b = doubled_offset(y, spec);
      if (a * a + b * b <= n * n) coords.push_back({x, y});
    }
  }
  return std::make_shared<const MomentumGrid>(MomentumGrid::from_coordinates(spec, std::move(coords)));
}

DifferenceLattice::DifferenceLattice(GridPtr grid) : grid_(std::move(grid)) {
  reach_ = grid_->axis_size() - 1;
  const int side = 2 * reach_ + 1;
  std::vector<char> present(static_cast<std::size_t>(side) * side, 0);
  const auto coords = grid_->coords();
  for (const auto& a : coords)
    for (const auto& b : coords) present[box_offset(a - b)] = 1;

  lookup_.assign(present.size(), -1);
  for (int y = -reach_; y <= reach_; ++y) {
    for (int x = -reach_; x <= reach_; ++x) {
      const auto off = box_offset({x, y});
      if (!present[off]) continue;
      lookup_[off] = static_cast<int>(coords_.size());
      coords_.push_back({x, y});
    }
  }
}

bool DifferenceLattice::same_as(const DifferenceLattice& other) const noexcept {
  return this == &other || (grid_->spec() == other.grid_->spec() && coords_ == other.coords_);
}

LatticePtr build_difference_lattice(GridPtr grid) {
  return std::make_shared<const DifferenceLattice>(std::move(grid));
}

}  // namespace bdf
