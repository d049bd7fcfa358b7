#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bdf {

struct Momentum {
  double x = 0.0;
  double y = 0.0;

  double norm() const noexcept { return std::hypot(x, y); }
  friend Momentum operator-(Momentum a, Momentum b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Momentum operator-(Momentum a) noexcept { return {-a.x, -a.y}; }
  friend bool operator==(const Momentum&, const Momentum&) = default;
};

/// Integer lattice coordinate. Grid points use [0, L) per axis, difference
/// vectors use (-L, L).
struct LatticeCoord {
  int x = 0;
  int y = 0;

  friend LatticeCoord operator-(LatticeCoord a, LatticeCoord b) noexcept {
    return {a.x - b.x, a.y - b.y};
  }
  friend LatticeCoord operator+(LatticeCoord a, LatticeCoord b) noexcept {
    return {a.x + b.x, a.y + b.y};
  }
  friend LatticeCoord operator-(LatticeCoord a) noexcept { return {-a.x, -a.y}; }
  friend bool operator==(const LatticeCoord&, const LatticeCoord&) = default;
};

struct GridSpec {
  double cutoff = 1.0;       // Λ
  int points_per_axis = 12;  // n, even
  bool offset = true;        // half-cell shift, keeps p = 0 off the grid

  /// Throws ConfigError unless Λ > 0 and n >= 4 is even.
  void validate() const;
  double spacing() const noexcept { return 2.0 * cutoff / points_per_axis; }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Uniform Cartesian discretization of the cutoff ball B(0, Λ).
///
/// Point i sits at the centre of a δ×δ cell; every cell carries the same
/// weight δ² (midpoint rule, boundary clipping ignored). Membership and
/// identity are decided on integer coordinates only.
class MomentumGrid {
 public:
  /// Grid made of an explicit subset of lattice sites of `spec`. Sites must be
  /// inside the disk; used for degenerate grids in tests.
  static MomentumGrid from_coordinates(const GridSpec& spec, std::vector<LatticeCoord> coords);

  const GridSpec& spec() const noexcept { return spec_; }
  double cutoff() const noexcept { return spec_.cutoff; }
  double spacing() const noexcept { return spacing_; }
  double weight() const noexcept { return spacing_ * spacing_; }
  std::size_t size() const noexcept { return coords_.size(); }
  /// Number of lattice sites per axis of the bounding box.
  int axis_size() const noexcept { return axis_; }

  std::span<const Momentum> points() const noexcept { return points_; }
  std::span<const LatticeCoord> coords() const noexcept { return coords_; }
  const Momentum& point(std::size_t i) const { return points_[i]; }
  const LatticeCoord& coord(std::size_t i) const { return coords_[i]; }

  /// Grid index of a lattice site, or -1 when the site is not a grid point.
  int index_of(LatticeCoord c) const noexcept {
    if (c.x < 0 || c.y < 0 || c.x >= axis_ || c.y >= axis_) return -1;
    return lookup_[static_cast<std::size_t>(c.y) * axis_ + c.x];
  }
  Momentum momentum_of(LatticeCoord c) const noexcept;
  /// True when the lattice site lies in the closed disk |p| <= Λ.
  bool in_disk(LatticeCoord c) const noexcept;

  double total_weight() const noexcept { return weight() * static_cast<double>(size()); }

 private:
  MomentumGrid(const GridSpec& spec, std::vector<LatticeCoord> coords);

  GridSpec spec_;
  double spacing_;
  int axis_;
  std::vector<LatticeCoord> coords_;
  std::vector<Momentum> points_;
  std::vector<int> lookup_;
};

using GridPtr = std::shared_ptr<const MomentumGrid>;

/// All lattice sites of `spec` inside the disk, row-major in (y, x).
GridPtr build_grid(const GridSpec& spec);

/// Set of all differences p_i - p_j of a grid, on the unshifted lattice of
/// spacing δ. Closed under k -> -k and contains 0.
class DifferenceLattice {
 public:
  explicit DifferenceLattice(GridPtr grid);

  const GridPtr& grid() const noexcept { return grid_; }
  double spacing() const noexcept { return grid_->spacing(); }
  /// Nominal radius 2Λ; every difference satisfies |k| <= radius().
  double radius() const noexcept { return 2.0 * grid_->cutoff(); }
  std::size_t size() const noexcept { return coords_.size(); }
  /// Half-width of the bounding box: coordinates range over [-reach, reach].
  int reach() const noexcept { return reach_; }

  std::span<const LatticeCoord> coords() const noexcept { return coords_; }
  const LatticeCoord& coord(std::size_t k) const { return coords_[k]; }
  Momentum momentum(std::size_t k) const noexcept {
    return {coords_[k].x * spacing(), coords_[k].y * spacing()};
  }
  int index_of(LatticeCoord d) const noexcept {
    if (d.x < -reach_ || d.x > reach_ || d.y < -reach_ || d.y > reach_) return -1;
    return lookup_[box_offset(d)];
  }
  bool contains(LatticeCoord d) const noexcept { return index_of(d) >= 0; }
  int zero_index() const noexcept { return index_of({0, 0}); }
  /// Index of -k for lattice index k.
  int negated(std::size_t k) const noexcept { return index_of(-coords_[k]); }

  bool same_as(const DifferenceLattice& other) const noexcept;

 private:
  std::size_t box_offset(LatticeCoord d) const noexcept {
    const int side = 2 * reach_ + 1;
    return static_cast<std::size_t>(d.y + reach_) * side + (d.x + reach_);
  }

  GridPtr grid_;
  int reach_ = 0;
  std::vector<LatticeCoord> coords_;
  std::vector<int> lookup_;
};

using LatticePtr = std::shared_ptr<const DifferenceLattice>;

LatticePtr build_difference_lattice(GridPtr grid);

}  // namespace bdf
