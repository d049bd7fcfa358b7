#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "bdf/errors.hpp"
#include "bdf/momentum_grid.hpp"

using namespace bdf;

TEST_SUITE("momentum_grid") {

TEST_CASE("n = 8 offset grid has the 52 enumerated points") {
  // Independent enumeration of (i + ½ − n/2)δ inside the unit disk.
  const int n = 8;
  const double delta = 2.0 / n;
  int expected = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5 - n / 2.0) * delta, y = (j + 0.5 - n / 2.0) * delta;
      if (x * x + y * y <= 1.0) ++expected;
    }
  CHECK(expected == 52);
  const auto grid = build_grid({1.0, 8, true});
  CHECK(grid->size() == 52);
  for (const auto& p : grid->points()) CHECK(p.norm() <= 1.0 + 1e-15);
}

TEST_CASE("origin is a point without offset and never with it") {
  const auto plain = build_grid({1.0, 4, false});
  bool found = false;
  for (const auto& p : plain->points()) found |= (p.x == 0.0 && p.y == 0.0);
  CHECK(found);
  for (int n : {4, 8, 12, 16}) {
    const auto grid = build_grid({1.0, n, true});
    for (const auto& p : grid->points()) CHECK(p.norm() > 0.0);
  }
}

TEST_CASE("point set is symmetric under p -> -p") {
  for (bool offset : {true, false})
    for (int n : {4, 6, 10, 12}) {
      const auto grid = build_grid({1.3, n, offset});
      std::set<std::pair<long, long>> pts;
      for (const auto& p : grid->points())
        pts.insert({std::lround(p.x * 1e9), std::lround(p.y * 1e9)});
      for (const auto& p : grid->points())
        CHECK(pts.count({std::lround(-p.x * 1e9), std::lround(-p.y * 1e9)}) == 1);
    }
}

TEST_CASE("total weight approximates the disk area") {
  for (int n : {8, 12, 16, 24, 32}) {
    const auto grid = build_grid({1.0, n, true});
    const double area = std::numbers::pi;
    CHECK(std::abs(grid->total_weight() - area) / area <= 2.0 * grid->spacing());
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_grid({0.0, 8, true}), ConfigError);
  CHECK_THROWS_AS(build_grid({1.0, 7, true}), ConfigError);
  CHECK_THROWS_AS(build_grid({1.0, 2, true}), ConfigError);
}

TEST_CASE("difference lattice geometry") {
  const auto grid = build_grid({1.0, 8, true});
  const auto lattice = build_difference_lattice(grid);
  CHECK(lattice->radius() == doctest::Approx(2.0));
  CHECK(lattice->spacing() == doctest::Approx(0.25));
  CHECK(lattice->contains({0, 0}));
  for (std::size_t k = 0; k < lattice->size(); ++k) {
    CHECK(lattice->negated(k) >= 0);
    const auto q = lattice->momentum(k);
    CHECK(q.norm() <= lattice->radius() + 1e-12);
  }
  // Every pairwise difference is present, and on the unshifted lattice.
  for (std::size_t i = 0; i < grid->size(); ++i)
    for (std::size_t j = 0; j < grid->size(); ++j) {
      const auto d = grid->coord(i) - grid->coord(j);
      const int k = lattice->index_of(d);
      REQUIRE(k >= 0);
      const auto dp = grid->point(i) - grid->point(j);
      CHECK(std::abs(lattice->momentum(k).x - dp.x) < 1e-14);
      CHECK(std::abs(lattice->momentum(k).y - dp.y) < 1e-14);
    }
}

TEST_CASE("single-point grid has the trivial lattice") {
  const GridSpec spec{1.0, 8, true};
  const auto grid = std::make_shared<const MomentumGrid>(MomentumGrid::from_coordinates(spec, {{4, 4}}));
  const auto lattice = build_difference_lattice(grid);
  CHECK(lattice->size() == 1);
  CHECK(lattice->zero_index() == 0);
}

}
