#include "bdf/mean_field.hpp"

#include <array>
#include <numbers>

#include "bdf/errors.hpp"
#include "bdf/simd/kernels.hpp"

namespace bdf {

using std::numbers::pi;

namespace {

void require_grid(const OperatorKernel& q, const Discretization& disc) {
  if (!(q.grid()->spec() == disc.grid()->spec()))
    throw LatticeMismatch("operator built on another grid");
}

}  // namespace

Eigen::MatrixXcd direct_potential(const ChargeDensity& rho, const Discretization& disc) {
  if (!rho.lattice()->same_as(*disc.lattice()))
    throw LatticeMismatch("direct_potential: density on another lattice");
  const std::size_t m = disc.size();
  const auto kc = disc.coulomb();
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(disc.dim(), disc.dim());
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      const int k = disc.pair_index(i, j);
      const std::complex<double> v = kc[k] * rho[k];
      const auto a = 2 * static_cast<Eigen::Index>(i), b = 2 * static_cast<Eigen::Index>(j);
      phi(a, b) = v;
      phi(a + 1, b + 1) = v;
    }
  return phi;
}

namespace {

Eigen::MatrixXcd exchange_naive(const OperatorKernel& q, const Discretization& disc) {
  const auto& grid = *disc.grid();
  const auto& lattice = *disc.lattice();
  const auto kc = disc.coulomb();
  const auto& mat = q.matrix();
  const std::size_t m = grid.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q.dim(), q.dim());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
      for (std::size_t k = 0; k < lattice.size(); ++k) {
        const int a = grid.index_of(grid.coord(i) - lattice.coord(k));
        if (a < 0) continue;
        const int b = grid.index_of(grid.coord(j) - lattice.coord(k));
        if (b < 0) continue;
        acc += kc[k] * mat.block<2, 2>(2 * a, 2 * b);
      }
      out.block<2, 2>(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(j)) = acc;
    }
  return out / (2.0 * pi);
}

// Row y of the grid covers x in [lo[y], hi[y]] (empty when lo > hi).
struct RowExtent {
  std::vector<int> lo, hi;
};

RowExtent row_extent(const MomentumGrid& grid) {
  const int n = grid.axis_size();
  RowExtent r{std::vector<int>(n, n), std::vector<int>(n, -1)};
  for (const auto& c : grid.coords()) {
    r.lo[c.y] = std::min(r.lo[c.y], c.x);
    r.hi[c.y] = std::max(r.hi[c.y], c.x);
  }
  return r;
}

constexpr int kSite = 8;  // 2×2 complex block as doubles

// For one difference d, R restricted to pairs (y, y − d) is the 2D
// convolution of m(x) = Q(x, x − d) with K over the lens where both x and
// x − d are grid sites. Rows of the lens are contiguous, so every
// (output row, input row, horizontal shift) triple is one axpy.
void exchange_one_difference(LatticeCoord d, const OperatorKernel& q, const Discretization& disc,
                             const RowExtent& rows, bool mirror, std::vector<double>& in,
                             std::vector<double>& out, std::vector<int>& offset,
                             Eigen::MatrixXcd& result) {
  const auto& grid = *disc.grid();
  const auto& mat = q.matrix();
  const auto& kern = simd::kernels();
  const int n = grid.axis_size();
  std::vector<int> lo(n), hi(n);
  int total = 0;
  for (int y = 0; y < n; ++y) {
    const int ys = y - d.y;
    offset[y] = total;
    if (ys < 0 || ys >= n) {
      lo[y] = 0;
      hi[y] = -1;
      continue;
    }
    lo[y] = std::max(rows.lo[y], rows.lo[ys] + d.x);
    hi[y] = std::min(rows.hi[y], rows.hi[ys] + d.x);
    if (hi[y] >= lo[y]) total += hi[y] - lo[y] + 1;
  }
  if (total == 0) return;
  in.assign(static_cast<std::size_t>(total) * kSite, 0.0);
  out.assign(static_cast<std::size_t>(total) * kSite, 0.0);

  for (int y = 0; y < n; ++y)
    for (int x = lo[y]; x <= hi[y]; ++x) {
      const int a = grid.index_of({x, y});
      const int b = grid.index_of({x - d.x, y - d.y});
      double* site = in.data() + static_cast<std::size_t>(offset[y] + x - lo[y]) * kSite;
      const auto blk = mat.block<2, 2>(2 * a, 2 * b);
      for (int e = 0; e < 4; ++e) {
        site[2 * e] = blk(e / 2, e % 2).real();
        site[2 * e + 1] = blk(e / 2, e % 2).imag();
      }
    }

  const double scale = 1.0 / (2.0 * pi);
  for (int yo = 0; yo < n; ++yo) {
    if (hi[yo] < lo[yo]) continue;
    double* orow = out.data() + static_cast<std::size_t>(offset[yo]) * kSite;
    for (int yi = 0; yi < n; ++yi) {
      if (hi[yi] < lo[yi]) continue;
      const double* irow = in.data() + static_cast<std::size_t>(offset[yi]) * kSite;
      const int ky = yo - yi;
      // out[xo] += K(xo − xi, ky) in[xi]
      for (int kx = lo[yo] - hi[yi]; kx <= hi[yo] - lo[yi]; ++kx) {
        const int xo0 = std::max(lo[yo], lo[yi] + kx);
        const int xo1 = std::min(hi[yo], hi[yi] + kx);
        if (xo1 < xo0) continue;
        const double w = scale * disc.coulomb_at({kx, ky});
        kern.axpy(w, irow + static_cast<std::size_t>(xo0 - kx - lo[yi]) * kSite,
                  orow + static_cast<std::size_t>(xo0 - lo[yo]) * kSite,
                  static_cast<std::size_t>(xo1 - xo0 + 1) * kSite);
      }
    }
  }

  for (int y = 0; y < n; ++y)
    for (int x = lo[y]; x <= hi[y]; ++x) {
      const int a = grid.index_of({x, y});
      const int b = grid.index_of({x - d.x, y - d.y});
      const double* site = out.data() + static_cast<std::size_t>(offset[y] + x - lo[y]) * kSite;
      Eigen::Matrix2cd blk;
      for (int e = 0; e < 4; ++e) blk(e / 2, e % 2) = {site[2 * e], site[2 * e + 1]};
      result.block<2, 2>(2 * a, 2 * b) = blk;
      if (mirror) result.block<2, 2>(2 * b, 2 * a) = blk.adjoint();
    }
}

Eigen::MatrixXcd exchange_blocked(const OperatorKernel& q, const Discretization& disc) {
  const auto& lattice = *disc.lattice();
  const RowExtent rows = row_extent(*disc.grid());
  const bool half = q.hermitian();
  std::vector<LatticeCoord> work;
  for (const auto& d : lattice.coords())
    if (!half || d.y > 0 || (d.y == 0 && d.x >= 0)) work.push_back(d);

  Eigen::MatrixXcd result = Eigen::MatrixXcd::Zero(q.dim(), q.dim());
  const int n = disc.grid()->axis_size();
  const auto count = static_cast<long>(work.size());
#pragma omp parallel
  {
    std::vector<double> in, out;
    std::vector<int> offset(n);
    // Each difference writes a disjoint set of blocks.
#pragma omp for schedule(dynamic, 4)
    for (long t = 0; t < count; ++t) {
      const auto d = work[static_cast<std::size_t>(t)];
      exchange_one_difference(d, q, disc, rows, half && !(d.x == 0 && d.y == 0), in, out, offset,
                              result);
    }
  }
  return result;
}

}  // namespace

ChargeDensity commutator_density(const ChargeDensity& phi, const OperatorKernel& q,
                                 const Discretization& disc) {
  if (!phi.lattice()->same_as(*disc.lattice())) throw LatticeMismatch("potential lattice differs");
  const auto& grid = *disc.grid();
  const auto& lattice = *disc.lattice();
  const std::size_t m = grid.size();
  const auto& qm = q.matrix();
  const auto entry = [&](LatticeCoord d) -> std::complex<double> {
    const int k = lattice.index_of(d);
    return k < 0 ? 0.0 : phi[static_cast<std::size_t>(k)];
  };
  const auto tr = [&](std::size_t i, std::size_t j) {
    return qm(2 * i, 2 * j) + qm(2 * i + 1, 2 * j + 1);
  };

  ChargeDensity out(disc.lattice());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const LatticeCoord shift = lattice.coord(k);
    std::complex<double> left = 0.0, right = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      // (φQ)(c + k, c): the row may lie outside the ball.
      const LatticeCoord row = grid.coord(c) + shift;
      for (std::size_t s = 0; s < m; ++s) left += entry(row - grid.coord(s)) * tr(s, c);
      // (Qφ)(c, c − k): the column may lie outside the ball.
      const LatticeCoord col = grid.coord(c) - shift;
      for (std::size_t s = 0; s < m; ++s) right += tr(c, s) * entry(grid.coord(s) - col);
    }
    out.values()[static_cast<Eigen::Index>(k)] = (left - right) / (2.0 * std::numbers::pi);
  }
  return out;
}

Eigen::MatrixXcd exchange_operator(const OperatorKernel& q, const Discretization& disc,
                                   ExchangeKernel kernel) {
  require_grid(q, disc);
  return kernel == ExchangeKernel::naive ? exchange_naive(q, disc) : exchange_blocked(q, disc);
}

MeanFieldOperator assemble_mean_field(const OperatorKernel& q, const ChargeDensity& rho_q,
                                      const ChargeDensity& nu, const Discretization& disc,
                                      ExchangeKernel kernel) {
  require_grid(q, disc);
  MeanFieldOperator out;
  out.free = disc.free_operator();
  out.direct = direct_potential(rho_q, disc);
  out.external = -direct_potential(nu, disc);
  out.exchange = exchange_operator(q, disc, kernel);
  out.matrix = out.free + out.direct + out.external - out.exchange;
  // Round-off asymmetry only; keeps downstream Hermitian checks exact.
  out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
  return out;
}

MeanFieldOperator assemble_mean_field(const OperatorKernel& q, const ChargeDensity& nu,
                                      const Discretization& disc, ExchangeKernel kernel) {
  return assemble_mean_field(q, density(q, disc.lattice()), nu, disc, kernel);
}

}  // namespace bdf
