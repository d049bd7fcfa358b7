#include "bdf/state.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "bdf/errors.hpp"
#include "bdf/linalg.hpp"

namespace bdf {

using std::numbers::pi;

OperatorKernel::OperatorKernel(GridPtr grid, Eigen::MatrixXcd matrix, bool hermitian)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (!grid_) throw std::invalid_argument("OperatorKernel: null grid");
  const auto n = 2 * static_cast<Eigen::Index>(grid_->size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw LatticeMismatch("OperatorKernel: matrix dimension does not match the grid");
  if (hermitian_ && n > 0) {
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if (linalg::hermiticity_defect(matrix_) > 1e-9 * scale)
      throw DomainError("OperatorKernel: matrix flagged Hermitian is not");
  }
}

OperatorKernel OperatorKernel::zero(GridPtr grid) {
  const auto n = 2 * static_cast<Eigen::Index>(grid->size());
  return {std::move(grid), Eigen::MatrixXcd::Zero(n, n), true};
}

OperatorKernel OperatorKernel::identity(GridPtr grid) {
  const auto n = 2 * static_cast<Eigen::Index>(grid->size());
  return {std::move(grid), Eigen::MatrixXcd::Identity(n, n), true};
}

ChargeDensity::ChargeDensity(LatticePtr lattice)
    : lattice_(std::move(lattice)),
      values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(lattice_->size()))) {}

ChargeDensity::ChargeDensity(LatticePtr lattice, Eigen::VectorXcd values)
    : lattice_(std::move(lattice)), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(lattice_->size()))
    throw LatticeMismatch("ChargeDensity: value count does not match the lattice");
}

double ChargeDensity::conjugation_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < lattice_->size(); ++k) {
    const int nk = lattice_->negated(k);
    worst = std::max(worst, std::abs(values_[nk] - std::conj(values_[static_cast<Eigen::Index>(k)])));
  }
  return worst;
}

namespace {
void require_same(const DifferenceLattice& a, const DifferenceLattice& b) {
  if (!a.same_as(b)) throw LatticeMismatch("charge densities live on different lattices");
}
}  // namespace

ChargeDensity& ChargeDensity::operator+=(const ChargeDensity& o) {
  require_same(*lattice_, *o.lattice_);
  values_ += o.values_;
  return *this;
}

ChargeDensity& ChargeDensity::operator-=(const ChargeDensity& o) {
  require_same(*lattice_, *o.lattice_);
  values_ -= o.values_;
  return *this;
}

ChargeDensity& ChargeDensity::operator*=(double s) {
  values_ *= s;
  return *this;
}

namespace {

// Antiderivative of 1/sqrt(x² + y²) in both variables, x, y >= 0.
double cell_primitive(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) return 0.0;
  const double fx = x > 0.0 ? x * std::log(y + r) : 0.0;
  const double fy = y > 0.0 ? y * std::log(x + r) : 0.0;
  return fx + fy;
}

// [lo, hi] folded onto the nonnegative half-line.
int fold(double lo, double hi, std::pair<double, double>* out) {
  if (hi <= 0.0) {
    out[0] = {-hi, -lo};
    return 1;
  }
  if (lo >= 0.0) {
    out[0] = {lo, hi};
    return 1;
  }
  out[0] = {0.0, -lo};
  out[1] = {0.0, hi};
  return 2;
}

}  // namespace

double unit_cell_coulomb_integral(LatticeCoord c) {
  std::pair<double, double> xs[2], ys[2];
  const int nx = fold(c.x - 0.5, c.x + 0.5, xs);
  const int ny = fold(c.y - 0.5, c.y + 0.5, ys);
  double total = 0.0;
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      const auto [x0, x1] = xs[a];
      const auto [y0, y1] = ys[b];
      total += cell_primitive(x1, y1) - cell_primitive(x0, y1) - cell_primitive(x1, y0) +
               cell_primitive(x0, y0);
    }
  return total;
}

namespace {

// Unit-cell integrals on the box [-reach, reach]², shared across lattices.
std::shared_ptr<const std::vector<double>> unit_table(int reach) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<double>>> tables;
  std::lock_guard lock(mutex);
  if (auto it = tables.find(reach); it != tables.end()) return it->second;
  const int side = 2 * reach + 1;
  auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(side) * side);
  for (int y = -reach; y <= reach; ++y)
    for (int x = -reach; x <= reach; ++x)
      (*table)[static_cast<std::size_t>(y + reach) * side + (x + reach)] =
          unit_cell_coulomb_integral({x, y});
  tables.emplace(reach, table);
  return table;
}

}  // namespace

std::vector<double> coulomb_weights(const DifferenceLattice& lattice) {
  const int reach = lattice.reach();
  const int side = 2 * reach + 1;
  const auto table = unit_table(reach);
  std::vector<double> w(lattice.size());
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const auto c = lattice.coord(k);
    w[k] = lattice.spacing() * (*table)[static_cast<std::size_t>(c.y + reach) * side + (c.x + reach)];
  }
  return w;
}

Discretization::Discretization(const GridSpec& spec, const PhysicalParams& params)
    : params_(params) {
  spec.validate();
  params.validate();
  if (std::abs(spec.cutoff - params.cutoff) > 1e-14 * params.cutoff)
    throw ConfigError("grid cutoff and physical cutoff differ");
  if (!spec.offset) throw ConfigError("the free projector needs an offset grid (p = 0 excluded)");
  grid_ = build_grid(spec);
  lattice_ = build_difference_lattice(grid_);
  coulomb_ = coulomb_weights(*lattice_);
  {
    const auto table = unit_table(lattice_->reach());
    coulomb_box_.resize(table->size());
    for (std::size_t k = 0; k < table->size(); ++k) coulomb_box_[k] = lattice_->spacing() * (*table)[k];
  }
  v_eff_ = v_eff_table(*grid_, params_);
  const std::size_t m = grid_->size();
  abs_free_.resize(m);
  for (std::size_t i = 0; i < m; ++i) abs_free_[i] = v_eff_[i] * grid_->point(i).norm();
  pair_.resize(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      pair_[i * m + j] = lattice_->index_of(grid_->coord(i) - grid_->coord(j));
  p_minus_ = Eigen::MatrixXcd::Zero(dim(), dim());
  d0_ = Eigen::MatrixXcd::Zero(dim(), dim());
  for (std::size_t i = 0; i < m; ++i) {
    const auto k = 2 * static_cast<Eigen::Index>(i);
    const auto& p = grid_->point(i);
    p_minus_.block<2, 2>(k, k) = free_sea_projector(p);
    d0_.block<2, 2>(k, k) = v_eff_[i] * dirac_matrix(p);
  }
}

DiscretizationPtr make_discretization(const GridSpec& spec, const PhysicalParams& params) {
  return std::make_shared<const Discretization>(spec, params);
}

OperatorKernel block(const OperatorKernel& q, Sign left, Sign right) {
  const auto& grid = *q.grid();
  const auto m = static_cast<Eigen::Index>(grid.size());
  std::vector<SpinorMatrix> pl(m), pr(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const SpinorMatrix minus = free_sea_projector(grid.point(i));
    const SpinorMatrix plus = SpinorMatrix::Identity() - minus;
    pl[i] = left == Sign::minus ? minus : plus;
    pr[i] = right == Sign::minus ? minus : plus;
  }
  Eigen::MatrixXcd out(q.dim(), q.dim());
  for (Eigen::Index i = 0; i < m; ++i) out.middleRows<2>(2 * i).noalias() = pl[i] * q.matrix().middleRows<2>(2 * i);
  for (Eigen::Index j = 0; j < m; ++j) out.middleCols<2>(2 * j) = out.middleCols<2>(2 * j) * pr[j];
  return {q.grid(), std::move(out), q.hermitian() && left == right};
}

ChargeDensity density(const OperatorKernel& q, LatticePtr lattice) {
  if (!(lattice->grid()->spec() == q.grid()->spec()))
    throw LatticeMismatch("density: lattice built on another grid");
  ChargeDensity rho(lattice);
  const auto& grid = *q.grid();
  const auto& mat = q.matrix();
  auto& out = rho.values();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const int k = lattice->index_of(grid.coord(i) - grid.coord(j));
      const auto a = 2 * static_cast<Eigen::Index>(i), b = 2 * static_cast<Eigen::Index>(j);
      out[k] += mat(a, b) + mat(a + 1, b + 1);
    }
  out /= 2.0 * pi;
  return rho;
}

ChargeDensity density(const OperatorKernel& q) {
  return density(q, build_difference_lattice(q.grid()));
}

std::complex<double> coulomb_inner(const ChargeDensity& a, const ChargeDensity& b) {
  require_same(*a.lattice(), *b.lattice());
  const auto& lattice = *a.lattice();
  const int reach = lattice.reach();
  const int side = 2 * reach + 1;
  const auto table = unit_table(reach);
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const auto c = lattice.coord(k);
    const double w = (*table)[static_cast<std::size_t>(c.y + reach) * side + (c.x + reach)];
    acc += w * std::conj(a[k]) * b[k];
  }
  return 2.0 * pi * lattice.spacing() * acc;
}

double coulomb_norm(const ChargeDensity& rho) {
  return std::sqrt(std::max(0.0, coulomb_inner(rho, rho).real()));
}

StateNorms norms(const OperatorKernel& q, const Discretization& disc) {
  if (!(q.grid()->spec() == disc.grid()->spec()))
    throw LatticeMismatch("norms: state built on another grid");
  const auto m = static_cast<Eigen::Index>(disc.size());
  Eigen::VectorXd s(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) s[2 * i] = s[2 * i + 1] = std::sqrt(disc.abs_free()[i]);

  StateNorms out;
  const Eigen::MatrixXcd diff =
      block(q, Sign::plus, Sign::plus).matrix() - block(q, Sign::minus, Sign::minus).matrix();
  const Eigen::MatrixXcd sandwiched = s.asDiagonal() * diff * s.asDiagonal();
  if (q.hermitian()) {
    const Eigen::MatrixXcd h = 0.5 * (sandwiched + sandwiched.adjoint());
    out.kinetic_trace_norm = linalg::eigvalsh(h).cwiseAbs().sum();
  } else {
    out.kinetic_trace_norm = linalg::trace_norm(sandwiched);
  }
  out.hs_weighted_norm = (s.asDiagonal() * q.matrix()).norm();
  out.coulomb_norm = coulomb_norm(density(q, disc.lattice()));
  return out;
}

OperatorKernel random_admissible_state(const Discretization& disc, std::uint64_t seed,
                                       double strength) {
  if (!(strength >= 0.0)) throw DomainError("random_admissible_state: strength must be >= 0");
  const auto n = disc.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = {normal(rng), normal(rng)};
  Eigen::MatrixXcd h = 0.5 * (x + x.adjoint());
  h /= linalg::hermitian_norm(h);
  const auto u = linalg::unitary_exp(linalg::eigh(h), -strength);  // e^{iεH}
  Eigen::MatrixXcd gamma = u * disc.free_projector() * u.adjoint();
  gamma = 0.5 * (gamma + gamma.adjoint()).eval();
  return {disc.grid(), std::move(gamma), true};
}

double projector_defect(const OperatorKernel& gamma) {
  const Eigen::MatrixXcd a = gamma.matrix() * gamma.matrix() - gamma.matrix();
  if (gamma.hermitian()) return linalg::hermitian_norm(0.5 * (a + a.adjoint()));
  return linalg::operator_norm(a);
}

}  // namespace bdf
