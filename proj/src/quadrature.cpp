#include "bdf/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <string>

#include "bdf/errors.hpp"
#include "bdf/simd/kernels.hpp"

namespace bdf::quad {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // Recompute derivative at the converged root.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

namespace {

// A rectangle in its own coordinates plus the map back to the physical
// integrand. Duffy pieces live on subsets of [0, 1]² and carry the Jacobian.
struct Piece {
  enum Map { plain, duffy_lower, duffy_upper } map = plain;
  double sx = 0.0, sy = 0.0, dx = 0.0, dy = 0.0;
};

struct Cell {
  Rect rect;
  int piece;
  double value;
  double error;
  int depth;
  bool operator<(const Cell& o) const { return error < o.error; }
};

double mapped(const std::function<double(double, double)>& f, const Piece& p, double a, double b) {
  switch (p.map) {
    case Piece::plain: return f(a, b);
    // Triangle below the diagonal through the singular corner: (ξ, η) = (u, u v).
    case Piece::duffy_lower: return a * f(p.sx + p.dx * a, p.sy + p.dy * a * b);
    case Piece::duffy_upper: return a * f(p.sx + p.dx * a * b, p.sy + p.dy * a);
  }
  return 0.0;
}

class CellRule {
 public:
  CellRule() : coarse_(gauss_legendre(6, 0.0, 1.0)), fine_(gauss_legendre(12, 0.0, 1.0)) {}

  std::pair<double, double> integrate(const std::function<double(double, double)>& f,
                                      const Piece& p, const Rect& r) const {
    const double c = tensor(f, p, r, coarse_);
    const double v = tensor(f, p, r, fine_);
    return {v, std::abs(v - c)};
  }

 private:
  static double tensor(const std::function<double(double, double)>& f, const Piece& p,
                       const Rect& r, const Rule1D& g) {
    const double dx = r.x1 - r.x0, dy = r.y1 - r.y0;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double x = r.x0 + dx * g.nodes[i];
      double row = 0.0;
      for (std::size_t j = 0; j < g.nodes.size(); ++j)
        row += g.weights[j] * mapped(f, p, x, r.y0 + dy * g.nodes[j]);
      acc += g.weights[i] * row;
    }
    const double jac = p.map == Piece::plain ? 1.0 : std::abs(p.dx * p.dy);
    return acc * dx * dy * jac;
  }

  Rule1D coarse_;
  Rule1D fine_;
};

bool near(double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); }

// Splits off the square at the singular corner and maps it onto two Duffy
// triangles; the remainder stays a plain rectangle.
void add_region(const Rect& r, const std::optional<std::pair<double, double>>& sing,
                std::vector<Piece>& pieces, std::vector<std::pair<Rect, int>>& seeds) {
  const bool at_x0 = sing && near(r.x0, sing->first), at_x1 = sing && near(r.x1, sing->first);
  const bool at_y0 = sing && near(r.y0, sing->second), at_y1 = sing && near(r.y1, sing->second);
  if (!(at_x0 || at_x1) || !(at_y0 || at_y1)) {
    pieces.push_back({});
    seeds.push_back({r, static_cast<int>(pieces.size()) - 1});
    return;
  }
  const double side = std::min(r.x1 - r.x0, r.y1 - r.y0);
  const double sx = at_x0 ? r.x0 : r.x1, sy = at_y0 ? r.y0 : r.y1;
  const double dx = at_x0 ? side : -side, dy = at_y0 ? side : -side;
  for (auto map : {Piece::duffy_lower, Piece::duffy_upper}) {
    pieces.push_back({map, sx, sy, dx, dy});
    seeds.push_back({{0.0, 1.0, 0.0, 1.0}, static_cast<int>(pieces.size()) - 1});
  }
  Rect rest = r;
  if (r.x1 - r.x0 > side) {
    if (at_x0) rest.x0 = r.x0 + side;
    else rest.x1 = r.x1 - side;
  } else if (r.y1 - r.y0 > side) {
    if (at_y0) rest.y0 = r.y0 + side;
    else rest.y1 = r.y1 - side;
  } else {
    return;
  }
  pieces.push_back({});
  seeds.push_back({rest, static_cast<int>(pieces.size()) - 1});
}

}  // namespace

CubatureResult adaptive_cubature(const std::function<double(double, double)>& f,
                                 const std::vector<Rect>& regions,
                                 const CubatureOptions& options) {
  static const CellRule rule;
  std::vector<Piece> pieces;
  std::vector<std::pair<Rect, int>> seeds;
  for (const auto& r : regions)
    if (r.x1 > r.x0 && r.y1 > r.y0) add_region(r, options.singular_vertex, pieces, seeds);

  std::priority_queue<Cell> heap;
  double total = 0.0, error = 0.0;
  int depth = 0;
  for (const auto& [r, p] : seeds) {
    const auto [v, e] = rule.integrate(f, pieces[p], r);
    heap.push({r, p, v, e, 0});
    total += v;
    error += e;
  }
  std::size_t cells = heap.size();
  std::size_t since_resum = 0;
  while (!heap.empty() && error > options.abs_tol) {
    Cell worst = heap.top();
    if (worst.depth >= options.max_depth || cells >= options.max_cells)
      throw IntegrationError("adaptive cubature exceeded its refinement limit (error estimate " +
                             std::to_string(error) + ")");
    heap.pop();
    total -= worst.value;
    error -= worst.error;
    const double xm = 0.5 * (worst.rect.x0 + worst.rect.x1);
    const double ym = 0.5 * (worst.rect.y0 + worst.rect.y1);
    const Rect kids[4] = {{worst.rect.x0, xm, worst.rect.y0, ym},
                          {xm, worst.rect.x1, worst.rect.y0, ym},
                          {worst.rect.x0, xm, ym, worst.rect.y1},
                          {xm, worst.rect.x1, ym, worst.rect.y1}};
    for (const auto& k : kids) {
      const auto [v, e] = rule.integrate(f, pieces[worst.piece], k);
      heap.push({k, worst.piece, v, e, worst.depth + 1});
      total += v;
      error += e;
    }
    cells += 3;
    depth = std::max(depth, worst.depth + 1);
    if (++since_resum == 4096 || error <= options.abs_tol) {
      // Running sums drift; rebuild them from the heap.
      since_resum = 0;
      auto copy = heap;
      total = error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, error, cells, depth};
}

Rule1D sqrt_mapped_radial_rule(int n, double cutoff) {
  const Rule1D t = gauss_legendre(n, 0.0, 1.0);
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = cutoff * t.nodes[i] * t.nodes[i];
    r.weights[i] = cutoff * 2.0 * t.nodes[i] * t.weights[i];
  }
  return r;
}

CoulombChannels::CoulombChannels(int m_max, int angular_points) : m_max_(m_max) {
  if (m_max < 0 || angular_points < 8)
    throw std::invalid_argument("CoulombChannels: bad channel count or angular rule");
  const double h = 2.0 * std::numbers::pi / angular_points;
  base_.resize(angular_points);
  for (int k = 0; k < angular_points; ++k) {
    const double s = std::sin(0.5 * k * h);
    base_[k] = 4.0 * s * s;
  }
  weights_.resize(m_max + 1);
  for (int m = 1; m <= m_max; ++m) {
    weights_[m].resize(angular_points);
    for (int k = 0; k < angular_points; ++k) weights_[m][k] = (std::cos(m * k * h) - 1.0) * h;
  }
}

namespace {

double agm(double a, double b) noexcept {
  while (std::abs(a - b) > 1e-15 * a) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

void CoulombChannels::evaluate(double r, double s, double* out) const {
  const double eps2 = (r - s) * (r - s) / (r * s);
  const double root = std::sqrt(eps2 + 4.0);
  const double scale = 1.0 / std::sqrt(r * s);
  // 4K(k)/root with k = 2/root, written through the complementary modulus so
  // that nearly equal radii keep full precision.
  const double base = 2.0 * std::numbers::pi / agm(root, std::sqrt(eps2));
  out[0] = base * scale;
  const auto& kern = simd::kernels();
  for (int m = 1; m <= m_max_; ++m) {
    const double corr = kern.inv_sqrt_dot(eps2, base_.data(), weights_[m].data(), base_.size());
    out[m] = (base + corr) * scale;
  }
}

double CoulombChannels::evaluate(int m, double r, double s) const {
  std::vector<double> out(m_max_ + 1);
  evaluate(r, s, out.data());
  return out.at(m);
}

double CoulombChannels::diagonal_constant(int m) noexcept {
  double c = 0.0;
  for (int j = 1; j <= m; ++j) c += 4.0 / (2.0 * j - 1.0);
  return c;
}

std::vector<Eigen::MatrixXd> coulomb_channel_matrices(const Rule1D& radial, double cutoff,
                                                      int m_max, int angular_points) {
  const CoulombChannels channels(m_max, angular_points);
  const auto n = static_cast<Eigen::Index>(radial.nodes.size());
  const auto& r = radial.nodes;
  const auto& w = radial.weights;
  std::vector<Eigen::MatrixXd> out(m_max + 1, Eigen::MatrixXd::Zero(n, n));
  std::vector<double> vals(m_max + 1);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      channels.evaluate(r[a], r[b], vals.data());
      for (int m = 0; m <= m_max; ++m) out[m](a, b) = out[m](b, a) = w[a] * w[b] * vals[m];
    }
  }
  // Diagonal: ∫ A(r_a, s) U(s) ds ≈ Σ_{b≠a} W_b A_ab U_b
  //   + U_a [∫ L_a − Σ_{b≠a} W_b L_a(r_b)] + W_a U_a (A − L_a)(r_a, r_a),
  // with L_a(s) = −(2/r_a) ln|r_a − s|.
  for (Eigen::Index a = 0; a < n; ++a) {
    const double ra = r[a];
    const double rest = cutoff - ra;
    const double log_integral = (ra * std::log(ra) - ra) + (rest > 0 ? rest * std::log(rest) - rest : 0.0);
    double int_l = -(2.0 / ra) * log_integral;
    double sum_l = 0.0;
    for (Eigen::Index b = 0; b < n; ++b)
      if (b != a) sum_l += w[b] * (-(2.0 / ra) * std::log(std::abs(ra - r[b])));
    for (int m = 0; m <= m_max; ++m) {
      const double limit = (2.0 * std::log(8.0 * ra) - CoulombChannels::diagonal_constant(m)) / ra;
      out[m](a, a) = w[a] * (int_l - sum_l + w[a] * limit);
    }
  }
  return out;
}

}  // namespace bdf::quad
