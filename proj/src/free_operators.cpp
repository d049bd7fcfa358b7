#include "bdf/free_operators.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "bdf/errors.hpp"
#include "bdf/quadrature.hpp"

namespace bdf {

using std::numbers::pi;

void PhysicalParams::validate() const {
  if (!(fermi_velocity > 0.0) || !std::isfinite(fermi_velocity))
    throw ConfigError("fermi_velocity must be positive");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ConfigError("cutoff must be positive");
}

namespace {

// θ and π − θ folded together: 4 r² cos²θ / (A B (A + B)) with A, B the
// distances from (r, θ) and (r, π − θ) to (1, 0). Written through sin²(θ/2)
// to avoid cancellation next to the singular corner.
double folded_integrand(double r, double theta) {
  const double s = std::sin(0.5 * theta);
  const double q = 4.0 * r * s * s;
  const double a = std::sqrt((r - 1.0) * (r - 1.0) + q);
  const double b = std::sqrt((r + 1.0) * (r + 1.0) - q);
  if (a == 0.0) return 0.0;
  const double c = std::cos(theta);
  return 4.0 * r * r * c * c / (a * b * (a + b));
}

}  // namespace

double g_of_R(double R, double tol) {
  if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("g_of_R: R must be finite and >= 0");
  if (!(tol > 0.0)) throw DomainError("g_of_R: tolerance must be positive");
  if (R == 0.0) return 0.0;

  const double half_pi = 0.5 * pi;
  // The result is divided by 2π at the end.
  const double scaled_tol = 2.0 * pi * tol;

  quad::CubatureOptions near;
  near.abs_tol = 0.5 * scaled_tol;
  near.max_depth = 20;
  near.singular_vertex = std::pair{1.0, 0.0};
  std::vector<quad::Rect> rects;
  rects.push_back({0.0, std::min(R, 1.0), 0.0, half_pi});
  if (R > 1.0) rects.push_back({1.0, std::min(R, 2.0), 0.0, half_pi});
  double total =
      quad::adaptive_cubature([](double r, double t) { return folded_integrand(r, t); }, rects, near)
          .value;

  if (R > 2.0) {
    quad::CubatureOptions far;
    far.abs_tol = 0.5 * scaled_tol;
    far.max_depth = 20;
    const auto tail = [](double s, double t) {
      const double r = std::exp(s);
      return r * folded_integrand(r, t);
    };
    total += quad::adaptive_cubature(tail, {{std::log(2.0), std::log(R), 0.0, half_pi}}, far).value;
  }
  return total / (2.0 * pi);
}

double g_cached(double R) {
  static std::mutex mutex;
  static std::unordered_map<std::uint64_t, double> cache;
  const auto key = std::bit_cast<std::uint64_t>(R);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double value = g_of_R(R);
  std::lock_guard lock(mutex);
  cache.emplace(key, value);
  return value;
}

double v_eff(const Momentum& p, const PhysicalParams& params) {
  const double r = p.norm();
  if (r == 0.0) throw DomainError("v_eff: undefined at p = 0");
  if (r > params.cutoff * (1.0 + 1e-12)) throw DomainError("v_eff: |p| exceeds the cutoff");
  return params.fermi_velocity + g_cached(params.cutoff / r);
}

std::vector<double> v_eff_table(const MomentumGrid& grid, const PhysicalParams& params) {
  // Distinct |p| are distinct a² + b² in lattice units.
  std::map<long, double> by_radius;
  std::vector<double> out(grid.size());
  const int shift2 = grid.spec().offset ? 1 : 0;
  const int n = grid.spec().points_per_axis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = grid.coord(i);
    const long a = 2L * c.x + shift2 - n;
    const long b = 2L * c.y + shift2 - n;
    const long key = a * a + b * b;
    auto it = by_radius.find(key);
    if (it == by_radius.end()) it = by_radius.emplace(key, v_eff(grid.point(i), params)).first;
    out[i] = it->second;
  }
  return out;
}

SpinorMatrix dirac_matrix(const Momentum& p) {
  SpinorMatrix m;
  m << 0.0, std::complex<double>(p.x, -p.y), std::complex<double>(p.x, p.y), 0.0;
  return m;
}

SpinorMatrix free_sea_projector(const Momentum& p) {
  const double r = p.norm();
  if (r == 0.0) throw DomainError("free_sea_projector: undefined at p = 0");
  return 0.5 * (SpinorMatrix::Identity() - dirac_matrix({p.x / r, p.y / r}));
}

SpinorMatrix mean_field_free_symbol(const Momentum& p, const PhysicalParams& params) {
  return v_eff(p, params) * dirac_matrix(p);
}

SpinorMatrix sqrt_abs_free_symbol(const Momentum& p, const PhysicalParams& params) {
  return std::sqrt(v_eff(p, params) * p.norm()) * SpinorMatrix::Identity();
}

TranslationInvariantState::TranslationInvariantState(Profile profile, double cutoff)
    : profile_(std::move(profile)), cutoff_(cutoff) {
  if (!(cutoff > 0.0)) throw DomainError("TranslationInvariantState: cutoff must be positive");
  for (int k = 1; k <= 256; ++k) {
    const double c = profile_(cutoff * k / 256.0);
    if (!(std::abs(c) <= 0.5 + 1e-14))
      throw DomainError("TranslationInvariantState: |c(r)| exceeds 1/2");
  }
}

TranslationInvariantState TranslationInvariantState::free_sea(double cutoff) {
  return TranslationInvariantState([](double) { return -0.5; }, cutoff);
}

SpinorMatrix TranslationInvariantState::at(const Momentum& p) const {
  const double r = p.norm();
  if (r == 0.0) return SpinorMatrix::Zero();
  return profile_(r) * dirac_matrix({p.x / r, p.y / r});
}

namespace {

FreeEnergyTerms free_energy_at(const TranslationInvariantState& state, double v_F, int n) {
  const double cutoff = state.cutoff();
  const auto rule = quad::sqrt_mapped_radial_rule(n, cutoff);
  const auto g1 = quad::coulomb_channel_matrices(rule, cutoff, 1)[1];
  Eigen::VectorXd u(n);
  double kinetic = 0.0;
  for (int a = 0; a < n; ++a) {
    const double r = rule.nodes[a];
    const double c = state.coefficient(r);
    // tr(σ·p c σ·p̂) = 2c|p|, angular integral 2π.
    kinetic += rule.weights[a] * 4.0 * pi * c * r * r;
    u[a] = c * r;
  }
  // tr(f(p) f(q)) = 2 c c cos φ; the 1/|x| transform gives (2π)⁻¹/|p − q|
  // in the unitary convention and the ½(2π)² from the radial measure cancel.
  const double exchange = -u.dot(g1 * u);
  const double norm = 1.0 / (4.0 * pi * pi);
  return {norm * v_F * kinetic, norm * exchange};
}

}  // namespace

FreeEnergyTerms free_energy_terms(const TranslationInvariantState& state,
                                  const PhysicalParams& params, int radial_resolution) {
  params.validate();
  if (radial_resolution < 8) throw DomainError("free_energy_terms: radial_resolution < 8");
  const auto fine = free_energy_at(state, params.fermi_velocity, radial_resolution);
  const auto coarse = free_energy_at(state, params.fermi_velocity, radial_resolution / 2);
  const double diff = std::abs(fine.total() - coarse.total());
  if (diff > 1e-3 * std::abs(fine.total()) + 1e-10)
    throw IntegrationError("free_energy_density: radial quadrature not converged");
  return fine;
}

double free_energy_density(const TranslationInvariantState& state, const PhysicalParams& params,
                           int radial_resolution) {
  return free_energy_terms(state, params, radial_resolution).total();
}

}  // namespace bdf
