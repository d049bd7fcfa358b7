#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdf/critical_coupling.hpp"
#include "bdf/errors.hpp"
#include "bdf/free_operators.hpp"
#include "bdf/quadrature.hpp"

using namespace bdf;
using std::numbers::pi;

namespace {

const CriticalCouplingSolver& solver() {
  static const CriticalCouplingSolver s(200, 4);
  return s;
}

// Rayleigh quotient of the m = 0 channel for a trial profile u, on a plain
// product Gauss rule in t with r = t². A₀(r, s) = 4K(k)/(r + s) in closed
// form. Shares nothing with the Nyström solver beyond g.
double rayleigh_quotient(const std::function<double(double)>& u, double v) {
  const auto rule = quad::gauss_legendre(300, 0.0, 1.0);
  const std::size_t n = rule.nodes.size();
  std::vector<double> r(n), w(n), ur(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    r[i] = t * t;
    w[i] = rule.weights[i] * 2.0 * t;
    ur[i] = u(r[i]) * r[i];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    den += w[a] * ur[a] * ur[a] * (v + g_cached(1.0 / r[a]));
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const double k = 2.0 * std::sqrt(r[a] * r[b]) / (r[a] + r[b]);
      num += w[a] * w[b] * ur[a] * ur[b] * 4.0 * std::comp_ellint_1(k) / (r[a] + r[b]);
    }
  }
  return num / (2.0 * pi) / den;
}

}  // namespace

TEST_SUITE("critical_coupling") {

TEST_CASE("h decreases with the Fermi velocity") {
  for (double v : {0.2, 0.5, 1.1, 2.0}) {
    const double a = solver().estimate_h(v).h;
    const double b = solver().estimate_h(2.0 * v).h;
    CHECK(b < a);
  }
}

TEST_CASE("m = 0 is the maximizing channel on [0.2, 3]") {
  for (double v : {0.2, 0.5, 1.1, 2.0, 3.0}) {
    const auto e = solver().estimate_h(v);
    CHECK(e.channel == 0);
    CHECK(e.per_channel.size() == 5);
    for (std::size_t m = 1; m < e.per_channel.size(); ++m) CHECK(e.per_channel[m] < e.per_channel[0]);
  }
}

TEST_CASE("Kato-type upper bound") {
  const double kato = std::pow(std::tgamma(0.25), 2) / (2.0 * std::pow(std::tgamma(0.75), 2));
  const double discrete = solver().kato_constant();
  // The Nyström best constant overshoots the continuum one slightly.
  CHECK(std::abs(discrete / kato - 1.0) <= 0.05);
  for (double v : {0.2, 0.5, 1.1, 2.0, 3.0}) {
    const double h = solver().estimate_h(v).h;
    CHECK(h <= discrete / (v + g_cached(1.0)));
    CHECK(h <= kato / (v + g_cached(1.0)) * 1.05);
  }
}

TEST_CASE("trial-function lower bounds") {
  for (double v : {0.5, 1.1}) {
    const double h = solver().estimate_h(v).h;
    double best = 0.0;
    for (double a : {0.5, 1.0, 1.3, 1.6}) {
      const double rq = rayleigh_quotient([a](double r) { return std::pow(r, -a) * (1.0 - r * r); }, v);
      CHECK(rq <= h * 1.01);
      best = std::max(best, rq);
    }
    CHECK(best >= 0.7 * h);
  }
}

TEST_CASE("coarse and fine resolutions agree") {
  for (double v : {0.2, 1.1, 3.0}) {
    const auto e = solver().estimate_h(v);
    CHECK(std::abs(e.h - e.h_coarse) <= 0.01 * e.h);
  }
}

TEST_CASE("critical velocity bracket") {
  const auto vc = estimate_v_c(solver(), 1e-4);
  CHECK(vc.upper - vc.lower <= 1e-4);
  CHECK(solver().estimate_h(vc.lower).h > 2.0);
  CHECK(solver().estimate_h(vc.upper).h < 2.0);
  CHECK(vc.v_c < 2.0560);
  CHECK(vc.alpha_c == doctest::Approx(1.0 / vc.v_c));
  CHECK(vc.slope < 0.0);
  const auto report = critical_report(solver(), {0.5, 1.0}, vc);
  CHECK(report.at("h_values").size() == 2);
  CHECK(report.at("v_c").get<double>() == vc.v_c);
  CHECK(report.at("resolution").at("radial_nodes").get<int>() == 200);
}

}
