#include "bdf/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

#include "bdf/errors.hpp"
#include "bdf/linalg.hpp"
#include "bdf/mean_field.hpp"

namespace bdf {

using std::numbers::pi;

void GaussianDefect::validate(double spacing) const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("defect width must be positive");
  if (!std::isfinite(charge)) throw ConfigError("defect charge must be finite");
  if (1.0 / width < 2.0 * spacing)
    throw ConfigError("defect too wide for the grid: need 1/width >= 2 * spacing");
}

ExternalCharge::ExternalCharge(Kind kind, LatticePtr lattice, GaussianDefect g, double ramp,
                               Point2 velocity)
    : kind_(kind), lattice_(std::move(lattice)), defect_(g), ramp_time_(ramp), velocity_(velocity) {
  if (kind_ != Kind::none) defect_.validate(lattice_->spacing());
}

ExternalCharge ExternalCharge::none(LatticePtr lattice) {
  return {Kind::none, std::move(lattice), {}, 0.0, {}};
}

ExternalCharge ExternalCharge::static_defect(LatticePtr lattice, const GaussianDefect& g) {
  return {Kind::static_defect, std::move(lattice), g, 0.0, {}};
}

ExternalCharge ExternalCharge::ramped_defect(LatticePtr lattice, const GaussianDefect& g,
                                             double ramp_time) {
  if (!(ramp_time > 0.0)) throw ConfigError("ramp time must be positive");
  return {Kind::ramped_defect, std::move(lattice), g, ramp_time, {}};
}

ExternalCharge ExternalCharge::moving_defect(LatticePtr lattice, const GaussianDefect& g,
                                             Point2 velocity) {
  return {Kind::moving_defect, std::move(lattice), g, 0.0, velocity};
}

std::string ExternalCharge::id() const {
  switch (kind_) {
    case Kind::none: return "free_sea";
    case Kind::static_defect: return "static_defect";
    case Kind::ramped_defect: return "ramped_defect";
    case Kind::moving_defect: return "moving_defect";
  }
  return "unknown";
}

ChargeDensity ExternalCharge::evaluate(double t, bool derivative) const {
  ChargeDensity out(lattice_);
  if (kind_ == Kind::none) return out;
  double amp = 1.0, amp_dot = 0.0;
  if (kind_ == Kind::ramped_defect && t < ramp_time_) {
    const double s = std::sin(0.5 * pi * t / ramp_time_);
    amp = s * s;
    amp_dot = 0.5 * pi / ramp_time_ * std::sin(pi * t / ramp_time_);
  }
  Point2 c = defect_.center;
  Point2 cdot{};
  if (kind_ == Kind::moving_defect) {
    c = {c.x + velocity_.x * t, c.y + velocity_.y * t};
    cdot = velocity_;
  }
  const double pre = defect_.charge / (2.0 * pi);
  const double s2 = defect_.width * defect_.width;
  for (std::size_t k = 0; k < lattice_->size(); ++k) {
    const auto p = lattice_->momentum(k);
    const std::complex<double> phase = std::polar(1.0, -(p.x * c.x + p.y * c.y));
    const double shape = pre * std::exp(-0.5 * s2 * (p.x * p.x + p.y * p.y));
    std::complex<double> v;
    if (derivative)
      v = (amp_dot - std::complex<double>(0.0, amp * (p.x * cdot.x + p.y * cdot.y))) * shape * phase;
    else
      v = amp * shape * phase;
    out.values()[static_cast<Eigen::Index>(k)] = v;
  }
  return out;
}

ChargeDensity ExternalCharge::nu(double t) const { return evaluate(t, false); }
ChargeDensity ExternalCharge::nu_dot(double t) const { return evaluate(t, true); }

double ExternalCharge::continuity_defect(double t, double h) const {
  ChargeDensity diff = nu(t + h) - nu(t);
  diff *= 1.0 / h;
  diff -= nu_dot(t);
  return coulomb_norm(diff);
}

void PropagatorConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final >= dt)) throw ConfigError("t_final must be >= dt");
  if (predictor_iterations < 1) throw ConfigError("predictor_iterations must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  if (!(defect_bound > 0.0)) throw ConfigError("defect_bound must be positive");
}

long PropagatorConfig::steps() const { return std::max(1L, std::lround(t_final / dt)); }

namespace {

struct Snapshot {
  Eigen::MatrixXcd gamma;
  OperatorKernel q;
  ChargeDensity rho;
  Eigen::MatrixXcd exchange;
};

Snapshot analyse(const Eigen::MatrixXcd& gamma, const Discretization& disc) {
  OperatorKernel q(disc.grid(), gamma - disc.free_projector(), true);
  auto rho = density(q, disc.lattice());
  auto r = exchange_operator(q, disc);
  return {gamma, std::move(q), std::move(rho), std::move(r)};
}

Eigen::MatrixXcd field_matrix(const ChargeDensity& rho, const Eigen::MatrixXcd& exchange,
                              const ChargeDensity& nu, const Discretization& disc) {
  Eigen::MatrixXcd m = disc.free_operator() + direct_potential(rho - nu, disc) - exchange;
  return 0.5 * (m + m.adjoint());
}

Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& field, double t, const Eigen::MatrixXcd& g) {
  const auto u = linalg::unitary_exp(linalg::eigh(field), t);
  Eigen::MatrixXcd out = u * g * u.adjoint();
  return 0.5 * (out + out.adjoint());
}

}  // namespace

Trajectory propagate(const OperatorKernel& gamma0, const ExternalCharge& ext,
                     const Discretization& disc, const PropagatorConfig& config,
                     const RecordSink& sink) {
  config.validate();
  if (!(gamma0.grid()->spec() == disc.grid()->spec()))
    throw LatticeMismatch("propagate: initial state on another grid");
  if (!ext.lattice()->same_as(*disc.lattice()))
    throw LatticeMismatch("propagate: external charge on another lattice");
  if (projector_defect(gamma0) > 1e-8) throw DomainError("propagate: γ₀ is not a projector");

  Trajectory traj;
  const long steps = config.steps();
  const double dt = config.dt;

  Snapshot cur = analyse(gamma0.matrix(), disc);
  double alpha = 0.0;
  double prev_nudot2 = coulomb_inner(ext.nu_dot(0.0), ext.nu_dot(0.0)).real();
  long record_index = 0;

  const auto record = [&](double t) {
    const auto nu = ext.nu(t);
    TrajectoryRecord r{t, bdf_energy(cur.q, cur.rho, cur.exchange, nu, disc), 0.0, 0.0, 0.0, 0.0, {},
                       cur.rho};
    r.lyapunov = lyapunov(r.energy, nu);
    if (record_index == 0) alpha = r.lyapunov;
    r.alpha_et = alpha * std::exp(t);
    r.coulomb_residual = coulomb_norm(cur.rho - nu);
    r.projector_defect = projector_defect(OperatorKernel(disc.grid(), cur.gamma, true));
    if (config.record_norms) r.norms = norms(cur.q, disc);
    traj.max_projector_defect = std::max(traj.max_projector_defect, r.projector_defect);
    if (r.projector_defect > config.defect_bound && !traj.failed) {
      traj.failed = true;
      traj.failure = "projector defect " + std::to_string(r.projector_defect) + " at t = " +
                     std::to_string(t) + " exceeds the bound";
    }
    if (config.snapshot_every > 0 && record_index % config.snapshot_every == 0)
      traj.snapshots.emplace_back(t, OperatorKernel(disc.grid(), cur.gamma, true));
    if (sink) sink(r);
    traj.records.push_back(std::move(r));
    ++record_index;
  };

  record(0.0);
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    Eigen::MatrixXcd next;
    if (config.scheme == Scheme::euler_reference) {
      next = conjugate(field_matrix(cur.rho, cur.exchange, ext.nu(t), disc), dt, cur.gamma);
    } else {
      const auto nu_mid = ext.nu(t + 0.5 * dt);
      // First sweep starts from γ* = γ_n and reuses its exchange matrix.
      Snapshot star{cur.gamma, cur.q, cur.rho, cur.exchange};
      double prev_change = -1.0;
      for (int s = 0; s < config.predictor_iterations; ++s) {
        const Eigen::MatrixXcd g =
            conjugate(field_matrix(star.rho, star.exchange, nu_mid, disc), 0.5 * dt, cur.gamma);
        const double change = (g - star.gamma).norm();
        if (s >= 1 && change > prev_change && prev_change > 1e-12)
          throw StepFailure("predictor stagnated at t = " + std::to_string(t));
        prev_change = change;
        star = analyse(g, disc);
      }
      next = conjugate(field_matrix(star.rho, star.exchange, nu_mid, disc), dt, cur.gamma);
    }
    const double t_next = (n + 1) * dt;
    const auto nudot = ext.nu_dot(t_next);
    const double nudot2 = coulomb_inner(nudot, nudot).real();
    // α grows by ½∫‖ν̇‖²_𝒞, trapezoid per step.
    const double alpha_increment = 0.25 * dt * (prev_nudot2 + nudot2);
    prev_nudot2 = nudot2;
    cur = analyse(next, disc);
    alpha += alpha_increment;
    if ((n + 1) % config.record_every == 0 || n + 1 == steps) record(t_next);
  }
  traj.final_gamma = std::make_shared<OperatorKernel>(disc.grid(), cur.gamma, true);
  return traj;
}

DerivativeCheck energy_derivative_check(const Trajectory& traj, const ExternalCharge& ext) {
  DerivativeCheck out;
  for (std::size_t n = 0; n + 1 < traj.records.size(); ++n) {
    const auto& a = traj.records[n];
    const auto& b = traj.records[n + 1];
    const double h = b.t - a.t;
    ChargeDensity rho_mid = a.rho + b.rho;
    rho_mid *= 0.5;
    const double rhs = coulomb_inner(ext.nu_dot(0.5 * (a.t + b.t)), rho_mid).real();
    const double r = std::abs((b.energy.total - a.energy.total) / h + rhs);
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

std::vector<double> gronwall_envelope(const Trajectory& traj, const ExternalCharge& ext) {
  std::vector<double> margin;
  if (traj.records.empty()) return margin;
  double alpha = traj.records.front().lyapunov;
  double prev = 0.0;
  for (std::size_t n = 0; n < traj.records.size(); ++n) {
    const auto& r = traj.records[n];
    const auto nudot = ext.nu_dot(r.t);
    const double cur = 0.5 * coulomb_inner(nudot, nudot).real();
    if (n > 0) alpha += 0.5 * (r.t - traj.records[n - 1].t) * (prev + cur);
    prev = cur;
    margin.push_back(alpha * std::exp(r.t) - r.lyapunov);
  }
  return margin;
}

DiagnosticsCsvWriter::DiagnosticsCsvWriter(std::ostream& out, std::size_t capacity)
    : out_(out), queue_(capacity) {
  out_ << header() << '\n';
  consumer_ = std::thread([this] {
    while (auto row = queue_.pop()) out_ << format(*row) << '\n';
  });
}

DiagnosticsCsvWriter::~DiagnosticsCsvWriter() { finish(); }

void DiagnosticsCsvWriter::push(const TrajectoryRecord& r) { queue_.push(columns(r)); }

void DiagnosticsCsvWriter::finish() {
  if (finished_) return;
  finished_ = true;
  queue_.close();
  if (consumer_.joinable()) consumer_.join();
  out_.flush();
}

const char* DiagnosticsCsvWriter::header() {
  return "t,kinetic,external,direct,exchange,G,alpha_et,coulomb_residual,projector_defect,"
         "y_kinetic,y_hs,y_coulomb";
}

DiagnosticsCsvWriter::Row DiagnosticsCsvWriter::columns(const TrajectoryRecord& r) {
  return {r.t,
          r.energy.kinetic,
          r.energy.external,
          r.energy.direct,
          r.energy.exchange,
          r.lyapunov,
          r.alpha_et,
          r.coulomb_residual,
          r.projector_defect,
          r.norms.kinetic_trace_norm,
          r.norms.hs_weighted_norm,
          r.norms.coulomb_norm};
}

std::string DiagnosticsCsvWriter::format(const Row& row) {
  std::string line;
  char buf[32];
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    const auto res = std::to_chars(buf, buf + sizeof buf, row[i]);
    line.append(buf, res.ptr);
  }
  return line;
}

std::string DiagnosticsCsvWriter::row(const TrajectoryRecord& r) { return format(columns(r)); }

}  // namespace bdf
