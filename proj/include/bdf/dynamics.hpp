#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "bdf/energy.hpp"
#include "bdf/spsc_queue.hpp"
#include "bdf/state.hpp"

namespace bdf {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Gaussian charge of total charge Z and position-space width σ:
///   ν̂(k) = Z/(2π) · exp(−σ²|k|²/2) · exp(−i k·c).
struct GaussianDefect {
  double charge = 0.05;  // Z
  double width = 4.0;    // σ
  Point2 center;

  /// Throws ConfigError unless σ > 0 and the momentum width 1/σ spans at
  /// least two lattice spacings.
  void validate(double spacing) const;
};

/// Time-dependent external density ν(t) with analytic ν̇(t).
class ExternalCharge {
 public:
  enum class Kind { none, static_defect, ramped_defect, moving_defect };

  static ExternalCharge none(LatticePtr lattice);
  static ExternalCharge static_defect(LatticePtr lattice, const GaussianDefect& g);
  /// Amplitude sin²(πt/2T) for t < T, then 1.
  static ExternalCharge ramped_defect(LatticePtr lattice, const GaussianDefect& g, double ramp_time);
  /// Centre c(t) = c₀ + v t.
  static ExternalCharge moving_defect(LatticePtr lattice, const GaussianDefect& g, Point2 velocity);

  Kind kind() const noexcept { return kind_; }
  std::string id() const;
  const LatticePtr& lattice() const noexcept { return lattice_; }

  ChargeDensity nu(double t) const;
  ChargeDensity nu_dot(double t) const;

  /// ‖(ν(t + h) − ν(t))/h − ν̇(t)‖_𝒞; tends to zero with h.
  double continuity_defect(double t, double h) const;

 private:
  ExternalCharge(Kind kind, LatticePtr lattice, GaussianDefect g, double ramp, Point2 velocity);
  ChargeDensity evaluate(double t, bool derivative) const;

  Kind kind_;
  LatticePtr lattice_;
  GaussianDefect defect_;
  double ramp_time_;
  Point2 velocity_;
};

enum class Scheme { midpoint_unitary, euler_reference };

struct PropagatorConfig {
  double dt = 0.05;
  double t_final = 1.0;
  Scheme scheme = Scheme::midpoint_unitary;
  int predictor_iterations = 2;
  int record_every = 1;
  /// Keep a γ snapshot every this many records (0: only the final state).
  int snapshot_every = 0;
  bool record_norms = true;
  /// Runs whose projector defect exceeds this at a record are marked failed.
  double defect_bound = 1e-9;

  void validate() const;
  long steps() const;
};

struct TrajectoryRecord {
  double t = 0.0;
  EnergyBreakdown energy;
  double lyapunov = 0.0;        // 𝒢(t)
  double alpha_et = 0.0;        // α(t)eᵗ, accumulated per step
  double coulomb_residual = 0.0;  // ‖ρ_Q − ν‖_𝒞
  double projector_defect = 0.0;
  StateNorms norms;
  ChargeDensity rho;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::vector<std::pair<double, OperatorKernel>> snapshots;
  std::shared_ptr<OperatorKernel> final_gamma;
  bool failed = false;
  std::string failure;
  double max_projector_defect = 0.0;
};

using RecordSink = std::function<void(const TrajectoryRecord&)>;

/// Integrates i dγ/dt = [𝒟_{Q(t)}, γ(t)] by unitary conjugation. Throws
/// StepFailure when predictor sweeps stop contracting, DomainError when γ₀
/// is not a projector.
Trajectory propagate(const OperatorKernel& gamma0, const ExternalCharge& ext,
                     const Discretization& disc, const PropagatorConfig& config,
                     const RecordSink& sink = {});

struct DerivativeCheck {
  std::vector<double> residuals;  // |ΔE/Δt + D(ν̇, ρ_Q)| at step midpoints
  double max_residual = 0.0;
};

/// Needs consecutive records (record_every = 1).
DerivativeCheck energy_derivative_check(const Trajectory& traj, const ExternalCharge& ext);

/// α(t)eᵗ − 𝒢(t) per record, α by trapezoidal quadrature of ½‖ν̇‖²_𝒞 on
/// the record times.
std::vector<double> gronwall_envelope(const Trajectory& traj, const ExternalCharge& ext);

/// Streams records as CSV on a consumer thread fed through an SPSC queue.
class DiagnosticsCsvWriter {
 public:
  explicit DiagnosticsCsvWriter(std::ostream& out, std::size_t capacity = 64);
  ~DiagnosticsCsvWriter();
  DiagnosticsCsvWriter(const DiagnosticsCsvWriter&) = delete;
  DiagnosticsCsvWriter& operator=(const DiagnosticsCsvWriter&) = delete;

  void push(const TrajectoryRecord& r);
  /// Drains the queue and joins the consumer. Idempotent.
  void finish();

  static const char* header();
  static std::string row(const TrajectoryRecord& r);

 private:
  using Row = std::array<double, 12>;
  static Row columns(const TrajectoryRecord& r);
  static std::string format(const Row& row);

  std::ostream& out_;
  SpscQueue<Row> queue_;
  std::thread consumer_;
  bool finished_ = false;
};

}  // namespace bdf
