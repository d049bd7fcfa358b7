#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bdf/dynamics.hpp"
#include "bdf/free_operators.hpp"
#include "bdf/momentum_grid.hpp"
#include "bdf/scf.hpp"
#include "bdf/state.hpp"

namespace bdf::runner {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { success = 0, config_error = 2, non_convergence = 3, invariant_violation = 4 };

struct ScenarioSpec {
  enum class Kind { free_sea, static_defect, ramped_defect, moving_defect } kind = Kind::free_sea;
  GaussianDefect defect;
  double ramp_time = 1.0;
  Point2 velocity;
};

struct InitialStateSpec {
  enum class Kind { free_sea, random_admissible, scf } kind = Kind::free_sea;
  double strength = 0.05;
};

struct CriticalSpec {
  int radial_resolution = 400;
  int m_max = 2;
  double tol_v = 1e-4;
  std::vector<double> v_grid{0.2, 0.5, 1.1, 2.0, 3.0};
};

struct CheckSpec {
  double strength = 0.3;
  int critical_resolution = 200;
};

struct RunConfig {
  GridSpec grid;
  PhysicalParams params;
  ScenarioSpec scenario;
  ScfConfig scf;
  PropagatorConfig propagator;
  InitialStateSpec initial_state;
  CriticalSpec critical;
  CheckSpec check;
  std::vector<double> gfunc_ratios{0.0, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 100.0, 1e4, 1e6};
  std::vector<double> veff_ratios{1.0, 0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::filesystem::path output_dir = "bdf-out";
  std::uint64_t seed = 0;
};

/// Parses and validates a JSON configuration. Unknown keys are errors.
/// Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

ExternalCharge make_external_charge(const ScenarioSpec& spec, const LatticePtr& lattice);

// Binary checkpoint: "BDF1", f64 Λ, u32 n, u8 offset, f64 v_F, u64 dim, then
// dim² complex entries row-major as little-endian (re, im) f64 pairs.
void write_checkpoint(const std::filesystem::path& path, const OperatorKernel& state,
                      const PhysicalParams& params);

struct Checkpoint {
  GridSpec grid;
  PhysicalParams params;
  OperatorKernel state;
};

/// Throws FormatError on bad magic, truncation, trailing bytes or when the
/// stored dimension does not match the stored grid, or `expected` if given.
Checkpoint read_checkpoint(const std::filesystem::path& path,
                           const std::optional<GridSpec>& expected = std::nullopt);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

void to_json(nlohmann::json& j, const CheckOutcome& c);

/// Invariant suite on a seeded random admissible state.
std::vector<CheckOutcome> run_invariant_suite(const RunConfig& config);

struct RunOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
};

/// Runs a subcommand end to end and returns the process exit code. Every
/// run that gets past config parsing leaves manifest.json in the output
/// directory.
int run(const std::string& subcommand, const RunOptions& options);

const char* version() noexcept;

}  // namespace bdf::runner
