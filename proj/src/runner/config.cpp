#include <fstream>
#include <set>
#include <sstream>

#include "bdf/errors.hpp"
#include "bdf/runner.hpp"

namespace bdf::runner {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  std::optional<Section> child(const char* key) {
    used_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point2 read_point(Section& s, const char* key, Point2 fallback) {
  std::vector<double> v{fallback.x, fallback.y};
  s.read(key, v);
  if (v.size() != 2) throw ConfigError(std::string("scenario.") + key + ": expected [x, y]");
  return {v[0], v[1]};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(root, "config");
  int schema = -1;
  top.read("schema_version", schema);
  if (schema != kSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));

  RunConfig c;
  if (auto s = top.child("grid")) {
    s->read("cutoff", c.grid.cutoff);
    s->read("points_per_axis", c.grid.points_per_axis);
    s->read("offset", c.grid.offset);
    s->finish();
  }
  c.params.cutoff = c.grid.cutoff;
  if (auto s = top.child("params")) {
    s->read("fermi_velocity", c.params.fermi_velocity);
    if (s->has("cutoff")) {
      double cutoff = 0.0;
      s->read("cutoff", cutoff);
      if (cutoff != c.grid.cutoff) throw ConfigError("params.cutoff differs from grid.cutoff");
    }
    s->finish();
  }
  if (auto s = top.child("scenario")) {
    std::string kind = "free_sea";
    s->read("kind", kind);
    if (kind == "free_sea") c.scenario.kind = ScenarioSpec::Kind::free_sea;
    else if (kind == "static_defect") c.scenario.kind = ScenarioSpec::Kind::static_defect;
    else if (kind == "ramped_defect") c.scenario.kind = ScenarioSpec::Kind::ramped_defect;
    else if (kind == "moving_defect") c.scenario.kind = ScenarioSpec::Kind::moving_defect;
    else throw ConfigError("scenario.kind: unknown scenario '" + kind + "'");
    s->read("charge", c.scenario.defect.charge);
    s->read("width", c.scenario.defect.width);
    c.scenario.defect.center = read_point(*s, "center", c.scenario.defect.center);
    s->read("ramp_time", c.scenario.ramp_time);
    c.scenario.velocity = read_point(*s, "velocity", c.scenario.velocity);
    s->finish();
  }
  if (auto s = top.child("scf")) {
    s->read("max_iterations", c.scf.max_iterations);
    s->read("mixing", c.scf.mixing);
    s->read("tol_projector", c.scf.tol_projector);
    s->read("tol_commutator", c.scf.tol_commutator);
    s->read("max_redamping", c.scf.max_redamping);
    s->finish();
  }
  if (auto s = top.child("propagator")) {
    auto& p = c.propagator;
    s->read("dt", p.dt);
    s->read("t_final", p.t_final);
    std::string scheme = "midpoint_unitary";
    s->read("scheme", scheme);
    if (scheme == "midpoint_unitary") p.scheme = Scheme::midpoint_unitary;
    else if (scheme == "euler_reference") p.scheme = Scheme::euler_reference;
    else throw ConfigError("propagator.scheme: unknown scheme '" + scheme + "'");
    s->read("predictor_iterations", p.predictor_iterations);
    s->read("record_every", p.record_every);
    s->read("snapshot_every", p.snapshot_every);
    s->read("record_norms", p.record_norms);
    s->read("defect_bound", p.defect_bound);
    s->finish();
  }
  if (auto s = top.child("initial_state")) {
    std::string kind = "free_sea";
    s->read("kind", kind);
    if (kind == "free_sea") c.initial_state.kind = InitialStateSpec::Kind::free_sea;
    else if (kind == "random_admissible") c.initial_state.kind = InitialStateSpec::Kind::random_admissible;
    else if (kind == "scf") c.initial_state.kind = InitialStateSpec::Kind::scf;
    else throw ConfigError("initial_state.kind: unknown kind '" + kind + "'");
    s->read("strength", c.initial_state.strength);
    s->finish();
  }
  if (auto s = top.child("critical")) {
    s->read("radial_resolution", c.critical.radial_resolution);
    s->read("m_max", c.critical.m_max);
    s->read("tol_v", c.critical.tol_v);
    s->read("v_grid", c.critical.v_grid);
    s->finish();
  }
  if (auto s = top.child("check")) {
    s->read("strength", c.check.strength);
    s->read("critical_resolution", c.check.critical_resolution);
    s->finish();
  }
  if (auto s = top.child("gfunc")) {
    s->read("ratios", c.gfunc_ratios);
    s->finish();
  }
  if (auto s = top.child("veff")) {
    s->read("ratios", c.veff_ratios);
    s->finish();
  }
  std::string out = c.output_dir.string();
  top.read("output_dir", out);
  c.output_dir = out;
  top.read("seed", c.seed);
  top.finish();

  // Validation.
  c.grid.validate();
  c.params.validate();
  c.scf.validate();
  c.propagator.validate();
  if (c.scenario.kind != ScenarioSpec::Kind::free_sea) c.scenario.defect.validate(c.grid.spacing());
  if (c.scenario.kind == ScenarioSpec::Kind::ramped_defect && !(c.scenario.ramp_time > 0.0))
    throw ConfigError("scenario.ramp_time must be positive");
  if (!(c.initial_state.strength >= 0.0)) throw ConfigError("initial_state.strength must be >= 0");
  if (c.critical.radial_resolution < 16) throw ConfigError("critical.radial_resolution must be >= 16");
  if (c.critical.m_max < 0) throw ConfigError("critical.m_max must be >= 0");
  if (!(c.critical.tol_v > 0.0)) throw ConfigError("critical.tol_v must be positive");
  for (double v : c.critical.v_grid)
    if (!(v > 0.0)) throw ConfigError("critical.v_grid entries must be positive");
  if (!(c.check.strength >= 0.0)) throw ConfigError("check.strength must be >= 0");
  if (c.check.critical_resolution < 16) throw ConfigError("check.critical_resolution must be >= 16");
  for (double r : c.gfunc_ratios)
    if (!(r >= 0.0)) throw ConfigError("gfunc.ratios must be >= 0");
  for (double r : c.veff_ratios)
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("veff.ratios must lie in (0, 1]");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExternalCharge make_external_charge(const ScenarioSpec& spec, const LatticePtr& lattice) {
  switch (spec.kind) {
    case ScenarioSpec::Kind::free_sea: return ExternalCharge::none(lattice);
    case ScenarioSpec::Kind::static_defect: return ExternalCharge::static_defect(lattice, spec.defect);
    case ScenarioSpec::Kind::ramped_defect:
      return ExternalCharge::ramped_defect(lattice, spec.defect, spec.ramp_time);
    case ScenarioSpec::Kind::moving_defect:
      return ExternalCharge::moving_defect(lattice, spec.defect, spec.velocity);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace bdf::runner
