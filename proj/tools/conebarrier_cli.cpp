#include "conebarrier/io.hpp"
#include "conebarrier/oracle.hpp"
#include "conebarrier/validity.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace conebarrier;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitCollision = 1;
constexpr int kExitConfig = 2;

const std::set<std::string> kEmitKinds = {"trace-csv", "events-json", "summary-json", "plotdata"};

struct RunManifest
{
  std::vector<std::string> configs;
  std::string out;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> barrier;
  std::vector<std::string> emit = {"trace-csv", "events-json", "summary-json", "plotdata"};
  std::uint64_t seed = 1;
};

std::string default_out()
{
  const char* env = std::getenv("CONEBARRIER_OUT");
  return env && *env ? env : "out";
}

// Parses and overrides every config up front so a bad file leaves no output behind.
std::vector<ScenarioConfig> load_manifest(const RunManifest& m)
{
  if (m.dt && !(*m.dt > 0.0)) throw ConfigError("--dt must be positive");
  if (m.duration && !(*m.duration > 0.0)) throw ConfigError("--duration must be positive");
  for (const auto& e : m.emit) {
    if (!kEmitKinds.contains(e)) throw ConfigError("--emit: unknown output '" + e + "'");
  }
  std::vector<fs::path> paths(m.configs.begin(), m.configs.end());
  std::vector<ScenarioConfig> configs;
  std::set<std::string> names;
  for (const auto& p : expand_config_paths(paths)) {
    ScenarioConfig cfg = load_config(p);
    if (m.dt) cfg.dt = *m.dt;
    if (m.duration) cfg.duration = *m.duration;
    if (m.barrier) {
      try {
        cfg.barrier = barrier_kind_from_string(*m.barrier);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--barrier: ") + e.what());
      }
    }
    cfg.validate();
    if (!names.insert(cfg.name).second) throw ConfigError("duplicate scenario name '" + cfg.name + "'");
    configs.push_back(std::move(cfg));
  }
  if (configs.empty()) throw ConfigError("no scenario configs found");
  return configs;
}

void write_text(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit_outputs(const ScenarioTrace& trace, const fs::path& dir, const std::vector<std::string>& emit)
{
  fs::create_directories(dir);
  const std::set<std::string> want(emit.begin(), emit.end());
  if (want.contains("trace-csv")) {
    std::ostringstream os;
    write_trace_csv(os, trace);
    write_text(dir / "trace.csv", os.str());
  }
  if (want.contains("events-json")) write_text(dir / "events.json", events_to_json(trace).dump(2) + "\n");
  if (want.contains("summary-json")) write_text(dir / "summary.json", summary_to_json(trace).dump(2) + "\n");
  if (want.contains("plotdata")) write_text(dir / "plotdata.json", plot_data_to_json(trace).dump() + "\n");
}

// Scenarios are independent, so each runs on its own task. Results come back in config order.
std::vector<ScenarioTrace> run_all(const std::vector<ScenarioConfig>& configs)
{
  std::vector<std::future<ScenarioTrace>> jobs;
  jobs.reserve(configs.size());
  for (const auto& cfg : configs) jobs.push_back(std::async(std::launch::async, run_scenario, std::cref(cfg)));
  std::vector<ScenarioTrace> traces;
  traces.reserve(jobs.size());
  for (auto& j : jobs) traces.push_back(j.get());
  return traces;
}

int cmd_run(const RunManifest& m)
{
  std::vector<ScenarioConfig> configs;
  try {
    configs = load_manifest(m);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  bool collision = false;
  const std::vector<ScenarioTrace> traces = run_all(configs);
  for (const auto& trace : traces) {
    const ScenarioConfig& cfg = trace.config;
    emit_outputs(trace, fs::path(m.out) / cfg.name, m.emit);
    const auto& s = trace.summary;
    std::cout << cfg.name << ": behavior=" << to_string(s.behavior) << " collisions=" << s.collisions
              << " min_h=" << format_double(s.min_h) << " min_separation=" << format_double(s.min_separation)
              << " max_abs_beta=" << format_double(s.max_abs_beta) << "\n";
    if (s.collisions > 0) {
      collision = true;
      std::cerr << cfg.name << ": collision event(s) recorded\n";
    }
  }
  return collision ? kExitCollision : kExitOk;
}

struct ValidityOptions
{
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
  std::optional<std::string> barrier;
  std::optional<std::string> model;
  std::optional<std::string> motion;
  std::optional<std::string> out;
  bool json = false;
};

int cmd_validity(const ValidityOptions& o)
{
  if (o.samples < 1000) {
    std::cerr << "config error: --samples must be at least 1000\n";
    return kExitConfig;
  }
  Json report;
  try {
    if (o.barrier || o.model || o.motion) {
      const BarrierKind b = barrier_kind_from_string(o.barrier.value_or("c3bf"));
      const ModelKind mk = model_kind_from_string(o.model.value_or("unicycle"));
      std::vector<ObstacleMotion> motions;
      if (!o.motion || *o.motion == "static") motions.push_back(ObstacleMotion::static_obstacle);
      if (!o.motion || *o.motion == "moving") motions.push_back(ObstacleMotion::moving);
      if (motions.empty()) throw ConfigError("--motion must be static or moving");
      if (b == BarrierKind::none) throw ConfigError("--barrier none has no verdict");
      report["rows"] = Json::array();
      for (ObstacleMotion mo : motions) {
        const ValidityReport r = validity_probe(b, mk, mo, o.samples, o.seed);
        std::cout << to_string(b) << " " << to_string(mk) << " " << to_string(mo) << ": " << r.verdict() << "\n";
        report["rows"].push_back(validity_report_to_json(r));
      }
    } else {
      const auto rows = validity_matrix(o.samples, o.seed);
      std::cout << validity_matrix_text(rows);
      report = validity_matrix_to_json(rows);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  report["samples"] = o.samples;
  report["seed"] = o.seed;
  if (o.json) std::cout << report.dump(2) << "\n";
  if (o.out) {
    fs::create_directories(*o.out);
    write_text(fs::path(*o.out) / "validity.json", report.dump(2) + "\n");
  }
  return kExitOk;
}

struct AuditOptions
{
  RunManifest run;
  std::size_t qp_instances = 1000;
  double grid_step = 1e-3;
  double grid_half_width = 10.0;
  double beta_threshold = 0.3;
  double divergence_fraction = 0.05;
};

int cmd_audit(const AuditOptions& o)
{
  std::vector<ScenarioConfig> configs;
  try {
    configs = load_manifest(o.run);
    if (!(o.grid_step > 0.0) || !(o.grid_half_width > 0.0)) throw ConfigError("grid settings must be positive");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  Json report;
  Json criteria = Json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, Json detail) {
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
    criteria.push_back({{"criterion", name}, {"pass", pass}, {"detail", std::move(detail)}});
  };

  const std::vector<ScenarioTrace> traces = run_all(configs);
  for (const auto& trace : traces) {
    const ScenarioConfig& cfg = trace.config;
    const bool enabled = cfg.barrier != BarrierKind::none;
    // Discrete tolerance scales with the step: 1e-3 at dt = 0.01.
    const double tol = 0.1 * cfg.dt;

    if (enabled) {
      record(cfg.name + "/collision_free", trace.summary.collision_free,
             {{"collisions", trace.summary.collisions}});
      const AuditReport inv = invariance_audit(trace, cfg.kappa);
      Json d = audit_to_json(inv);
      d["tolerance"] = tol;
      record(cfg.name + "/invariance", inv.worst_violation <= tol, d);
      if (cfg.expect_recovery) {
        // Rate check assumes κ(h) = γh; other class-K shapes only need the sign change.
        const double gamma = cfg.kappa.kind() == ClassK::Kind::linear ? cfg.kappa.gamma() : 0.0;
        bool ok = !inv.obstacles.empty();
        for (const auto& a : inv.obstacles) {
          if (!a.observed || a.started_safe) continue;
          const bool rate_ok = gamma == 0.0 || (a.decay_rate && std::abs(*a.decay_rate - gamma) <= 0.3 * gamma);
          ok = ok && rate_ok && a.crossed_zero && a.magnitude_non_increasing;
        }
        record(cfg.name + "/recovery", ok, audit_to_json(inv));
      }
    } else {
      const AuditReport inv = invariance_audit(trace, cfg.kappa);
      record(cfg.name + "/negative_control_violates", inv.collision || inv.worst_violation > tol,
             audit_to_json(inv));
    }
    if (cfg.expected_behavior) {
      record(cfg.name + "/behavior", trace.summary.behavior == *cfg.expected_behavior,
             {{"expected", to_string(*cfg.expected_behavior)}, {"observed", to_string(trace.summary.behavior)}});
    }
    if (cfg.model.kind == ModelKind::bicycle && enabled) {
      const BetaAudit b = beta_smallness_audit(trace, o.beta_threshold);
      record(cfg.name + "/beta_smallness", !b.flagged && b.relative_divergence < o.divergence_fraction,
             beta_audit_to_json(b));
    }
  }

  const QpOracleStudy qp = qp_oracle_study(o.qp_instances, o.run.seed, o.grid_step, o.grid_half_width);
  record("qp_oracle", qp.failures == 0,
         {{"instances", qp.instances},
          {"grid_step", qp.grid_step},
          {"grid_half_width", qp.half_width},
          {"failures", qp.failures},
          {"max_gap_ratio", qp.max_gap_ratio},
          {"max_closed_form_gap", qp.max_closed_form_gap},
          {"max_complementarity", qp.max_complementarity}});

  report["criteria"] = criteria;
  report["pass"] = all_pass;
  report["seed"] = o.run.seed;
  fs::create_directories(o.run.out);
  write_text(fs::path(o.run.out) / "audit.json", report.dump(2) + "\n");
  return all_pass ? kExitOk : kExitCollision;
}

void add_run_options(CLI::App* sub, RunManifest& m)
{
  sub->add_option("-c,--config", m.configs, "Scenario config files or directories")->required();
  sub->add_option("-o,--out", m.out, "Output directory (default: $CONEBARRIER_OUT or ./out)");
  sub->add_option("--dt", m.dt, "Override the integration step (s)");
  sub->add_option("--duration", m.duration, "Override the simulated duration (s)");
  sub->add_option("--barrier", m.barrier, "Override the barrier: c3bf, ellipse, hocbf or none");
  sub->add_option("--seed", m.seed, "Seed for randomized checks");
  sub->add_option("--emit", m.emit, "Outputs: trace-csv, events-json, summary-json, plotdata")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Collision-cone barrier safety filter: simulation, validity probe and audits"};
  app.require_subcommand(1);

  RunManifest run;
  run.out = default_out();
  auto* run_cmd = app.add_subcommand("run", "Simulate scenarios and write traces");
  add_run_options(run_cmd, run);

  ValidityOptions validity;
  auto* val_cmd = app.add_subcommand("validity", "Probe barrier validity and print the verdict matrix");
  val_cmd->add_option("--samples", validity.samples, "Samples per cell (at least 1000)");
  val_cmd->add_option("--seed", validity.seed, "Random seed");
  val_cmd->add_option("--barrier", validity.barrier, "Single combination: barrier");
  val_cmd->add_option("--model", validity.model, "Single combination: unicycle, bicycle or pointmass");
  val_cmd->add_option("--motion", validity.motion, "Single combination: static or moving");
  val_cmd->add_option("-o,--out", validity.out, "Write validity.json into this directory");
  val_cmd->add_flag("--json", validity.json, "Also print the JSON report");

  AuditOptions audit;
  audit.run.out = default_out();
  auto* audit_cmd = app.add_subcommand("audit", "Invariance, slip and QP-oracle checks with pass/fail output");
  add_run_options(audit_cmd, audit.run);
  audit_cmd->add_option("--qp-instances", audit.qp_instances, "Random QP instances for the grid oracle");
  audit_cmd->add_option("--grid-step", audit.grid_step, "Grid oracle resolution");
  audit_cmd->add_option("--grid-half-width", audit.grid_half_width, "Grid oracle box half width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (val_cmd->parsed()) return cmd_validity(validity);
    if (audit_cmd->parsed()) return cmd_audit(audit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
