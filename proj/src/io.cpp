#include "conebarrier/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace conebarrier
{

namespace
{

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const Json& j, const std::string& where)
{
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where)
{
  if (!j.contains(key)) return fallback;
  if constexpr (std::is_same_v<T, double>) {
    return number(j.at(key), where + "." + key);
  } else {
    try {
      return j.at(key).get<T>();
    } catch (const Json::exception&) {
      throw ConfigError(where + "." + key + ": wrong type");
    }
  }
}

VectorXd vector_from(const Json& j, const std::string& where)
{
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], where);
  return v;
}

Vector2d vec2_from(const Json& j, const std::string& where)
{
  const VectorXd v = vector_from(j, where);
  if (v.size() != 2) throw ConfigError(where + ": expected two numbers");
  return {v(0), v(1)};
}

Json to_array(const VectorXd& v)
{
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_array(const Vector2d& v)
{
  return Json::array({v.x(), v.y()});
}

// Numbers that may be NaN/inf are written as null in JSON.
Json finite_or_null(double v)
{
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

template <typename F>
auto wrap_errors(const std::string& where, F&& f)
{
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<std::string> state_names(ModelKind kind)
{
  switch (kind) {
    case ModelKind::unicycle: return {"x", "y", "theta", "v", "omega"};
    case ModelKind::bicycle: return {"x", "y", "theta", "v"};
    case ModelKind::pointmass: return {"x", "y", "vx", "vy"};
  }
  return {};
}

std::vector<std::string> input_names(ModelKind kind)
{
  switch (kind) {
    case ModelKind::unicycle: return {"a", "alpha"};
    case ModelKind::bicycle: return {"a", "beta"};
    case ModelKind::pointmass: return {"ax", "ay"};
  }
  return {};
}

const std::vector<EventKind> kFlagEvents = {EventKind::collision,        EventKind::degenerate,
                                            EventKind::infeasible,       EventKind::perception_entry,
                                            EventKind::saturation,       EventKind::integration_failure};

FilterStatus status_from_string(const std::string& s)
{
  if (s == "inactive") return FilterStatus::inactive;
  if (s == "corrected") return FilterStatus::corrected;
  if (s == "infeasible") return FilterStatus::infeasible;
  throw std::invalid_argument("unknown filter status: " + s);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Json class_k_to_json(const ClassK& k)
{
  Json j;
  j["kind"] = to_string(k.kind());
  if (k.kind() == ClassK::Kind::tabulated) {
    Json pts = Json::array();
    for (const auto& [h, v] : k.table()) pts.push_back(Json::array({h, v}));
    j["points"] = pts;
  } else {
    j["gamma"] = k.gamma();
  }
  return j;
}

ClassK class_k_from_json(const Json& j)
{
  const std::string where = "kappa";
  if (j.is_number()) return wrap_errors(where, [&] { return ClassK::linear(j.get<double>()); });
  check_keys(j, {"kind", "gamma", "points"}, where);
  const std::string kind = get_or<std::string>(j, "kind", "linear", where);
  return wrap_errors(where, [&] {
    if (kind == "linear") return ClassK::linear(get_or(j, "gamma", 1.0, where));
    if (kind == "cubic") return ClassK::cubic(get_or(j, "gamma", 1.0, where));
    if (kind == "tabulated") {
      if (!j.contains("points") || !j.at("points").is_array()) throw ConfigError(where + ": points required");
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : j.at("points")) {
        const Vector2d q = vec2_from(p, where + ".points");
        pts.emplace_back(q.x(), q.y());
      }
      return ClassK::tabulated(std::move(pts));
    }
    throw ConfigError(where + ": unknown kind '" + kind + "'");
  });
}

ScenarioConfig config_from_json(const Json& j)
{
  check_keys(j,
             {"name", "model", "initial_state", "obstacles", "controller", "barrier", "kappa", "kappa1",
              "perception_radius", "dt", "duration", "halt_on_collision", "saturation", "thresholds",
              "expected_behavior", "expect_recovery"},
             "config");
  ScenarioConfig cfg;
  cfg.name = get_or<std::string>(j, "name", cfg.name, "config");

  if (!j.contains("model")) throw ConfigError(cfg.name + ": model is required");
  const Json& m = j.at("model");
  check_keys(m, {"kind", "body_offset", "width", "l_f", "l_r"}, "model");
  cfg.model.kind = wrap_errors("model.kind", [&] {
    return model_kind_from_string(get_or<std::string>(m, "kind", "unicycle", "model"));
  });
  cfg.model.body_offset = get_or(m, "body_offset", cfg.model.body_offset, "model");
  cfg.model.width = get_or(m, "width", cfg.model.width, "model");
  cfg.model.geometry.l_f = get_or(m, "l_f", cfg.model.geometry.l_f, "model");
  cfg.model.geometry.l_r = get_or(m, "l_r", cfg.model.geometry.l_r, "model");

  if (!j.contains("initial_state")) throw ConfigError(cfg.name + ": initial_state is required");
  cfg.initial_state = vector_from(j.at("initial_state"), "initial_state");

  if (j.contains("obstacles")) {
    const Json& list = j.at("obstacles");
    if (!list.is_array()) throw ConfigError("obstacles: expected an array");
    for (const auto& o : list) {
      check_keys(o, {"center", "velocity", "axes", "changes"}, "obstacle");
      ObstacleSpec spec;
      if (!o.contains("center")) throw ConfigError("obstacle: center is required");
      spec.initial.center = vec2_from(o.at("center"), "obstacle.center");
      if (o.contains("velocity")) spec.initial.velocity = vec2_from(o.at("velocity"), "obstacle.velocity");
      if (o.contains("axes")) {
        const Vector2d ax = vec2_from(o.at("axes"), "obstacle.axes");
        spec.initial.c1 = ax.x();
        spec.initial.c2 = ax.y();
      }
      if (o.contains("changes")) {
        if (!o.at("changes").is_array()) throw ConfigError("obstacle.changes: expected an array");
        for (const auto& c : o.at("changes")) {
          check_keys(c, {"time", "velocity"}, "obstacle.changes");
          if (!c.contains("time") || !c.contains("velocity")) {
            throw ConfigError("obstacle.changes: time and velocity are required");
          }
          spec.changes.push_back({number(c.at("time"), "obstacle.changes.time"),
                                  vec2_from(c.at("velocity"), "obstacle.changes.velocity")});
        }
      }
      cfg.obstacles.push_back(std::move(spec));
    }
  }

  if (j.contains("controller")) {
    const Json& c = j.at("controller");
    check_keys(c,
               {"kind", "k1", "k2", "v_des", "v_max", "heading", "path", "cross_track_gain", "softening",
                "max_steer"},
               "controller");
    auto& ctrl = cfg.controller;
    const std::string kind = get_or<std::string>(c, "kind", "velocity_p", "controller");
    if (kind == "velocity_p") {
      ctrl.kind = ReferenceController::Kind::velocity_p;
    } else if (kind == "path_tracker") {
      ctrl.kind = ReferenceController::Kind::path_tracker;
    } else {
      throw ConfigError("controller.kind: unknown '" + kind + "'");
    }
    ctrl.k1 = get_or(c, "k1", ctrl.k1, "controller");
    ctrl.k2 = get_or(c, "k2", ctrl.k2, "controller");
    ctrl.v_des = get_or(c, "v_des", ctrl.v_des, "controller");
    if (c.contains("v_max")) ctrl.v_max = number(c.at("v_max"), "controller.v_max");
    ctrl.heading = get_or(c, "heading", ctrl.heading, "controller");
    if (c.contains("path")) {
      if (!c.at("path").is_array()) throw ConfigError("controller.path: expected an array");
      for (const auto& p : c.at("path")) ctrl.path.push_back(vec2_from(p, "controller.path"));
    }
    ctrl.cross_track_gain = get_or(c, "cross_track_gain", ctrl.cross_track_gain, "controller");
    ctrl.softening = get_or(c, "softening", ctrl.softening, "controller");
    ctrl.max_steer = get_or(c, "max_steer", ctrl.max_steer, "controller");
  }

  if (j.contains("barrier")) {
    cfg.barrier = wrap_errors("barrier", [&] {
      return barrier_kind_from_string(get_or<std::string>(j, "barrier", "c3bf", "config"));
    });
  }
  if (j.contains("kappa")) cfg.kappa = class_k_from_json(j.at("kappa"));
  if (j.contains("kappa1")) cfg.kappa1 = class_k_from_json(j.at("kappa1"));
  cfg.perception_radius = get_or(j, "perception_radius", cfg.perception_radius, "config");
  cfg.dt = get_or(j, "dt", cfg.dt, "config");
  cfg.duration = get_or(j, "duration", cfg.duration, "config");
  cfg.halt_on_collision = get_or(j, "halt_on_collision", cfg.halt_on_collision, "config");

  if (j.contains("saturation")) {
    const Json& s = j.at("saturation");
    check_keys(s, {"lower", "upper"}, "saturation");
    if (!s.contains("lower") || !s.contains("upper")) throw ConfigError("saturation: lower and upper required");
    cfg.saturation = InputBounds{vector_from(s.at("lower"), "saturation.lower"),
                                 vector_from(s.at("upper"), "saturation.upper")};
  }
  if (j.contains("thresholds")) {
    const Json& t = j.at("thresholds");
    check_keys(t, {"reverse_speed", "brake_fraction", "turn_angle", "overtake_lateral"}, "thresholds");
    auto& th = cfg.thresholds;
    th.reverse_speed = get_or(t, "reverse_speed", th.reverse_speed, "thresholds");
    th.brake_fraction = get_or(t, "brake_fraction", th.brake_fraction, "thresholds");
    th.turn_angle = get_or(t, "turn_angle", th.turn_angle, "thresholds");
    th.overtake_lateral = get_or(t, "overtake_lateral", th.overtake_lateral, "thresholds");
  }
  if (j.contains("expected_behavior")) {
    cfg.expected_behavior = wrap_errors("expected_behavior", [&] {
      return behavior_from_string(get_or<std::string>(j, "expected_behavior", "none", "config"));
    });
  }

  cfg.expect_recovery = get_or(j, "expect_recovery", cfg.expect_recovery, "config");

  cfg.validate();
  return cfg;
}

Json config_to_json(const ScenarioConfig& cfg)
{
  Json j;
  j["name"] = cfg.name;
  j["model"] = {{"kind", to_string(cfg.model.kind)},
                {"body_offset", cfg.model.body_offset},
                {"width", cfg.model.width},
                {"l_f", cfg.model.geometry.l_f},
                {"l_r", cfg.model.geometry.l_r}};
  j["initial_state"] = to_array(cfg.initial_state);
  Json obstacles = Json::array();
  for (const auto& spec : cfg.obstacles) {
    Json o;
    o["center"] = to_array(spec.initial.center);
    o["velocity"] = to_array(spec.initial.velocity);
    o["axes"] = Json::array({spec.initial.c1, spec.initial.c2});
    Json changes = Json::array();
    for (const auto& c : spec.changes) changes.push_back({{"time", c.time}, {"velocity", to_array(c.velocity)}});
    o["changes"] = changes;
    obstacles.push_back(o);
  }
  j["obstacles"] = obstacles;

  const auto& ctrl = cfg.controller;
  Json c;
  c["kind"] = ctrl.kind == ReferenceController::Kind::path_tracker ? "path_tracker" : "velocity_p";
  c["k1"] = ctrl.k1;
  c["k2"] = ctrl.k2;
  c["v_des"] = ctrl.v_des;
  if (ctrl.v_max) c["v_max"] = *ctrl.v_max;
  c["heading"] = ctrl.heading;
  if (!ctrl.path.empty()) {
    Json path = Json::array();
    for (const auto& p : ctrl.path) path.push_back(to_array(p));
    c["path"] = path;
  }
  c["cross_track_gain"] = ctrl.cross_track_gain;
  c["softening"] = ctrl.softening;
  c["max_steer"] = ctrl.max_steer;
  j["controller"] = c;

  j["barrier"] = to_string(cfg.barrier);
  j["kappa"] = class_k_to_json(cfg.kappa);
  j["kappa1"] = class_k_to_json(cfg.kappa1);
  j["perception_radius"] = cfg.perception_radius;
  j["dt"] = cfg.dt;
  j["duration"] = cfg.duration;
  j["halt_on_collision"] = cfg.halt_on_collision;
  if (cfg.saturation) {
    j["saturation"] = {{"lower", to_array(cfg.saturation->lower)}, {"upper", to_array(cfg.saturation->upper)}};
  }
  j["thresholds"] = {{"reverse_speed", cfg.thresholds.reverse_speed},
                     {"brake_fraction", cfg.thresholds.brake_fraction},
                     {"turn_angle", cfg.thresholds.turn_angle},
                     {"overtake_lateral", cfg.thresholds.overtake_lateral}};
  if (cfg.expected_behavior) j["expected_behavior"] = to_string(*cfg.expected_behavior);
  j["expect_recovery"] = cfg.expect_recovery;
  return j;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> expand_config_paths(const std::vector<std::filesystem::path>& paths)
{
  std::vector<std::filesystem::path> out;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace CSV

std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text)
{
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> trace_csv_header(const ScenarioConfig& cfg)
{
  std::vector<std::string> cols = {"t", "step"};
  for (const auto& s : state_names(cfg.model.kind)) cols.push_back(s);
  for (const auto& u : input_names(cfg.model.kind)) cols.push_back("u_ref_" + u);
  for (const auto& u : input_names(cfg.model.kind)) cols.push_back("u_star_" + u);
  cols.push_back("status");
  for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
    const std::string k = std::to_string(i);
    for (const char* f : {"cx_", "cy_", "h_", "psi_", "sep_", "active_", "in_range_"}) cols.push_back(f + k);
  }
  if (cfg.model.kind == ModelKind::bicycle) cols.push_back("beta");
  for (EventKind e : kFlagEvents) cols.push_back("ev_" + to_string(e));
  return cols;
}

void write_trace_csv(std::ostream& os, const ScenarioTrace& trace)
{
  const auto header = trace_csv_header(trace.config);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';

  std::map<std::pair<std::size_t, EventKind>, bool> fired;
  for (const auto& e : trace.events) fired[{e.step, e.kind}] = true;

  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const StepRecord& r = trace.records[k];
    std::string line = format_double(r.t) + "," + std::to_string(k);
    auto put = [&](double v) { line += "," + format_double(v); };
    for (Eigen::Index i = 0; i < r.state.size(); ++i) put(r.state(i));
    for (Eigen::Index i = 0; i < r.u_ref.size(); ++i) put(r.u_ref(i));
    for (Eigen::Index i = 0; i < r.u_star.size(); ++i) put(r.u_star(i));
    line += "," + to_string(r.status);
    for (std::size_t i = 0; i < r.h.size(); ++i) {
      put(r.obstacle_centers[i].x());
      put(r.obstacle_centers[i].y());
      put(r.h[i]);
      put(r.psi[i]);
      put(r.separation[i]);
      line += r.active[i] ? ",1" : ",0";
      line += r.in_range[i] ? ",1" : ",0";
    }
    if (trace.config.model.kind == ModelKind::bicycle) put(r.beta);
    for (EventKind e : kFlagEvents) line += fired.contains({k, e}) ? ",1" : ",0";
    os << line << '\n';
  }
}

std::vector<StepRecord> read_trace_csv(std::istream& is, const ScenarioConfig& cfg)
{
  const auto header = trace_csv_header(cfg);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("trace CSV is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
  }
  if (cols != header) throw std::invalid_argument("trace CSV header does not match the config");

  const auto nx = cfg.model.state_dim();
  const auto nu = cfg.model.input_dim();
  std::vector<StepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw std::invalid_argument("trace CSV row has the wrong width");

    std::size_t c = 0;
    auto next = [&] { return parse_double(cells[c++]); };
    StepRecord r;
    r.t = next();
    ++c;  // step index
    r.state.resize(nx);
    for (int i = 0; i < nx; ++i) r.state(i) = next();
    r.u_ref.resize(nu);
    for (int i = 0; i < nu; ++i) r.u_ref(i) = next();
    r.u_star.resize(nu);
    for (int i = 0; i < nu; ++i) r.u_star(i) = next();
    r.status = status_from_string(cells[c++]);
    for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
      const double cx = next();
      const double cy = next();
      r.obstacle_centers.emplace_back(cx, cy);
      r.h.push_back(next());
      r.psi.push_back(next());
      r.separation.push_back(next());
      r.active.push_back(cells[c++] == "1");
      r.in_range.push_back(cells[c++] == "1");
    }
    if (cfg.model.kind == ModelKind::bicycle) r.beta = next();
    out.push_back(std::move(r));
  }
  return out;
}

Json events_to_json(const ScenarioTrace& trace)
{
  Json list = Json::array();
  for (const auto& e : trace.events) {
    Json j = {{"t", e.t}, {"step", e.step}, {"kind", to_string(e.kind)}, {"detail", e.detail}};
    j["obstacle"] = e.obstacle >= 0 ? Json(e.obstacle) : Json(nullptr);
    list.push_back(j);
  }
  return {{"scenario", trace.config.name}, {"events", list}};
}

Json summary_to_json(const ScenarioTrace& trace)
{
  const TraceSummary& s = trace.summary;
  Json j;
  j["scenario"] = trace.config.name;
  j["model"] = to_string(trace.config.model.kind);
  j["barrier"] = to_string(trace.config.barrier);
  j["monitored_barrier"] = to_string(trace.monitor);
  j["steps"] = trace.records.size();
  j["dt"] = trace.config.dt;
  j["min_h"] = finite_or_null(s.min_h);
  j["min_separation"] = finite_or_null(s.min_separation);
  j["max_abs_beta"] = s.max_abs_beta;
  j["collisions"] = s.collisions;
  j["collision_free"] = s.collision_free;
  j["behavior"] = to_string(s.behavior);
  if (trace.config.expected_behavior) j["expected_behavior"] = to_string(*trace.config.expected_behavior);
  return j;
}

Json plot_data_to_json(const ScenarioTrace& trace)
{
  const ModelKind kind = trace.config.model.kind;
  Json t = Json::array();
  Json x = Json::array();
  Json y = Json::array();
  Json speed = Json::array();
  Json status = Json::array();
  const std::size_t n_obs = trace.config.obstacles.size();
  std::vector<Json> h(n_obs, Json::array());
  std::vector<Json> cx(n_obs, Json::array());
  std::vector<Json> cy(n_obs, Json::array());
  const auto nu = trace.config.model.input_dim();
  std::vector<Json> u_ref(nu, Json::array());
  std::vector<Json> u_star(nu, Json::array());

  for (const auto& r : trace.records) {
    t.push_back(r.t);
    const Vector2d p = position_of(kind, r.state);
    x.push_back(p.x());
    y.push_back(p.y());
    speed.push_back(forward_speed(kind, r.state, trace.config.controller.heading));
    status.push_back(to_string(r.status));
    for (std::size_t i = 0; i < n_obs; ++i) {
      h[i].push_back(finite_or_null(r.h[i]));
      cx[i].push_back(r.obstacle_centers[i].x());
      cy[i].push_back(r.obstacle_centers[i].y());
    }
    for (int i = 0; i < nu; ++i) {
      u_ref[i].push_back(r.u_ref(i));
      u_star[i].push_back(r.u_star(i));
    }
  }
  Json obstacles = Json::array();
  for (std::size_t i = 0; i < n_obs; ++i) {
    const Obstacle& o = trace.config.obstacles[i].initial;
    obstacles.push_back({{"h", h[i]},
                         {"cx", cx[i]},
                         {"cy", cy[i]},
                         {"axes", Json::array({o.c1, o.c2})},
                         {"combined_radius", o.combined_radius(trace.config.model.width)}});
  }
  const auto names = input_names(kind);
  Json inputs;
  for (int i = 0; i < nu; ++i) inputs[names[i]] = {{"ref", u_ref[i]}, {"star", u_star[i]}};
  return {{"scenario", trace.config.name}, {"t", t},       {"x", x},           {"y", y},
          {"speed", speed},                {"status", status}, {"inputs", inputs}, {"obstacles", obstacles}};
}

// ---------------------------------------------------------------------------
// Reports

Json validity_report_to_json(const ValidityReport& r)
{
  Json j;
  j["barrier"] = to_string(r.barrier);
  j["model"] = to_string(r.model);
  j["motion"] = to_string(r.motion);
  j["samples"] = r.samples;
  j["admissible_samples"] = r.admissible_samples;
  j["kernel_states"] = r.kernel_states;
  j["min_lg_norm"] = finite_or_null(r.min_lg_norm);
  j["column_max"] = r.column_max;
  j["input_never_appears"] = r.input_never_appears;
  j["no_acceleration"] = r.no_acceleration;
  j["no_steering"] = r.no_steering;
  j["worst_psi_safe"] = finite_or_null(r.worst_psi_safe);
  j["worst_psi_unsafe"] = finite_or_null(r.worst_psi_unsafe);
  j["valid"] = r.valid;
  j["domain"] = to_string(r.domain);
  j["verdict"] = r.verdict();
  if (r.counterexample_state) j["counterexample_state"] = to_array(*r.counterexample_state);
  if (r.counterexample_obstacle) {
    j["counterexample_obstacle"] = {{"center", to_array(r.counterexample_obstacle->center)},
                                    {"velocity", to_array(r.counterexample_obstacle->velocity)},
                                    {"axes", Json::array({r.counterexample_obstacle->c1,
                                                          r.counterexample_obstacle->c2})}};
  }
  return j;
}

Json validity_matrix_to_json(const std::vector<ValidityRow>& rows)
{
  Json list = Json::array();
  for (const auto& row : rows) {
    list.push_back({{"barrier", to_string(row.barrier)},
                    {"model", to_string(row.model)},
                    {"extension", row.extension},
                    {"static", validity_report_to_json(row.static_case)},
                    {"moving", validity_report_to_json(row.moving_case)}});
  }
  return {{"rows", list}};
}

std::string validity_matrix_text(const std::vector<ValidityRow>& rows)
{
  std::ostringstream os;
  os << std::left << std::setw(10) << "barrier" << std::setw(11) << "model" << std::setw(42) << "static obstacle"
     << "moving obstacle\n";
  for (const auto& row : rows) {
    os << std::setw(10) << to_string(row.barrier) << std::setw(11) << to_string(row.model) << std::setw(42)
       << row.static_case.verdict() << row.moving_case.verdict();
    if (row.extension) os << "  (extension)";
    os << '\n';
  }
  return os.str();
}

Json audit_to_json(const AuditReport& a)
{
  Json list = Json::array();
  for (const auto& o : a.obstacles) {
    Json j;
    j["obstacle"] = o.obstacle;
    j["observed"] = o.observed;
    j["h_start"] = finite_or_null(o.h_start);
    j["min_h"] = finite_or_null(o.min_h);
    j["started_safe"] = o.started_safe;
    j["violation"] = o.violation;
    j["discrete_residual"] = o.discrete_residual;
    j["decay_rate"] = o.decay_rate ? Json(*o.decay_rate) : Json(nullptr);
    j["magnitude_non_increasing"] = o.magnitude_non_increasing;
    j["crossed_zero"] = o.crossed_zero;
    list.push_back(j);
  }
  return {{"obstacles", list},
          {"worst_violation", a.worst_violation},
          {"barrier_enabled", a.barrier_enabled},
          {"collision", a.collision}};
}

Json beta_audit_to_json(const BetaAudit& b)
{
  return {{"max_abs_beta", b.max_abs_beta},
          {"divergence", b.divergence},
          {"path_length", b.path_length},
          {"relative_divergence", b.relative_divergence},
          {"flagged", b.flagged}};
}

}  // namespace conebarrier
