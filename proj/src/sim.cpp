#include "conebarrier/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conebarrier
{

Obstacle ObstacleSpec::at(double t) const
{
  Obstacle obs = initial;
  double t_prev = 0.0;
  for (const auto& change : changes) {
    if (change.time > t) break;
    obs.center += obs.velocity * (change.time - t_prev);
    obs.velocity = change.velocity;
    t_prev = change.time;
  }
  obs.center += obs.velocity * (t - t_prev);
  return obs;
}

std::string to_string(BehaviorLabel label)
{
  switch (label) {
    case BehaviorLabel::none: return "none";
    case BehaviorLabel::turning: return "turning";
    case BehaviorLabel::braking: return "braking";
    case BehaviorLabel::reversing: return "reversing";
    case BehaviorLabel::overtaking: return "overtaking";
  }
  return "none";
}

BehaviorLabel behavior_from_string(const std::string& name)
{
  if (name == "none") return BehaviorLabel::none;
  if (name == "turning") return BehaviorLabel::turning;
  if (name == "braking") return BehaviorLabel::braking;
  if (name == "reversing") return BehaviorLabel::reversing;
  if (name == "overtaking") return BehaviorLabel::overtaking;
  throw std::invalid_argument("unknown behavior label: " + name);
}

std::string to_string(EventKind kind)
{
  switch (kind) {
    case EventKind::collision: return "collision";
    case EventKind::degenerate: return "degenerate";
    case EventKind::infeasible: return "infeasible";
    case EventKind::perception_entry: return "perception_entry";
    case EventKind::saturation: return "saturation";
    case EventKind::integration_failure: return "integration_failure";
  }
  return "unknown";
}

void ScenarioConfig::validate() const
{
  try {
    model.validate();
    controller.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + ": " + e.what());
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(name + ": dt must be positive");
  if (!(duration >= dt) || !std::isfinite(duration)) throw ConfigError(name + ": duration must be at least dt");
  if (!(perception_radius > 0.0)) throw ConfigError(name + ": perception radius must be positive");
  if (initial_state.size() != model.state_dim() || !initial_state.allFinite()) {
    throw ConfigError(name + ": initial state has the wrong dimension or is not finite");
  }
  if (controller.kind == ReferenceController::Kind::path_tracker && model.kind != ModelKind::bicycle) {
    throw ConfigError(name + ": the path tracker needs the bicycle model");
  }
  for (const auto& spec : obstacles) {
    try {
      spec.initial.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name + ": " + e.what());
    }
    for (std::size_t i = 0; i < spec.changes.size(); ++i) {
      if (!spec.changes[i].velocity.allFinite() || !(spec.changes[i].time >= 0.0)) {
        throw ConfigError(name + ": velocity changes need finite values and non-negative times");
      }
      if (i > 0 && !(spec.changes[i].time >= spec.changes[i - 1].time)) {
        throw ConfigError(name + ": velocity change times must be sorted");
      }
    }
  }
  if (saturation) {
    const auto m = model.input_dim();
    if (saturation->lower.size() != m || saturation->upper.size() != m ||
        (saturation->lower.array() > saturation->upper.array()).any()) {
      throw ConfigError(name + ": saturation bounds are malformed");
    }
  }
}

FilterConfig ScenarioConfig::filter_config() const
{
  FilterConfig fc;
  fc.model = model;
  fc.barrier = barrier;
  fc.kappa = kappa;
  fc.kappa1 = kappa1;
  fc.perception_radius = perception_radius;
  return fc;
}

namespace
{

double monitored_h(BarrierKind monitor, const ScenarioConfig& cfg, const VectorXd& x, const Obstacle& obs)
{
  try {
    return evaluate_barrier(monitor, cfg.model, x, obs, cfg.kappa1).h;
  } catch (const BarrierDomainError&) {
  } catch (const DegenerateVelocity&) {
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ScenarioTrace run_scenario(const ScenarioConfig& cfg)
{
  cfg.validate();

  ScenarioTrace trace;
  trace.config = cfg;
  trace.monitor = cfg.barrier == BarrierKind::none ? BarrierKind::c3bf : cfg.barrier;

  const AffineDynamics dyn(cfg.model);
  const FilterConfig fc = cfg.filter_config();
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const std::size_t n_obs = cfg.obstacles.size();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<bool> was_in_range(n_obs, false);
  std::vector<bool> was_colliding(n_obs, false);
  std::vector<bool> was_degenerate(n_obs, false);
  bool was_infeasible = false;

  VectorXd x = cfg.initial_state;
  trace.records.reserve(steps + 1);

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    std::vector<Obstacle> obstacles;
    obstacles.reserve(n_obs);
    for (const auto& spec : cfg.obstacles) obstacles.push_back(spec.at(t));

    const FilterStepResult step = filter_step(x, obstacles, fc, cfg.controller);

    StepRecord rec;
    rec.t = t;
    rec.state = x;
    rec.u_ref = step.qp.u_ref;
    rec.u_star = step.qp.u_star;
    rec.status = step.qp.status;

    if (cfg.saturation) {
      const VectorXd clipped = rec.u_star.cwiseMax(cfg.saturation->lower).cwiseMin(cfg.saturation->upper);
      if (clipped != rec.u_star) {
        trace.events.push_back({t, k, EventKind::saturation, -1, "applied input clipped to bounds"});
        rec.u_star = clipped;
      }
    }
    if (cfg.model.kind == ModelKind::bicycle) rec.beta = rec.u_star(1);

    bool collided_now = false;
    for (std::size_t i = 0; i < n_obs; ++i) {
      const Obstacle& obs = obstacles[i];
      const ObstacleConstraint& oc = step.obstacles[i];
      const int idx = static_cast<int>(i);
      rec.obstacle_centers.push_back(obs.center);
      rec.in_range.push_back(oc.in_range);

      const double sep = relative_position(cfg.model, x, obs).norm() - obs.combined_radius(cfg.model.width);
      rec.separation.push_back(sep);
      rec.h.push_back(oc.eval ? oc.eval->h : monitored_h(trace.monitor, cfg, x, obs));

      if (oc.row >= 0) {
        rec.psi.push_back(step.qp.psi[oc.row]);
        const auto& act = step.qp.active_set;
        rec.active.push_back(std::find(act.begin(), act.end(), oc.row) != act.end());
      } else {
        rec.psi.push_back(nan);
        rec.active.push_back(false);
      }

      if (oc.in_range && !was_in_range[i]) {
        trace.events.push_back({t, k, EventKind::perception_entry, idx, "obstacle inside perception boundary"});
      }
      was_in_range[i] = oc.in_range;

      const bool colliding = sep <= 0.0;
      if (colliding && !was_colliding[i]) {
        trace.events.push_back({t, k, EventKind::collision, idx, "relative position inside combined radius"});
      }
      collided_now = collided_now || colliding;
      was_colliding[i] = colliding;

      const bool degenerate = oc.issue == ConstraintIssue::degenerate;
      if (degenerate && !was_degenerate[i]) {
        trace.events.push_back({t, k, EventKind::degenerate, idx, "relative speed below threshold; constraint dropped"});
      }
      was_degenerate[i] = degenerate;
    }

    const bool infeasible = step.qp.status == FilterStatus::infeasible;
    if (infeasible && !was_infeasible) {
      trace.events.push_back({t, k, EventKind::infeasible, -1,
                              "no input satisfies all rows; least-violating input applied"});
    }
    was_infeasible = infeasible;

    const VectorXd applied = rec.u_star;
    trace.records.push_back(std::move(rec));

    if (cfg.halt_on_collision && collided_now) break;
    if (k == steps) break;
    try {
      x = integrate_step(dyn, x, applied, cfg.dt);
    } catch (const IntegrationError& e) {
      trace.events.push_back({t, k, EventKind::integration_failure, -1, e.what()});
      break;
    }
  }

  trace.summary = summarize(trace);
  return trace;
}

BehaviorLabel classify_behavior(const ScenarioTrace& trace)
{
  const auto& recs = trace.records;
  if (recs.empty()) return BehaviorLabel::none;
  const auto& cfg = trace.config;
  const auto& th = cfg.thresholds;
  const ModelKind kind = cfg.model.kind;
  const double hint = cfg.controller.heading;

  const double heading0 = heading_of(kind, recs.front().state, hint);
  const Vector2d forward(std::cos(heading0), std::sin(heading0));
  const Vector2d left(-forward.y(), forward.x());
  const Vector2d start = position_of(kind, recs.front().state);

  std::vector<double> speed(recs.size());
  double max_turn = 0.0;
  double max_lateral = 0.0;
  bool reversed_under_filter = false;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    speed[k] = forward_speed(kind, recs[k].state, heading0);
    max_turn = std::max(max_turn, std::abs(heading_of(kind, recs[k].state, heading0) - heading0));
    max_lateral = std::max(max_lateral, std::abs((position_of(kind, recs[k].state) - start).dot(left)));
    if (recs[k].status != FilterStatus::inactive && speed[k] < th.reverse_speed) reversed_under_filter = true;
  }
  if (reversed_under_filter) return BehaviorLabel::reversing;

  // Overtaking: the vehicle ends up ahead of an obstacle that moves along the
  // initial travel direction, after a lateral excursion, with the filter released.
  if (recs.back().status == FilterStatus::inactive && max_lateral >= th.overtake_lateral) {
    for (std::size_t i = 0; i < cfg.obstacles.size(); ++i) {
      bool behind = false;
      bool passed = false;
      bool same_direction = false;
      for (const auto& rec : recs) {
        const Vector2d vel = cfg.obstacles[i].at(rec.t).velocity;
        if (vel.dot(forward) > 0.0) same_direction = true;
        const double along = (position_of(kind, rec.state) - rec.obstacle_centers[i]).dot(forward);
        if (along < 0.0) behind = true;
        if (behind && along > 0.0) passed = true;
      }
      if (same_direction && passed) return BehaviorLabel::overtaking;
    }
  }

  const bool always_forward = std::all_of(speed.begin(), speed.end(), [](double v) { return v > 0.0; });
  if (always_forward && max_turn >= th.turn_angle) return BehaviorLabel::turning;

  const double first = speed.front();
  const bool no_sign_change = std::all_of(speed.begin(), speed.end(), [&](double v) {
    return first > 0.0 ? v > 0.0 : (first < 0.0 ? v < 0.0 : v == 0.0);
  });
  if (no_sign_change && max_turn < th.turn_angle) {
    double peak = 0.0;
    for (double v : speed) {
      peak = std::max(peak, std::abs(v));
      if (peak > 0.0 && std::abs(v) <= (1.0 - th.brake_fraction) * peak) return BehaviorLabel::braking;
    }
  }
  return BehaviorLabel::none;
}

TraceSummary summarize(const ScenarioTrace& trace)
{
  TraceSummary s;
  s.min_separation = std::numeric_limits<double>::infinity();
  s.min_h = std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.records) {
    for (std::size_t i = 0; i < rec.separation.size(); ++i) {
      s.min_separation = std::min(s.min_separation, rec.separation[i]);
      if (rec.in_range[i] && std::isfinite(rec.h[i])) s.min_h = std::min(s.min_h, rec.h[i]);
    }
    s.max_abs_beta = std::max(s.max_abs_beta, std::abs(rec.beta));
  }
  s.collisions = static_cast<std::size_t>(std::count_if(
    trace.events.begin(), trace.events.end(), [](const TraceEvent& e) { return e.kind == EventKind::collision; }));
  s.collision_free = s.collisions == 0;
  s.behavior = classify_behavior(trace);
  return s;
}

}  // namespace conebarrier
