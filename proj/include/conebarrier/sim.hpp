#pragma once

#include "conebarrier/filter.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace conebarrier
{

/// Step change of the obstacle velocity at `time`.
struct VelocityChange
{
  double time = 0.0;
  Vector2d velocity = Vector2d::Zero();
};

struct ObstacleSpec
{
  Obstacle initial;
  std::vector<VelocityChange> changes;  // sorted by time

  /// Obstacle at time t (center integrated exactly over the piecewise-constant velocity).
  Obstacle at(double t) const;
};

enum class BehaviorLabel
{
  none,
  turning,
  braking,
  reversing,
  overtaking
};

std::string to_string(BehaviorLabel label);
BehaviorLabel behavior_from_string(const std::string& name);

/// Thresholds for classify_behavior.
struct ClassifierThresholds
{
  double reverse_speed = -0.05;        // m/s
  double brake_fraction = 0.5;         // relative speed drop
  double turn_angle = 0.2617993877991494;  // 15°
  double overtake_lateral = 0.3;       // m of lateral excursion while passing
};

struct ScenarioConfig
{
  std::string name = "scenario";
  VehicleModel model;
  VectorXd initial_state;
  std::vector<ObstacleSpec> obstacles;
  ReferenceController controller;
  BarrierKind barrier = BarrierKind::c3bf;
  ClassK kappa = ClassK::linear(1.0);
  ClassK kappa1 = ClassK::linear(1.0);
  double perception_radius = 10.0;
  double dt = 0.01;
  double duration = 10.0;
  bool halt_on_collision = false;
  std::optional<InputBounds> saturation;  // post-QP clip, off by default
  ClassifierThresholds thresholds;
  std::optional<BehaviorLabel> expected_behavior;
  bool expect_recovery = false;  // audit: h(0) < 0 must decay at rate ≈ γ and turn positive

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  FilterConfig filter_config() const;
};

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class EventKind
{
  collision,
  degenerate,
  infeasible,
  perception_entry,
  saturation,
  integration_failure
};

std::string to_string(EventKind kind);

struct TraceEvent
{
  double t = 0.0;
  std::size_t step = 0;
  EventKind kind = EventKind::collision;
  int obstacle = -1;
  std::string detail;
};

struct StepRecord
{
  double t = 0.0;
  VectorXd state;
  VectorXd u_ref;
  VectorXd u_star;
  FilterStatus status = FilterStatus::inactive;
  std::vector<Vector2d> obstacle_centers;
  std::vector<double> h;           // monitored barrier, NaN where undefined
  std::vector<double> psi;         // NaN when the obstacle is not in the QP
  std::vector<double> separation;  // ‖p_rel‖ − r
  std::vector<bool> active;
  std::vector<bool> in_range;
  double beta = 0.0;  // bicycle slip input applied, 0 otherwise
};

struct TraceSummary
{
  double min_separation = 0.0;
  double min_h = 0.0;
  double max_abs_beta = 0.0;
  std::size_t collisions = 0;
  bool collision_free = true;
  BehaviorLabel behavior = BehaviorLabel::none;
};

struct ScenarioTrace
{
  ScenarioConfig config;
  BarrierKind monitor = BarrierKind::c3bf;  // barrier whose h is logged
  std::vector<StepRecord> records;
  std::vector<TraceEvent> events;
  TraceSummary summary;
};

/// Deterministic closed-loop run: one record per step at t = k·dt, k = 0..N.
/// With barrier `none` the collision-cone value is still logged for analysis.
ScenarioTrace run_scenario(const ScenarioConfig& cfg);

/// Label precedence: reversing > overtaking > turning > braking.
BehaviorLabel classify_behavior(const ScenarioTrace& trace);

/// Recomputes summary metrics (including the behavior label) from records and events.
TraceSummary summarize(const ScenarioTrace& trace);

// ---------------------------------------------------------------------------
// Audits

struct ObstacleAudit
{
  int obstacle = -1;
  bool observed = false;       // ever in range with a defined h
  double h_start = 0.0;        // h at the first in-range step
  double min_h = 0.0;
  bool started_safe = false;
  double violation = 0.0;      // max(0, −min h) for safe starts
  double discrete_residual = 0.0;  // max over steps of −((h_{k+1}−h_k)/dt + κ(h_k)), ≥ 0
  // Runs that start with h < 0:
  std::optional<double> decay_rate;  // fitted while the constraint is active and h < 0
  bool magnitude_non_increasing = false;
  bool crossed_zero = false;
};

struct AuditReport
{
  std::vector<ObstacleAudit> obstacles;
  double worst_violation = 0.0;   // over safe-start obstacles
  bool barrier_enabled = true;
  bool collision = false;
};

AuditReport invariance_audit(const ScenarioTrace& trace, const ClassK& kappa);

struct BetaAudit
{
  double max_abs_beta = 0.0;
  double divergence = 0.0;   // max position gap between approximate and exact models
  double path_length = 0.0;
  double relative_divergence = 0.0;
  bool flagged = false;      // max|β| above threshold
};

/// Replays the logged inputs through the exact slip model. Bicycle traces only.
BetaAudit beta_smallness_audit(const ScenarioTrace& trace, double beta_threshold = 0.3);

}  // namespace conebarrier
