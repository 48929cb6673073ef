#pragma once

#include "conebarrier/barriers.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace conebarrier
{

// ---------------------------------------------------------------------------
// Quadratic program  min ‖u − u_ref‖²  s.t.  lg_h·u ≥ rhs  for every row.

struct QpRow
{
  VectorXd lg_h;
  double rhs = 0.0;
};

/// Row encoding L_f h + L_g h·u + κ(h) ≥ 0.
QpRow barrier_row(const BarrierEvaluation& eval, const ClassK& kappa);

struct InputBounds
{
  VectorXd lower;
  VectorXd upper;
};

struct QpProblem
{
  VectorXd u_ref;
  std::vector<QpRow> rows;
  /// Optional box on u. Not covered by the closed-form feasibility argument.
  std::optional<InputBounds> bounds;
};

enum class FilterStatus
{
  inactive,
  corrected,
  infeasible
};

std::string to_string(FilterStatus status);

struct SafetyFilterResult
{
  VectorXd u_star;
  VectorXd u_ref;
  VectorXd u_safe;
  std::vector<double> psi;  // ḣ(x, u_ref) + κ(h) per row
  std::vector<int> active_set;
  FilterStatus status = FilterStatus::inactive;
  double max_violation = 0.0;  // > 0 only when infeasible
};

/// A row whose L_g h vanishes cannot be corrected in closed form.
class DegenerateRow : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form switching solution for exactly one row: u_safe = 0 when ψ ≥ 0,
/// otherwise the projection −L_g hᵀ ψ / (L_g h L_g hᵀ).
SafetyFilterResult solve_single_constraint(const QpProblem& qp);

/// Exact minimizer through a dual active-set method (Goldfarb–Idnani with an
/// identity Hessian). With no feasible point the relaxation
/// lg_h·u ≥ rhs − τ is solved for the smallest τ and the status is `infeasible`.
SafetyFilterResult solve_multi_constraint(const QpProblem& qp);

// ---------------------------------------------------------------------------
// Reference controllers

struct ReferenceController
{
  enum class Kind
  {
    velocity_p,
    path_tracker
  };

  Kind kind = Kind::velocity_p;
  double k1 = 1.0;      // speed gain (1/s)
  double k2 = 1.0;      // yaw-rate damping (1/s)
  double v_des = 1.0;   // target speed (m/s)
  std::optional<double> v_max;
  double heading = 0.0;  // point mass: direction of the target velocity (rad)

  // path tracker
  std::vector<Vector2d> path;
  double cross_track_gain = 1.0;
  double softening = 1.0;  // m/s, keeps the cross-track term finite at low speed
  double max_steer = 0.6;  // rad, |δ| clamp before the slip mapping

  void validate() const;
};

/// a_ref = k₁(v_des − v); α_ref = −k₂ω (unicycle), β_ref = 0 (bicycle),
/// u_ref = k₁(v_des·(cos ψ, sin ψ) − v) (point mass).
VectorXd reference_p_controller(ModelKind kind, const VectorXd& x, const ReferenceController& ctrl);

class EmptyPath : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Heading-error plus cross-track steering, mapped to a slip angle.
BicycleInput reference_path_tracker(const BicycleState& s, const std::vector<Vector2d>& path,
                                    const ReferenceController& gains, const BicycleGeometry& geom);

/// Signed lateral offset from the polyline (positive on the left).
double cross_track_error(const Vector2d& position, const std::vector<Vector2d>& path);

VectorXd reference_input(const VehicleModel& model, const VectorXd& x, const ReferenceController& ctrl);

// ---------------------------------------------------------------------------
// One filter evaluation

struct FilterConfig
{
  VehicleModel model;
  BarrierKind barrier = BarrierKind::c3bf;
  ClassK kappa = ClassK::linear(1.0);
  ClassK kappa1 = ClassK::linear(1.0);  // inner class-K of the second-order barrier
  double perception_radius = 10.0;
  std::optional<InputBounds> bounds;
};

enum class ConstraintIssue
{
  none,
  out_of_range,
  domain,      // inside the combined radius
  degenerate   // relative speed below kMinRelativeSpeed
};

struct ObstacleConstraint
{
  bool in_range = false;
  ConstraintIssue issue = ConstraintIssue::none;
  std::optional<BarrierEvaluation> eval;
  int row = -1;  // index into SafetyFilterResult::psi, −1 when not in the QP
};

struct FilterStepResult
{
  SafetyFilterResult qp;
  std::vector<ObstacleConstraint> obstacles;
};

/// Reference → barrier rows for in-range obstacles → QP solve.
FilterStepResult filter_step(const VectorXd& x, std::span<const Obstacle> obstacles,
                             const FilterConfig& cfg, const ReferenceController& ctrl);

}  // namespace conebarrier
