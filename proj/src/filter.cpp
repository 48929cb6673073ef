#include "conebarrier/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conebarrier
{

void ReferenceController::validate() const
{
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("controller gains must be positive");
  if (v_max && v_des > *v_max) throw std::invalid_argument("target speed exceeds v_max");
  if (kind == Kind::path_tracker) {
    if (path.size() < 2) throw EmptyPath("path tracker needs at least two waypoints");
    if (!(max_steer > 0.0 && max_steer < std::numbers::pi / 2.0)) {
      throw std::invalid_argument("max_steer must lie in (0, pi/2)");
    }
  }
}

VectorXd reference_p_controller(ModelKind kind, const VectorXd& x, const ReferenceController& ctrl)
{
  VectorXd u(2);
  switch (kind) {
    case ModelKind::unicycle:
      u << ctrl.k1 * (ctrl.v_des - x(3)), -ctrl.k2 * x(4);
      break;
    case ModelKind::bicycle:
      u << ctrl.k1 * (ctrl.v_des - x(3)), 0.0;
      break;
    case ModelKind::pointmass: {
      const Vector2d target = ctrl.v_des * Vector2d(std::cos(ctrl.heading), std::sin(ctrl.heading));
      u = ctrl.k1 * (target - Vector2d(x(2), x(3)));
      break;
    }
  }
  return u;
}

namespace
{

struct PathProjection
{
  std::size_t segment = 0;
  double lateral = 0.0;  // positive on the left of the segment direction
  double heading = 0.0;
};

PathProjection project_onto_path(const Vector2d& position, const std::vector<Vector2d>& path)
{
  if (path.size() < 2) throw EmptyPath("path needs at least two waypoints");
  PathProjection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vector2d seg = path[i + 1] - path[i];
    const double len2 = seg.squaredNorm();
    if (len2 <= 0.0) continue;
    double t = (position - path[i]).dot(seg) / len2;
    // Open-ended first and last segments so the tracker keeps working past the ends.
    if (i > 0) t = std::max(t, 0.0);
    if (i + 2 < path.size()) t = std::min(t, 1.0);
    const Vector2d foot = path[i] + t * seg;
    const double dist = (position - foot).norm();
    if (dist < best_dist) {
      best_dist = dist;
      const Vector2d dir = seg / std::sqrt(len2);
      const Vector2d off = position - path[i];
      best.segment = i;
      best.lateral = dir.x() * off.y() - dir.y() * off.x();
      best.heading = std::atan2(dir.y(), dir.x());
    }
  }
  if (!std::isfinite(best_dist)) throw EmptyPath("path has no segment of positive length");
  return best;
}

double wrap_angle(double a)
{
  return std::remainder(a, 2.0 * std::numbers::pi);
}

}  // namespace

double cross_track_error(const Vector2d& position, const std::vector<Vector2d>& path)
{
  return project_onto_path(position, path).lateral;
}

BicycleInput reference_path_tracker(const BicycleState& s, const std::vector<Vector2d>& path,
                                    const ReferenceController& gains, const BicycleGeometry& geom)
{
  if (path.size() < 2) throw EmptyPath("path tracker needs at least two waypoints");
  const PathProjection proj = project_onto_path(Vector2d(s.x_p, s.y_p), path);
  const double heading_error = wrap_angle(proj.heading - s.theta);
  const double correction = std::atan2(gains.cross_track_gain * proj.lateral,
                                       gains.softening + std::abs(s.v));
  const double delta = std::clamp(heading_error - correction, -gains.max_steer, gains.max_steer);
  return {gains.k1 * (gains.v_des - s.v), slip_from_steering(delta, geom)};
}

VectorXd reference_input(const VehicleModel& model, const VectorXd& x, const ReferenceController& ctrl)
{
  if (ctrl.kind == ReferenceController::Kind::path_tracker) {
    if (model.kind != ModelKind::bicycle) {
      throw std::invalid_argument("path tracker is only defined for the bicycle model");
    }
    const BicycleInput u = reference_path_tracker(bicycle_from_vector(x), ctrl.path, ctrl, model.geometry);
    VectorXd out(2);
    out << u.a, u.beta;
    return out;
  }
  return reference_p_controller(model.kind, x, ctrl);
}

FilterStepResult filter_step(const VectorXd& x, std::span<const Obstacle> obstacles,
                             const FilterConfig& cfg, const ReferenceController& ctrl)
{
  FilterStepResult out;
  QpProblem qp;
  qp.u_ref = reference_input(cfg.model, x, ctrl);
  qp.bounds = cfg.bounds;
  out.obstacles.resize(obstacles.size());

  if (cfg.barrier != BarrierKind::none) {
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      ObstacleConstraint& oc = out.obstacles[i];
      const Obstacle& obs = obstacles[i];
      oc.in_range = relative_position(cfg.model, x, obs).norm() <= cfg.perception_radius;
      if (!oc.in_range) {
        oc.issue = ConstraintIssue::out_of_range;
        continue;
      }
      try {
        oc.eval = evaluate_barrier(cfg.barrier, cfg.model, x, obs, cfg.kappa1);
      } catch (const BarrierDomainError&) {
        oc.issue = ConstraintIssue::domain;
        continue;
      } catch (const DegenerateVelocity&) {
        oc.issue = ConstraintIssue::degenerate;
        continue;
      }
      oc.row = static_cast<int>(qp.rows.size());
      qp.rows.push_back(barrier_row(*oc.eval, cfg.kappa));
    }
  } else {
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      out.obstacles[i].in_range =
        relative_position(cfg.model, x, obstacles[i]).norm() <= cfg.perception_radius;
    }
  }

  out.qp = solve_multi_constraint(qp);
  return out;
}

}  // namespace conebarrier
