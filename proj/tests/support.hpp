#pragma once

#include "conebarrier/barriers.hpp"
#include "conebarrier/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace testsupport
{

using namespace conebarrier;

inline VehicleModel make_model(ModelKind kind)
{
  VehicleModel m;
  m.kind = kind;
  m.width = 0.5;
  m.body_offset = 0.1;
  m.geometry = BicycleGeometry{1.2, 1.6};
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Velocity of the point the cone is built from, as used in v_rel.
inline Vector2d reference_velocity(const VehicleModel& model, const VectorXd& x)
{
  if (model.kind == ModelKind::pointmass) return Vector2d(x(2), x(3));
  const Vector2d heading(std::cos(x(2)), std::sin(x(2)));
  if (model.kind == ModelKind::bicycle) return x(3) * heading;
  const Vector2d normal(-heading.y(), heading.x());
  return x(3) * heading + model.body_offset * x(4) * normal;
}

/// A vehicle state and obstacle pair on which the barrier is smooth:
/// the obstacle is at least 0.5 m outside the combined radius and the relative
/// speed is at least 0.2 m/s.
struct Sample
{
  VectorXd x;
  Obstacle obs;
};

inline Sample admissible_sample(std::mt19937_64& rng, const VehicleModel& model)
{
  constexpr double pi = std::numbers::pi;
  for (;;) {
    Sample s;
    s.x = VectorXd(model.state_dim());
    s.x(0) = uniform(rng, -10.0, 10.0);
    s.x(1) = uniform(rng, -10.0, 10.0);
    if (model.kind == ModelKind::pointmass) {
      s.x(2) = uniform(rng, -3.0, 3.0);
      s.x(3) = uniform(rng, -3.0, 3.0);
    } else {
      s.x(2) = uniform(rng, -pi, pi);
      s.x(3) = uniform(rng, -3.0, 3.0);
      if (model.kind == ModelKind::unicycle) s.x(4) = uniform(rng, -2.0, 2.0);
    }
    s.obs.c1 = uniform(rng, 0.3, 2.0);
    s.obs.c2 = uniform(rng, 0.3, 2.0);
    s.obs.center = Vector2d(uniform(rng, -10.0, 10.0), uniform(rng, -10.0, 10.0));
    s.obs.velocity = Vector2d(uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0));
    const double r = s.obs.combined_radius(model.width);
    const Vector2d p = relative_position(model, s.x, s.obs);
    if (p.norm() < r + 0.5) continue;
    // Ellipse barriers must also see the reference point outside the ellipse.
    const Vector2d d = s.obs.center - position_of(model.kind, s.x);
    if (std::pow(d.x() / s.obs.c1, 2) + std::pow(d.y() / s.obs.c2, 2) < 1.5) continue;
    if ((s.obs.velocity - reference_velocity(model, s.x)).norm() < 0.2) continue;
    return s;
  }
}

/// Differentiates t ↦ h(x + t·dx, c + t·dc) at t = 0: five-point stencils at
/// `step` and `step/2` combined by one Richardson level (error O(step⁶)).
inline double directional_derivative(BarrierKind kind, const VehicleModel& model, const VectorXd& x,
                                     const Obstacle& obs, const VectorXd& dx, const Vector2d& dc,
                                     const ClassK& kappa1, double step)
{
  auto h_at = [&](double t) {
    Obstacle o = obs;
    o.center += t * dc;
    return evaluate_barrier(kind, model, x + t * dx, o, kappa1).h;
  };
  auto stencil = [&](double e) {
    return (-h_at(2 * e) + 8 * h_at(e) - 8 * h_at(-e) + h_at(-2 * e)) / (12 * e);
  };
  return (16.0 * stencil(step / 2) - stencil(step)) / 15.0;
}

/// Compares the closed-form Lie derivatives with finite differences of h along
/// f (with the obstacle moving at its velocity) and along each input column.
/// Returns max |fd − an| / max(1, |an|) over L_f h and every L_g h entry.
inline double gradient_error(BarrierKind kind, const VehicleModel& model, const Sample& s,
                             const ClassK& kappa1, double step = 1e-3)
{
  const AffineDynamics dyn(model);
  const BarrierEvaluation eval = evaluate_barrier(kind, model, s.x, s.obs, kappa1);
  const VectorXd f = dyn.drift(s.x);
  const MatrixXd g = dyn.actuation(s.x);
  auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max(1.0, std::abs(an)); };
  double worst = rel(directional_derivative(kind, model, s.x, s.obs, f, s.obs.velocity, kappa1, step), eval.lf_h);
  for (int j = 0; j < g.cols(); ++j) {
    const double fd = directional_derivative(kind, model, s.x, s.obs, g.col(j), Vector2d::Zero(), kappa1, step);
    worst = std::max(worst, rel(fd, eval.lg_h(j)));
  }
  return worst;
}

}  // namespace testsupport
