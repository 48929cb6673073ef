#include "conebarrier/models.hpp"

#include <cmath>
#include <numbers>

namespace conebarrier
{

void BicycleGeometry::validate() const
{
  if (!(l_f > 0.0) || !(l_r > 0.0)) {
    throw std::invalid_argument("bicycle geometry requires l_f > 0 and l_r > 0");
  }
}

Eigen::Matrix<double, 5, 1> unicycle_dynamics(const UnicycleState& s, const UnicycleInput& u)
{
  Eigen::Matrix<double, 5, 1> dx;
  dx << s.v * std::cos(s.theta), s.v * std::sin(s.theta), s.omega, u.a, u.alpha;
  return dx;
}

Eigen::Vector4d bicycle_dynamics(const BicycleState& s, const BicycleInput& u,
                                 const BicycleGeometry& geom)
{
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  Eigen::Vector4d dx;
  dx << s.v * c - s.v * u.beta * sn,
        s.v * sn + s.v * u.beta * c,
        s.v / geom.l_r * u.beta,
        u.a;
  return dx;
}

Eigen::Vector4d bicycle_dynamics_exact(const BicycleState& s, const BicycleInput& u,
                                       const BicycleGeometry& geom)
{
  Eigen::Vector4d dx;
  dx << s.v * std::cos(s.theta + u.beta),
        s.v * std::sin(s.theta + u.beta),
        s.v / geom.l_r * std::sin(u.beta),
        u.a;
  return dx;
}

double slip_from_steering(double delta, const BicycleGeometry& geom)
{
  if (!(std::abs(delta) < std::numbers::pi / 2.0)) {
    throw std::domain_error("steering angle must satisfy |delta| < pi/2");
  }
  geom.validate();
  return std::atan(geom.l_r / (geom.l_f + geom.l_r) * std::tan(delta));
}

Eigen::Vector4d pointmass_dynamics(const PointMassState& s, const Vector2d& u)
{
  Eigen::Vector4d dx;
  dx << s.v, u;
  return dx;
}

std::string to_string(ModelKind kind)
{
  switch (kind) {
    case ModelKind::unicycle: return "unicycle";
    case ModelKind::bicycle: return "bicycle";
    case ModelKind::pointmass: return "pointmass";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name)
{
  if (name == "unicycle") return ModelKind::unicycle;
  if (name == "bicycle") return ModelKind::bicycle;
  if (name == "pointmass") return ModelKind::pointmass;
  throw std::invalid_argument("unknown model kind: " + name);
}

int VehicleModel::state_dim() const
{
  return kind == ModelKind::unicycle ? 5 : 4;
}

int VehicleModel::input_dim() const
{
  return 2;
}

void VehicleModel::validate() const
{
  if (kind == ModelKind::bicycle) geometry.validate();
  if (!(width >= 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("vehicle width must be finite and non-negative");
  }
  if (!(body_offset >= 0.0) || !std::isfinite(body_offset)) {
    throw std::invalid_argument("body offset must be finite and non-negative");
  }
}

AffineDynamics::AffineDynamics(const VehicleModel& model) : model_(model)
{
  model_.validate();
}

VectorXd AffineDynamics::drift(const VectorXd& x) const
{
  VectorXd f = VectorXd::Zero(state_dim());
  switch (model_.kind) {
    case ModelKind::unicycle:
      f(0) = x(3) * std::cos(x(2));
      f(1) = x(3) * std::sin(x(2));
      f(2) = x(4);
      break;
    case ModelKind::bicycle:
      f(0) = x(3) * std::cos(x(2));
      f(1) = x(3) * std::sin(x(2));
      break;
    case ModelKind::pointmass:
      f(0) = x(2);
      f(1) = x(3);
      break;
  }
  return f;
}

MatrixXd AffineDynamics::actuation(const VectorXd& x) const
{
  MatrixXd g = MatrixXd::Zero(state_dim(), input_dim());
  switch (model_.kind) {
    case ModelKind::unicycle:
      g(3, 0) = 1.0;
      g(4, 1) = 1.0;
      break;
    case ModelKind::bicycle:
      g(0, 1) = -x(3) * std::sin(x(2));
      g(1, 1) = x(3) * std::cos(x(2));
      g(2, 1) = x(3) / model_.geometry.l_r;
      g(3, 0) = 1.0;
      break;
    case ModelKind::pointmass:
      g(2, 0) = 1.0;
      g(3, 1) = 1.0;
      break;
  }
  return g;
}

VectorXd AffineDynamics::derivative(const VectorXd& x, const VectorXd& u) const
{
  switch (model_.kind) {
    case ModelKind::unicycle:
      return unicycle_dynamics(unicycle_from_vector(x), {u(0), u(1)});
    case ModelKind::bicycle:
      return bicycle_dynamics(bicycle_from_vector(x), {u(0), u(1)}, model_.geometry);
    case ModelKind::pointmass:
      return pointmass_dynamics(pointmass_from_vector(x), u.head<2>());
  }
  return drift(x) + actuation(x) * u;
}

VectorXd to_vector(const UnicycleState& s)
{
  VectorXd x(5);
  x << s.x_p, s.y_p, s.theta, s.v, s.omega;
  return x;
}

VectorXd to_vector(const BicycleState& s)
{
  VectorXd x(4);
  x << s.x_p, s.y_p, s.theta, s.v;
  return x;
}

VectorXd to_vector(const PointMassState& s)
{
  VectorXd x(4);
  x << s.p, s.v;
  return x;
}

UnicycleState unicycle_from_vector(const VectorXd& x)
{
  return {x(0), x(1), x(2), x(3), x(4)};
}

BicycleState bicycle_from_vector(const VectorXd& x)
{
  return {x(0), x(1), x(2), x(3)};
}

PointMassState pointmass_from_vector(const VectorXd& x)
{
  return {Vector2d(x(0), x(1)), Vector2d(x(2), x(3))};
}

Vector2d position_of(ModelKind, const VectorXd& x)
{
  return Vector2d(x(0), x(1));
}

double heading_of(ModelKind kind, const VectorXd& x, double heading_hint)
{
  if (kind != ModelKind::pointmass) return x(2);
  const Vector2d v(x(2), x(3));
  if (v.norm() < 1e-9) return heading_hint;
  return std::atan2(v.y(), v.x());
}

double forward_speed(ModelKind kind, const VectorXd& x, double heading_hint)
{
  if (kind != ModelKind::pointmass) return x(3);
  return x(2) * std::cos(heading_hint) + x(3) * std::sin(heading_hint);
}

VectorXd rk4_step(const std::function<VectorXd(const VectorXd&)>& rhs, const VectorXd& x, double dt)
{
  const VectorXd k1 = rhs(x);
  const VectorXd k2 = rhs(x + 0.5 * dt * k1);
  const VectorXd k3 = rhs(x + 0.5 * dt * k2);
  const VectorXd k4 = rhs(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VectorXd integrate_step(const AffineDynamics& dyn, const VectorXd& x, const VectorXd& u, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("integration step must be positive");
  VectorXd next = rk4_step([&](const VectorXd& s) { return dyn.derivative(s, u); }, x, dt);
  if (!next.allFinite()) throw IntegrationError("integration produced a non-finite state");
  return next;
}

}  // namespace conebarrier
