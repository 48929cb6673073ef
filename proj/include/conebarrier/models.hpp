#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace conebarrier
{

using Vector2d = Eigen::Vector2d;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

// Acceleration-controlled unicycle. Heading is never wrapped.
struct UnicycleState
{
  double x_p = 0.0;
  double y_p = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

struct UnicycleInput
{
  double a = 0.0;
  double alpha = 0.0;
};

// Small-slip kinematic bicycle; the slip angle at the CoM is the steering input.
struct BicycleState
{
  double x_p = 0.0;
  double y_p = 0.0;
  double theta = 0.0;
  double v = 0.0;
};

struct BicycleInput
{
  double a = 0.0;
  double beta = 0.0;
};

struct BicycleGeometry
{
  double l_f = 1.2;  // front axle to CoM (m)
  double l_r = 1.6;  // rear axle to CoM (m)

  void validate() const;
};

struct PointMassState
{
  Vector2d p = Vector2d::Zero();
  Vector2d v = Vector2d::Zero();
};

class IntegrationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Returns (v cos θ, v sin θ, ω, a, α).
Eigen::Matrix<double, 5, 1> unicycle_dynamics(const UnicycleState& s, const UnicycleInput& u);

/// Small-β bicycle: f(x) + g(x)u with u = (a, β).
Eigen::Vector4d bicycle_dynamics(const BicycleState& s, const BicycleInput& u,
                                 const BicycleGeometry& geom);

/// Bicycle without the small-slip approximation (cos β, sin β kept exact).
/// Not control-affine; used only to audit how far the approximation drifts.
Eigen::Vector4d bicycle_dynamics_exact(const BicycleState& s, const BicycleInput& u,
                                       const BicycleGeometry& geom);

/// Maps a front steering angle to the CoM slip angle. Throws std::domain_error for |δ| ≥ π/2.
double slip_from_steering(double delta, const BicycleGeometry& geom);

/// Double integrator: returns (v, u).
Eigen::Vector4d pointmass_dynamics(const PointMassState& s, const Vector2d& u);

enum class ModelKind
{
  unicycle,
  bicycle,
  pointmass
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Vehicle description shared by the dynamics and barrier layers.
/// body_offset is the unicycle's body-center offset from the drive axis and is
/// only used by the barriers; width inflates obstacle radii.
struct VehicleModel
{
  ModelKind kind = ModelKind::unicycle;
  BicycleGeometry geometry{};
  double body_offset = 0.1;
  double width = 0.0;

  int state_dim() const;
  int input_dim() const;
  void validate() const;
};

/// Control-affine view x' = f(x) + g(x)u of a vehicle model over flat state vectors.
class AffineDynamics
{
public:
  explicit AffineDynamics(const VehicleModel& model);

  int state_dim() const { return model_.state_dim(); }
  int input_dim() const { return model_.input_dim(); }
  const VehicleModel& model() const { return model_; }

  VectorXd drift(const VectorXd& x) const;
  MatrixXd actuation(const VectorXd& x) const;
  VectorXd derivative(const VectorXd& x, const VectorXd& u) const;

private:
  VehicleModel model_;
};

VectorXd to_vector(const UnicycleState& s);
VectorXd to_vector(const BicycleState& s);
VectorXd to_vector(const PointMassState& s);
UnicycleState unicycle_from_vector(const VectorXd& x);
BicycleState bicycle_from_vector(const VectorXd& x);
PointMassState pointmass_from_vector(const VectorXd& x);

/// Planar position of the vehicle reference point (CoM / axle center).
Vector2d position_of(ModelKind kind, const VectorXd& x);

/// Signed forward speed; for the point mass the speed along `heading_hint`.
double forward_speed(ModelKind kind, const VectorXd& x, double heading_hint = 0.0);

/// Heading angle; for the point mass the direction of travel (hint when at rest).
double heading_of(ModelKind kind, const VectorXd& x, double heading_hint = 0.0);

/// One classical RK4 step of x' = rhs(x).
VectorXd rk4_step(const std::function<VectorXd(const VectorXd&)>& rhs, const VectorXd& x, double dt);

/// RK4 step of the closed loop with the input held constant over the step.
/// Throws IntegrationError if the result is not finite.
VectorXd integrate_step(const AffineDynamics& dyn, const VectorXd& x, const VectorXd& u, double dt);

}  // namespace conebarrier
