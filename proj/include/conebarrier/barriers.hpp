#pragma once

#include "conebarrier/models.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conebarrier
{

/// Relative speeds at or below this are treated as "no approach": the cone
/// derivative divides by ‖v_rel‖ and is dropped instead of evaluated.
inline constexpr double kMinRelativeSpeed = 1e-6;

/// Moving elliptical obstacle. The velocity is piecewise constant in time.
struct Obstacle
{
  Vector2d center = Vector2d::Zero();
  Vector2d velocity = Vector2d::Zero();
  double c1 = 1.0;  // semi-axis along x (m)
  double c2 = 1.0;  // semi-axis along y (m)

  void validate() const;

  /// Circumscribed radius inflated by half the vehicle width.
  double combined_radius(double vehicle_width) const;
};

/// Thrown when the vehicle point is inside the combined radius (the cone is undefined).
class BarrierDomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Thrown when ‖v_rel‖ ≤ kMinRelativeSpeed.
class DegenerateVelocity : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ConeGeometry
{
  Vector2d p_rel = Vector2d::Zero();
  Vector2d v_rel = Vector2d::Zero();
  double r = 0.0;
  double cos_phi = 0.0;
};

/// Builds the cone seen from the vehicle point. Throws BarrierDomainError when ‖p_rel‖ ≤ r.
ConeGeometry make_cone(const Vector2d& p_rel, const Vector2d& v_rel, double r);

/// h = ⟨p_rel, v_rel⟩ + ‖p_rel‖‖v_rel‖cos φ. Negative iff v_rel points into the cone.
double cone_barrier_value(const ConeGeometry& cone);

/// Constraint row ingredients: h, L_f h and the input-direction row L_g h.
struct BarrierEvaluation
{
  double h = 0.0;
  double lf_h = 0.0;
  VectorXd lg_h;
};

/// Class-K (extended) function used in the barrier inequality ḣ + κ(h) ≥ 0.
class ClassK
{
public:
  enum class Kind
  {
    linear,
    cubic,
    tabulated
  };

  static ClassK linear(double gamma);
  static ClassK cubic(double gamma);
  /// Piecewise-linear through (h_i, κ_i); must contain (0, 0) and be strictly
  /// increasing. Extrapolates with the end slopes.
  static ClassK tabulated(std::vector<std::pair<double, double>> points);

  double operator()(double h) const;
  double derivative(double h) const;

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

private:
  ClassK(Kind kind, double gamma, std::vector<std::pair<double, double>> table);

  Kind kind_;
  double gamma_;
  std::vector<std::pair<double, double>> table_;
};

std::string to_string(ClassK::Kind kind);

BarrierEvaluation c3bf_unicycle(const UnicycleState& s, const Obstacle& obs, double body_offset,
                                double width);
BarrierEvaluation c3bf_bicycle(const BicycleState& s, const Obstacle& obs,
                               const BicycleGeometry& geom, double width);
BarrierEvaluation c3bf_pointmass(const PointMassState& s, const Obstacle& obs, double width);

/// Ellipse barrier ((c_x−x)/c1)² + ((c_y−y)/c2)² − 1 for any of the three models.
/// For the unicycle and the point mass L_g h is identically zero.
BarrierEvaluation ellipse_cbf(const VehicleModel& model, const VectorXd& x, const Obstacle& obs);

/// Second-order barrier h₂ = L_f h₁ + κ₁(h₁) built on the ellipse barrier h₁.
/// For the bicycle the β-dependent part of ḣ₁ is left out of h₂ (h₂ must be a
/// function of state only) and re-enters through L_g h₂.
BarrierEvaluation hocbf(const VehicleModel& model, const VectorXd& x, const Obstacle& obs,
                        const ClassK& kappa1);

enum class BarrierKind
{
  c3bf,
  ellipse,
  hocbf,
  none
};

std::string to_string(BarrierKind kind);
BarrierKind barrier_kind_from_string(const std::string& name);

/// Dispatches to the barrier for `kind`. BarrierKind::none is rejected.
BarrierEvaluation evaluate_barrier(BarrierKind kind, const VehicleModel& model, const VectorXd& x,
                                   const Obstacle& obs, const ClassK& kappa1);

/// Obstacle center minus the vehicle point the cone is built from
/// (body center for the unicycle, CoM otherwise).
Vector2d relative_position(const VehicleModel& model, const VectorXd& x, const Obstacle& obs);

}  // namespace conebarrier
