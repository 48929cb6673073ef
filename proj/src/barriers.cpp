#include "conebarrier/barriers.hpp"

#include <algorithm>
#include <cmath>

namespace conebarrier
{

using Matrix2d = Eigen::Matrix2d;

void Obstacle::validate() const
{
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw std::invalid_argument("obstacle semi-axes must be positive");
  }
  if (!center.allFinite() || !velocity.allFinite()) {
    throw std::invalid_argument("obstacle center and velocity must be finite");
  }
}

double Obstacle::combined_radius(double vehicle_width) const
{
  return std::max(c1, c2) + 0.5 * vehicle_width;
}

ConeGeometry make_cone(const Vector2d& p_rel, const Vector2d& v_rel, double r)
{
  const double dist = p_rel.norm();
  if (!(dist > r)) {
    throw BarrierDomainError("relative position inside combined radius; collision cone undefined");
  }
  ConeGeometry cone;
  cone.p_rel = p_rel;
  cone.v_rel = v_rel;
  cone.r = r;
  cone.cos_phi = std::sqrt(dist * dist - r * r) / dist;
  return cone;
}

double cone_barrier_value(const ConeGeometry& cone)
{
  return cone.p_rel.dot(cone.v_rel) + cone.p_rel.norm() * cone.v_rel.norm() * cone.cos_phi;
}

// ---------------------------------------------------------------------------
// Class-K

ClassK::ClassK(Kind kind, double gamma, std::vector<std::pair<double, double>> table)
  : kind_(kind), gamma_(gamma), table_(std::move(table))
{
}

ClassK ClassK::linear(double gamma)
{
  if (!(gamma > 0.0)) throw std::invalid_argument("class-K gain must be positive");
  return ClassK(Kind::linear, gamma, {});
}

ClassK ClassK::cubic(double gamma)
{
  if (!(gamma > 0.0)) throw std::invalid_argument("class-K gain must be positive");
  return ClassK(Kind::cubic, gamma, {});
}

ClassK ClassK::tabulated(std::vector<std::pair<double, double>> points)
{
  std::sort(points.begin(), points.end());
  if (points.size() < 2) throw std::invalid_argument("tabulated class-K needs at least two points");
  bool has_origin = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].first == 0.0 && points[i].second == 0.0) has_origin = true;
    if (i > 0 && !(points[i].first > points[i - 1].first && points[i].second > points[i - 1].second)) {
      throw std::invalid_argument("tabulated class-K must be strictly increasing");
    }
  }
  if (!has_origin) throw std::invalid_argument("tabulated class-K must pass through (0, 0)");
  return ClassK(Kind::tabulated, 1.0, std::move(points));
}

namespace
{

std::size_t segment_index(const std::vector<std::pair<double, double>>& t, double h)
{
  // Index i of the segment [t[i], t[i+1]] used for h (end segments extrapolate).
  const auto it = std::upper_bound(t.begin(), t.end(), h,
                                   [](double value, const auto& p) { return value < p.first; });
  std::size_t i = static_cast<std::size_t>(std::distance(t.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, t.size() - 2);
}

}  // namespace

double ClassK::operator()(double h) const
{
  switch (kind_) {
    case Kind::linear: return gamma_ * h;
    case Kind::cubic: return gamma_ * h * h * h;
    case Kind::tabulated: {
      const std::size_t i = segment_index(table_, h);
      const auto& [h0, k0] = table_[i];
      const auto& [h1, k1] = table_[i + 1];
      return k0 + (k1 - k0) / (h1 - h0) * (h - h0);
    }
  }
  return 0.0;
}

double ClassK::derivative(double h) const
{
  switch (kind_) {
    case Kind::linear: return gamma_;
    case Kind::cubic: return 3.0 * gamma_ * h * h;
    case Kind::tabulated: {
      const std::size_t i = segment_index(table_, h);
      return (table_[i + 1].second - table_[i].second) / (table_[i + 1].first - table_[i].first);
    }
  }
  return 0.0;
}

std::string to_string(ClassK::Kind kind)
{
  switch (kind) {
    case ClassK::Kind::linear: return "linear";
    case ClassK::Kind::cubic: return "cubic";
    case ClassK::Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Collision-cone barrier

namespace
{

// Time derivatives of the cone vectors, affine in the input:
//   ṗ_rel = pd_drift + pd_input·u,   v̇_rel = vd_drift + vd_input·u.
struct ConeRates
{
  Vector2d pd_drift = Vector2d::Zero();
  Matrix2d pd_input = Matrix2d::Zero();
  Vector2d vd_drift = Vector2d::Zero();
  Matrix2d vd_input = Matrix2d::Zero();
};

// ḣ = ⟨ṗ, v + p‖v‖/s⟩ + ⟨v̇, p + v s/‖v‖⟩ with s = √(‖p‖² − r²).
BarrierEvaluation cone_barrier(const Vector2d& p_rel, const Vector2d& v_rel, double r,
                               const ConeRates& rates)
{
  const ConeGeometry cone = make_cone(p_rel, v_rel, r);
  const double speed = v_rel.norm();
  if (!(speed > kMinRelativeSpeed)) {
    throw DegenerateVelocity("relative velocity too small for the collision-cone derivative");
  }
  const double tangent = std::sqrt(p_rel.squaredNorm() - r * r);

  const Vector2d along_p = v_rel + p_rel * (speed / tangent);
  const Vector2d along_v = p_rel + v_rel * (tangent / speed);

  BarrierEvaluation out;
  out.h = cone_barrier_value(cone);
  out.lf_h = along_p.dot(rates.pd_drift) + along_v.dot(rates.vd_drift);
  out.lg_h = rates.pd_input.transpose() * along_p + rates.vd_input.transpose() * along_v;
  return out;
}

}  // namespace

BarrierEvaluation c3bf_unicycle(const UnicycleState& s, const Obstacle& obs, double body_offset,
                                double width)
{
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double l = body_offset;

  const Vector2d body(s.x_p + l * c, s.y_p + l * sn);
  const Vector2d body_velocity(s.v * c - l * sn * s.omega, s.v * sn + l * c * s.omega);
  const Vector2d p_rel = obs.center - body;
  const Vector2d v_rel = obs.velocity - body_velocity;

  ConeRates rates;
  rates.pd_drift = v_rel;
  rates.vd_drift << s.v * sn * s.omega + l * c * s.omega * s.omega,
                   -s.v * c * s.omega + l * sn * s.omega * s.omega;
  rates.vd_input << -c, l * sn,
                    -sn, -l * c;
  return cone_barrier(p_rel, v_rel, obs.combined_radius(width), rates);
}

BarrierEvaluation c3bf_bicycle(const BicycleState& s, const Obstacle& obs,
                               const BicycleGeometry& geom, double width)
{
  // v_rel uses the longitudinal velocity only; the slip contribution to the true
  // relative velocity shows up in ṗ_rel through the β column.
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double yaw_gain = s.v / geom.l_r;

  const Vector2d p_rel = obs.center - Vector2d(s.x_p, s.y_p);
  const Vector2d v_rel = obs.velocity - s.v * Vector2d(c, sn);

  ConeRates rates;
  rates.pd_drift = v_rel;
  rates.pd_input << 0.0, s.v * sn,
                    0.0, -s.v * c;
  rates.vd_input << -c, s.v * sn * yaw_gain,
                    -sn, -s.v * c * yaw_gain;
  return cone_barrier(p_rel, v_rel, obs.combined_radius(width), rates);
}

BarrierEvaluation c3bf_pointmass(const PointMassState& s, const Obstacle& obs, double width)
{
  ConeRates rates;
  const Vector2d p_rel = obs.center - s.p;
  const Vector2d v_rel = obs.velocity - s.v;
  rates.pd_drift = v_rel;
  rates.vd_input = -Matrix2d::Identity();
  return cone_barrier(p_rel, v_rel, obs.combined_radius(width), rates);
}

// ---------------------------------------------------------------------------
// Ellipse barrier and its second-order extension

namespace
{

// Motion of the ellipse-reference point (x_p, y_p):
//   ṗ = p_drift + p_input·u,  d/dt(p_drift) = pd_rate_drift + pd_rate_input·u.
struct PointMotion
{
  Vector2d p_drift = Vector2d::Zero();
  Matrix2d p_input = Matrix2d::Zero();
  Vector2d pd_rate_drift = Vector2d::Zero();
  Matrix2d pd_rate_input = Matrix2d::Zero();
};

PointMotion reference_point_motion(const VehicleModel& model, const VectorXd& x)
{
  PointMotion m;
  switch (model.kind) {
    case ModelKind::unicycle: {
      const double th = x(2), v = x(3), w = x(4);
      const Vector2d heading(std::cos(th), std::sin(th));
      const Vector2d normal(-std::sin(th), std::cos(th));
      m.p_drift = v * heading;
      m.pd_rate_drift = v * w * normal;
      m.pd_rate_input.col(0) = heading;
      break;
    }
    case ModelKind::bicycle: {
      const double th = x(2), v = x(3);
      const Vector2d heading(std::cos(th), std::sin(th));
      const Vector2d normal(-std::sin(th), std::cos(th));
      m.p_drift = v * heading;
      m.p_input.col(1) = v * normal;
      m.pd_rate_input.col(0) = heading;
      m.pd_rate_input.col(1) = v * v / model.geometry.l_r * normal;
      break;
    }
    case ModelKind::pointmass:
      m.p_drift = Vector2d(x(2), x(3));
      m.pd_rate_input = Matrix2d::Identity();
      break;
  }
  return m;
}

}  // namespace

BarrierEvaluation ellipse_cbf(const VehicleModel& model, const VectorXd& x, const Obstacle& obs)
{
  obs.validate();
  const Matrix2d weight = Vector2d(1.0 / (obs.c1 * obs.c1), 1.0 / (obs.c2 * obs.c2)).asDiagonal();
  const PointMotion m = reference_point_motion(model, x);
  const Vector2d d = obs.center - Vector2d(x(0), x(1));
  const Vector2d closing = obs.velocity - m.p_drift;

  BarrierEvaluation out;
  out.h = d.dot(weight * d) - 1.0;
  out.lf_h = 2.0 * d.dot(weight * closing);
  out.lg_h = -2.0 * m.p_input.transpose() * (weight * d);
  return out;
}

BarrierEvaluation hocbf(const VehicleModel& model, const VectorXd& x, const Obstacle& obs,
                        const ClassK& kappa1)
{
  obs.validate();
  const Matrix2d weight = Vector2d(1.0 / (obs.c1 * obs.c1), 1.0 / (obs.c2 * obs.c2)).asDiagonal();
  const PointMotion m = reference_point_motion(model, x);
  const Vector2d d = obs.center - Vector2d(x(0), x(1));
  const Vector2d closing = obs.velocity - m.p_drift;

  const BarrierEvaluation first = ellipse_cbf(model, x, obs);
  const double slope = kappa1.derivative(first.h);

  // ḋ = closing − p_input·u,  d/dt(closing) = −pd_rate_drift − pd_rate_input·u.
  BarrierEvaluation out;
  out.h = first.lf_h + kappa1(first.h);
  out.lf_h = 2.0 * closing.dot(weight * closing) - 2.0 * d.dot(weight * m.pd_rate_drift) +
             slope * first.lf_h;
  out.lg_h = -2.0 * m.p_input.transpose() * (weight * closing) -
             2.0 * m.pd_rate_input.transpose() * (weight * d) + slope * first.lg_h;
  return out;
}

std::string to_string(BarrierKind kind)
{
  switch (kind) {
    case BarrierKind::c3bf: return "c3bf";
    case BarrierKind::ellipse: return "ellipse";
    case BarrierKind::hocbf: return "hocbf";
    case BarrierKind::none: return "none";
  }
  return "unknown";
}

BarrierKind barrier_kind_from_string(const std::string& name)
{
  if (name == "c3bf") return BarrierKind::c3bf;
  if (name == "ellipse") return BarrierKind::ellipse;
  if (name == "hocbf") return BarrierKind::hocbf;
  if (name == "none") return BarrierKind::none;
  throw std::invalid_argument("unknown barrier kind: " + name);
}

BarrierEvaluation evaluate_barrier(BarrierKind kind, const VehicleModel& model, const VectorXd& x,
                                   const Obstacle& obs, const ClassK& kappa1)
{
  switch (kind) {
    case BarrierKind::c3bf:
      switch (model.kind) {
        case ModelKind::unicycle:
          return c3bf_unicycle(unicycle_from_vector(x), obs, model.body_offset, model.width);
        case ModelKind::bicycle:
          return c3bf_bicycle(bicycle_from_vector(x), obs, model.geometry, model.width);
        case ModelKind::pointmass:
          return c3bf_pointmass(pointmass_from_vector(x), obs, model.width);
      }
      break;
    case BarrierKind::ellipse: return ellipse_cbf(model, x, obs);
    case BarrierKind::hocbf: return hocbf(model, x, obs, kappa1);
    case BarrierKind::none: break;
  }
  throw std::invalid_argument("no barrier to evaluate for kind 'none'");
}

Vector2d relative_position(const VehicleModel& model, const VectorXd& x, const Obstacle& obs)
{
  Vector2d point(x(0), x(1));
  if (model.kind == ModelKind::unicycle) {
    point += model.body_offset * Vector2d(std::cos(x(2)), std::sin(x(2)));
  }
  return obs.center - point;
}

}  // namespace conebarrier
