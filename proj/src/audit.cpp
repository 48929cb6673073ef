#include "conebarrier/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conebarrier
{

namespace
{

// Least-squares slope of ln|h| against t, negated.
std::optional<double> fit_decay(const std::vector<double>& t, const std::vector<double>& h)
{
  if (t.size() < 3) return std::nullopt;
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += std::log(std::abs(h[i]));
  }
  mt /= static_cast<double>(t.size());
  my /= static_cast<double>(t.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - mt;
    sxy += dt * (std::log(std::abs(h[i])) - my);
    sxx += dt * dt;
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return -sxy / sxx;
}

}  // namespace

AuditReport invariance_audit(const ScenarioTrace& trace, const ClassK& kappa)
{
  AuditReport report;
  report.barrier_enabled = trace.config.barrier != BarrierKind::none;
  report.collision = std::any_of(trace.events.begin(), trace.events.end(),
                                 [](const TraceEvent& e) { return e.kind == EventKind::collision; });

  const auto& recs = trace.records;
  const std::size_t n_obs = trace.config.obstacles.size();
  const double dt = trace.config.dt;

  for (std::size_t i = 0; i < n_obs; ++i) {
    ObstacleAudit a;
    a.obstacle = static_cast<int>(i);
    a.min_h = std::numeric_limits<double>::infinity();

    std::vector<double> fit_t;
    std::vector<double> fit_h;
    bool before_crossing = true;
    bool monotone = true;
    double prev_h = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t k = 0; k < recs.size(); ++k) {
      const StepRecord& rec = recs[k];
      const double h = rec.h[i];
      const bool usable = rec.in_range[i] && std::isfinite(h);
      if (!usable) {
        prev_h = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      if (!a.observed) {
        a.observed = true;
        a.h_start = h;
        a.started_safe = h >= 0.0;
      }
      a.min_h = std::min(a.min_h, h);

      if (std::isfinite(prev_h)) {
        const double rate = (h - prev_h) / dt + kappa(prev_h);
        a.discrete_residual = std::max(a.discrete_residual, -rate);
      }

      if (!a.started_safe) {
        if (h > 0.0) {
          a.crossed_zero = true;
          before_crossing = false;
        }
        if (before_crossing) {
          if (std::isfinite(prev_h) && std::abs(h) > std::abs(prev_h) * (1.0 + 1e-9) + 1e-12) monotone = false;
          if (h < 0.0 && rec.active[i]) {
            fit_t.push_back(rec.t);
            fit_h.push_back(h);
          }
        }
      }
      prev_h = h;
    }

    if (!a.observed) {
      a.min_h = 0.0;
    } else if (a.started_safe) {
      a.violation = std::max(0.0, -a.min_h);
      report.worst_violation = std::max(report.worst_violation, a.violation);
    } else {
      a.decay_rate = fit_decay(fit_t, fit_h);
      a.magnitude_non_increasing = monotone;
    }
    report.obstacles.push_back(a);
  }
  return report;
}

BetaAudit beta_smallness_audit(const ScenarioTrace& trace, double beta_threshold)
{
  if (trace.config.model.kind != ModelKind::bicycle) {
    throw std::invalid_argument("slip audit applies to bicycle traces only");
  }
  BetaAudit out;
  const auto& recs = trace.records;
  if (recs.empty()) return out;
  const BicycleGeometry& geom = trace.config.model.geometry;
  const double dt = trace.config.dt;

  VectorXd exact = recs.front().state;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    out.max_abs_beta = std::max(out.max_abs_beta, std::abs(recs[k].beta));
    const Vector2d approx_p = position_of(ModelKind::bicycle, recs[k].state);
    out.divergence = std::max(out.divergence, (approx_p - position_of(ModelKind::bicycle, exact)).norm());
    if (k + 1 == recs.size()) break;
    out.path_length += (position_of(ModelKind::bicycle, recs[k + 1].state) - approx_p).norm();
    const BicycleInput u{recs[k].u_star(0), recs[k].u_star(1)};
    exact = rk4_step(
      [&](const VectorXd& x) -> VectorXd { return bicycle_dynamics_exact(bicycle_from_vector(x), u, geom); },
      exact, dt);
  }
  out.relative_divergence = out.path_length > 0.0 ? out.divergence / out.path_length : 0.0;
  out.flagged = out.max_abs_beta > beta_threshold;
  return out;
}

}  // namespace conebarrier
