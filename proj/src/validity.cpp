#include "conebarrier/validity.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace conebarrier
{

std::string to_string(ObstacleMotion motion)
{
  return motion == ObstacleMotion::moving ? "moving" : "static";
}

std::string to_string(ValidityDomain domain)
{
  switch (domain) {
    case ValidityDomain::none: return "none";
    case ValidityDomain::safe_set: return "C";
    case ValidityDomain::full_domain: return "D";
  }
  return "none";
}

std::string ValidityReport::verdict() const
{
  if (!valid) return "Not a valid CBF";
  std::string out = "Valid CBF in " + to_string(domain);
  if (no_acceleration) out += ", No acceleration";
  if (no_steering) out += ", No steering";
  return out;
}

namespace
{

constexpr double kPi = std::numbers::pi;

struct Probe
{
  BarrierKind barrier;
  VehicleModel model;
  ObstacleMotion motion;
  const ProbeSettings& settings;
  ClassK kappa;
  std::mt19937_64 rng;

  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  Vector2d in_disk(double radius)
  {
    const double angle = uniform(-kPi, kPi);
    const double rad = radius * std::sqrt(uniform(0.0, 1.0));
    return rad * Vector2d(std::cos(angle), std::sin(angle));
  }

  VectorXd sample_vehicle(bool at_rest)
  {
    const double ws = settings.workspace;
    VectorXd x(model.state_dim());
    x(0) = uniform(-ws, ws);
    x(1) = uniform(-ws, ws);
    if (model.kind == ModelKind::pointmass) {
      const Vector2d v = at_rest ? Vector2d::Zero() : in_disk(settings.max_speed);
      x(2) = v.x();
      x(3) = v.y();
      return x;
    }
    x(2) = uniform(-kPi, kPi);
    x(3) = at_rest ? 0.0 : uniform(-settings.max_speed, settings.max_speed);
    if (model.kind == ModelKind::unicycle) {
      x(4) = at_rest ? 0.0 : uniform(-settings.max_yaw_rate, settings.max_yaw_rate);
    }
    return x;
  }

  // Obstacle placed with ‖p_rel‖ ≥ r + clearance for every heading of the vehicle.
  Obstacle sample_obstacle(const VectorXd& x)
  {
    Obstacle obs;
    obs.c1 = uniform(settings.min_axis, settings.max_axis);
    obs.c2 = uniform(settings.min_axis, settings.max_axis);
    if (motion == ObstacleMotion::moving) obs.velocity = in_disk(settings.max_obstacle_speed);
    const double keep_out = obs.combined_radius(model.width) + settings.clearance + model.body_offset;
    const double ws = settings.workspace;
    for (;;) {
      obs.center = Vector2d(uniform(-ws, ws), uniform(-ws, ws));
      if ((obs.center - Vector2d(x(0), x(1))).norm() >= keep_out) return obs;
    }
  }

  std::optional<BarrierEvaluation> evaluate(const VectorXd& x, const Obstacle& obs) const
  {
    try {
      return evaluate_barrier(barrier, model, x, obs, kappa);
    } catch (const BarrierDomainError&) {
      return std::nullopt;
    } catch (const DegenerateVelocity&) {
      return std::nullopt;
    }
  }
};

void record_kernel_state(ValidityReport& report, const BarrierEvaluation& eval, double psi,
                         const VectorXd& x, const Obstacle& obs)
{
  ++report.kernel_states;
  if (eval.h >= 0.0) {
    if (psi < report.worst_psi_safe) {
      report.worst_psi_safe = psi;
      report.counterexample_state = x;
      report.counterexample_obstacle = obs;
    }
  } else {
    report.worst_psi_unsafe = std::min(report.worst_psi_unsafe, psi);
  }
}

}  // namespace

ValidityReport validity_probe(BarrierKind barrier, ModelKind model_kind, ObstacleMotion motion,
                              std::size_t sample_count, std::uint64_t seed,
                              const ProbeSettings& settings)
{
  if (sample_count < 1) throw std::invalid_argument("validity probe needs at least one sample");
  if (barrier == BarrierKind::none) throw std::invalid_argument("validity probe needs a barrier");

  VehicleModel model;
  model.kind = model_kind;
  model.geometry = settings.geometry;
  model.width = settings.width;
  model.body_offset = model_kind == ModelKind::unicycle ? settings.body_offset : 0.0;

  Probe probe{barrier, model, motion, settings, ClassK::linear(settings.kappa_gain),
              std::mt19937_64(seed)};

  ValidityReport report;
  report.barrier = barrier;
  report.model = model_kind;
  report.motion = motion;
  report.samples = sample_count;
  report.column_max.assign(model.input_dim(), 0.0);

  struct GeneralSample
  {
    VectorXd x;
    Obstacle obs;
    BarrierEvaluation eval;
  };
  std::vector<GeneralSample> general;
  general.reserve(sample_count);

  for (std::size_t i = 0; i < sample_count; ++i) {
    VectorXd x = probe.sample_vehicle(false);
    const Obstacle obs = probe.sample_obstacle(x);
    const auto eval = probe.evaluate(x, obs);
    if (!eval) continue;
    ++report.admissible_samples;
    report.min_lg_norm = std::min(report.min_lg_norm, eval->lg_h.norm());
    for (int j = 0; j < eval->lg_h.size(); ++j) {
      report.column_max[j] = std::max(report.column_max[j], std::abs(eval->lg_h(j)));
    }
    general.push_back({std::move(x), obs, *eval});
  }

  bool all_zero = report.admissible_samples > 0;
  std::vector<bool> zero_column(report.column_max.size());
  for (std::size_t j = 0; j < zero_column.size(); ++j) {
    zero_column[j] = report.column_max[j] <= settings.structural_zero_tol;
    all_zero = all_zero && zero_column[j];
  }
  report.input_never_appears = all_zero;
  if (!all_zero && model_kind != ModelKind::pointmass) {
    report.no_acceleration = zero_column[0];
    report.no_steering = zero_column[1];
  }

  if (all_zero) {
    for (const auto& s : general) {
      record_kernel_state(report, s.eval, s.eval.lf_h + probe.kappa(s.eval.h), s.x, s.obs);
    }
  } else {
    const int grid = settings.heading_grid;
    for (std::size_t i = 0; i < sample_count; ++i) {
      VectorXd x = probe.sample_vehicle(true);
      const Obstacle obs = probe.sample_obstacle(x);

      if (model_kind == ModelKind::pointmass) {
        const auto eval = probe.evaluate(x, obs);
        if (eval && eval->lg_h.norm() <= settings.kernel_tol) {
          record_kernel_state(report, *eval, eval->lf_h + probe.kappa(eval->h), x, obs);
        }
        continue;
      }

      auto at_heading = [&](double theta) {
        VectorXd xs = x;
        xs(2) = theta;
        return probe.evaluate(xs, obs);
      };

      std::vector<double> headings(grid + 1);
      std::vector<std::optional<BarrierEvaluation>> evals(grid + 1);
      double scale = 0.0;
      bool any = false;
      for (int k = 0; k <= grid; ++k) {
        headings[k] = -kPi + 2.0 * kPi * k / grid;
        evals[k] = at_heading(headings[k]);
        if (evals[k]) {
          any = true;
          scale = std::max(scale, evals[k]->lg_h.cwiseAbs().maxCoeff());
        }
      }
      if (!any) continue;
      const double tol = settings.kernel_tol * std::max(1.0, scale);

      if (scale <= tol) {
        // L_g h vanishes for every heading on this slice.
        const int k = std::uniform_int_distribution<int>(0, grid - 1)(probe.rng);
        if (evals[k]) {
          x(2) = headings[k];
          record_kernel_state(report, *evals[k], evals[k]->lf_h + probe.kappa(evals[k]->h), x, obs);
        }
        continue;
      }

      // Column with the largest swing carries the sign changes to bisect.
      int column = 0;
      double best = -1.0;
      for (int j = 0; j < model.input_dim(); ++j) {
        double swing = 0.0;
        for (const auto& e : evals) {
          if (e) swing = std::max(swing, std::abs(e->lg_h(j)));
        }
        if (swing > best) {
          best = swing;
          column = j;
        }
      }

      for (int k = 0; k < grid; ++k) {
        if (!evals[k] || !evals[k + 1]) continue;
        double lo = headings[k], hi = headings[k + 1];
        double f_lo = evals[k]->lg_h(column);
        const double f_hi = evals[k + 1]->lg_h(column);
        if (f_lo * f_hi > 0.0 || (f_lo == 0.0 && f_hi == 0.0)) continue;
        bool ok = true;
        for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const auto e = at_heading(mid);
          if (!e) {
            ok = false;
            break;
          }
          if ((e->lg_h(column) < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = e->lg_h(column);
          } else {
            hi = mid;
          }
        }
        if (!ok) continue;
        const double root = 0.5 * (lo + hi);
        const auto e = at_heading(root);
        if (!e || e->lg_h.norm() > tol) continue;
        VectorXd xs = x;
        xs(2) = root;
        record_kernel_state(report, *e, e->lf_h + probe.kappa(e->h), xs, obs);
      }
    }
  }

  report.valid = report.admissible_samples > 0 && !(report.worst_psi_safe < -settings.psi_tol);
  if (report.valid) {
    report.domain = report.worst_psi_unsafe < -settings.psi_tol ? ValidityDomain::safe_set
                                                                 : ValidityDomain::full_domain;
  }
  return report;
}

std::vector<ValidityRow> validity_matrix(std::size_t sample_count, std::uint64_t seed,
                                         const ProbeSettings& settings)
{
  struct Entry
  {
    BarrierKind barrier;
    ModelKind model;
    bool extension;
  };
  const Entry entries[] = {
    {BarrierKind::ellipse, ModelKind::unicycle, false},
    {BarrierKind::ellipse, ModelKind::bicycle, false},
    {BarrierKind::hocbf, ModelKind::unicycle, false},
    {BarrierKind::hocbf, ModelKind::bicycle, false},
    {BarrierKind::c3bf, ModelKind::unicycle, false},
    {BarrierKind::c3bf, ModelKind::bicycle, false},
    {BarrierKind::c3bf, ModelKind::pointmass, true},
  };

  std::vector<ValidityRow> rows;
  std::uint64_t cell_seed = seed;
  for (const auto& e : entries) {
    ValidityRow row{e.barrier, e.model,
                    validity_probe(e.barrier, e.model, ObstacleMotion::static_obstacle, sample_count,
                                   cell_seed++, settings),
                    validity_probe(e.barrier, e.model, ObstacleMotion::moving, sample_count,
                                   cell_seed++, settings),
                    e.extension};
    if (e.barrier == BarrierKind::c3bf && row.static_case.valid && row.moving_case.valid &&
        row.moving_case.domain == ValidityDomain::safe_set) {
      row.static_case.domain = ValidityDomain::safe_set;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace conebarrier
