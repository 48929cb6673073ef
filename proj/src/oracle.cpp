#include "conebarrier/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conebarrier
{

GridMinimum grid_minimize(const QpProblem& qp, double step, double half_width)
{
  if (qp.u_ref.size() != 2) throw std::invalid_argument("grid oracle handles two inputs");
  if (!(step > 0.0) || !(half_width > 0.0)) throw std::invalid_argument("grid step and box must be positive");

  const auto n = static_cast<long>(std::llround(2.0 * half_width / step));
  auto coord = [&](long i) { return -half_width + static_cast<double>(i) * step; };
  auto feasible = [&](double u1, double u2) {
    for (const auto& row : qp.rows) {
      if (row.lg_h(0) * u1 + row.lg_h(1) * u2 < row.rhs) return false;
    }
    return true;
  };

  GridMinimum best;
  best.objective = std::numeric_limits<double>::infinity();
  best.columns = static_cast<std::size_t>(n + 1);
  for (long i = 0; i <= n; ++i) {
    const double u1 = coord(i);
    double lo = -half_width;
    double hi = half_width;
    bool empty = false;
    for (const auto& row : qp.rows) {
      const double a = row.lg_h(1);
      const double rest = row.rhs - row.lg_h(0) * u1;
      if (a > 0.0) {
        lo = std::max(lo, rest / a);
      } else if (a < 0.0) {
        hi = std::min(hi, rest / a);
      } else if (rest > 0.0) {
        empty = true;
      }
    }
    if (empty || lo > hi + step) continue;

    // Candidate indices around the clamped vertex, widened by one to absorb rounding.
    const double target = std::clamp(qp.u_ref(1), lo, hi);
    const long centre = std::lround((target + half_width) / step);
    const long jlo = std::max(0L, static_cast<long>(std::floor((lo + half_width) / step)) - 1);
    const long jhi = std::min(n, static_cast<long>(std::ceil((hi + half_width) / step)) + 1);
    for (long j : {jlo, jlo + 1, centre - 1, centre, centre + 1, jhi - 1, jhi}) {
      if (j < 0 || j > n) continue;
      const double u2 = coord(j);
      if (!feasible(u1, u2)) continue;
      const double f = (u1 - qp.u_ref(0)) * (u1 - qp.u_ref(0)) + (u2 - qp.u_ref(1)) * (u2 - qp.u_ref(1));
      if (f < best.objective) {
        best.objective = f;
        best.u = Vector2d(u1, u2);
        best.feasible = true;
      }
    }
  }
  return best;
}

KktResiduals kkt_residuals(const QpProblem& qp, const SafetyFilterResult& res)
{
  KktResiduals out;
  out.multipliers.assign(qp.rows.size(), 0.0);
  const VectorXd delta = res.u_star - qp.u_ref;
  VectorXd recon = VectorXd::Zero(delta.size());
  if (!res.active_set.empty()) {
    MatrixXd n(delta.size(), static_cast<Eigen::Index>(res.active_set.size()));
    for (std::size_t j = 0; j < res.active_set.size(); ++j) n.col(j) = qp.rows[res.active_set[j]].lg_h;
    const VectorXd lambda = n.colPivHouseholderQr().solve(delta);
    for (std::size_t j = 0; j < res.active_set.size(); ++j) out.multipliers[res.active_set[j]] = lambda(j);
    recon = n * lambda;
  }
  out.stationarity = (delta - recon).norm();
  for (std::size_t i = 0; i < qp.rows.size(); ++i) {
    const double slack = qp.rows[i].lg_h.dot(res.u_star) - qp.rows[i].rhs;
    out.primal = std::max(out.primal, -slack);
    out.dual = std::max(out.dual, -out.multipliers[i]);
    out.complementarity = std::max(out.complementarity, std::abs(out.multipliers[i] * slack));
  }
  return out;
}

}  // namespace conebarrier

namespace conebarrier
{

QpProblem random_qp_instance(std::mt19937_64& rng, int max_rows)
{
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(-3.141592653589793, 3.141592653589793);
  std::uniform_real_distribution<double> scale(0.5, 3.0);
  std::uniform_real_distribution<double> margin(0.0, 2.0);
  std::uniform_int_distribution<int> count(1, max_rows);

  QpProblem qp;
  qp.u_ref = Vector2d(2.0 * unit(rng), 2.0 * unit(rng));
  const Vector2d planted(3.0 * unit(rng), 3.0 * unit(rng));
  const int rows = count(rng);
  for (int i = 0; i < rows; ++i) {
    const double a = angle(rng);
    const Vector2d n = scale(rng) * Vector2d(std::cos(a), std::sin(a));
    qp.rows.push_back({n, n.dot(planted) - margin(rng)});
  }
  return qp;
}

QpOracleStudy qp_oracle_study(std::size_t instances, std::uint64_t seed, double step, double half_width,
                              int max_rows)
{
  QpOracleStudy s;
  s.instances = instances;
  s.grid_step = step;
  s.half_width = half_width;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < instances; ++k) {
    const QpProblem qp = random_qp_instance(rng, max_rows);
    const SafetyFilterResult res = solve_multi_constraint(qp);
    if (res.status != FilterStatus::inactive) ++s.corrected;

    if (qp.rows.size() == 1) {
      ++s.single_row;
      const SafetyFilterResult closed = solve_single_constraint(qp);
      s.max_closed_form_gap = std::max(s.max_closed_form_gap, (closed.u_star - res.u_star).norm());
    }

    const KktResiduals kkt = kkt_residuals(qp, res);
    s.max_complementarity = std::max(s.max_complementarity, kkt.complementarity);
    s.max_stationarity = std::max(s.max_stationarity, kkt.stationarity);
    s.max_primal = std::max(s.max_primal, kkt.primal);
    s.max_dual = std::max(s.max_dual, kkt.dual);

    const GridMinimum grid = grid_minimize(qp, step, half_width);
    double reach = step * (std::sqrt(2.0) + 1.0);
    for (std::size_t i = 0; i < res.active_set.size(); ++i) {
      for (std::size_t j = i + 1; j < res.active_set.size(); ++j) {
        const VectorXd& a = qp.rows[res.active_set[i]].lg_h;
        const VectorXd& b = qp.rows[res.active_set[j]].lg_h;
        const double sin_theta = std::abs(a(0) * b(1) - a(1) * b(0)) / (a.norm() * b.norm());
        reach = std::max(reach, step * (std::sqrt(2.0) + 1.0 / std::max(sin_theta, 1e-12)));
      }
    }
    const double f_star = (res.u_star - qp.u_ref).squaredNorm();
    const double bound = 2.0 * std::sqrt(f_star) * reach + reach * reach;
    bool ok_grid = false;
    if (grid.feasible) {
      const double gap = grid.objective - f_star;
      s.max_distance = std::max(s.max_distance, (grid.u - res.u_star).norm());
      s.max_grid_advantage = std::max(s.max_grid_advantage, -gap);
      s.max_objective_gap = std::max(s.max_objective_gap, gap);
      s.max_gap_ratio = std::max(s.max_gap_ratio, gap / bound);
      ok_grid = gap >= -1e-9 && gap <= bound;
    }
    const bool ok_kkt = res.status != FilterStatus::infeasible && kkt.complementarity <= 1e-9 &&
                        kkt.stationarity <= 1e-9 && kkt.primal <= 1e-9 && kkt.dual <= 1e-9;
    if (!ok_grid || !ok_kkt) ++s.failures;
  }
  if (s.max_closed_form_gap > 1e-12) ++s.failures;
  return s;
}

}  // namespace conebarrier
