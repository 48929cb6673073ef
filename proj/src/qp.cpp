#include "conebarrier/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conebarrier
{

QpRow barrier_row(const BarrierEvaluation& eval, const ClassK& kappa)
{
  return {eval.lg_h, -eval.lf_h - kappa(eval.h)};
}

std::string to_string(FilterStatus status)
{
  switch (status) {
    case FilterStatus::inactive: return "inactive";
    case FilterStatus::corrected: return "corrected";
    case FilterStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace
{

double row_slack(const QpRow& row, const VectorXd& u)
{
  return row.lg_h.dot(u) - row.rhs;
}

std::vector<QpRow> all_rows(const QpProblem& qp)
{
  std::vector<QpRow> rows = qp.rows;
  if (qp.bounds) {
    const auto m = qp.u_ref.size();
    for (Eigen::Index i = 0; i < m; ++i) {
      VectorXd e = VectorXd::Zero(m);
      e(i) = 1.0;
      rows.push_back({e, qp.bounds->lower(i)});
      rows.push_back({-e, -qp.bounds->upper(i)});
    }
  }
  return rows;
}

struct DualSolution
{
  bool feasible = true;
  VectorXd u;
  std::vector<int> active;
};

// Goldfarb–Idnani dual active set for  min ½‖u − u0‖²  s.t.  n_iᵀu ≥ b_i − relax.
DualSolution dual_active_set(const VectorXd& u0, const std::vector<QpRow>& rows, double relax)
{
  const Eigen::Index m = u0.size();
  DualSolution out;
  out.u = u0;
  std::vector<int>& active = out.active;
  std::vector<double> lambda;

  auto tolerance = [&](const QpRow& row) {
    return 1e-12 * (1.0 + std::abs(row.rhs) + row.lg_h.norm() * out.u.norm());
  };
  auto slack = [&](std::size_t i) { return row_slack(rows[i], out.u) + relax; };

  bool first_pass = true;
  const std::size_t max_iter = 50 * (rows.size() + 1) + 100;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Most violated row. The very first check is strict so that ψ < 0 always
    // produces a correction; afterwards a rounding-level tolerance applies.
    int p = -1;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::find(active.begin(), active.end(), static_cast<int>(i)) != active.end()) continue;
      const double s = slack(i);
      const double tol = first_pass ? 0.0 : tolerance(rows[i]);
      if (s < -tol && s < worst) {
        worst = s;
        p = static_cast<int>(i);
      }
    }
    first_pass = false;
    if (p < 0) return out;

    const VectorXd& np = rows[p].lg_h;
    double lambda_p = 0.0;

    for (;;) {
      VectorXd z;
      VectorXd r;
      if (active.empty()) {
        z = np;
      } else {
        MatrixXd n(m, static_cast<Eigen::Index>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j) n.col(j) = rows[active[j]].lg_h;
        const MatrixXd gram = n.transpose() * n;
        r = gram.ldlt().solve(n.transpose() * np);
        z = np - n * r;
      }

      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        if (r(j) > 0.0) {
          const double ratio = lambda[j] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            drop = static_cast<int>(j);
          }
        }
      }

      const double zz = z.dot(np);
      const bool has_direction = z.norm() > 1e-12 * (1.0 + np.norm());
      const double t2 = has_direction ? -slack(p) / zz : std::numeric_limits<double>::infinity();
      const double t = std::min(t1, t2);

      if (!std::isfinite(t)) {
        out.feasible = false;
        return out;
      }

      if (has_direction) out.u += t * z;
      for (Eigen::Index j = 0; j < r.size(); ++j) lambda[j] -= t * r(j);
      lambda_p += t;

      if (t == t2) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        break;
      }
      active.erase(active.begin() + drop);
      lambda.erase(lambda.begin() + drop);
    }
  }
  throw std::runtime_error("active-set iteration limit reached");
}

SafetyFilterResult finish(const QpProblem& qp, VectorXd u_star, std::vector<int> active,
                          FilterStatus status)
{
  SafetyFilterResult res;
  res.u_ref = qp.u_ref;
  res.psi.reserve(qp.rows.size());
  for (const auto& row : qp.rows) res.psi.push_back(row_slack(row, qp.u_ref));
  res.u_star = std::move(u_star);
  res.u_safe = res.u_star - res.u_ref;
  std::sort(active.begin(), active.end());
  res.active_set = std::move(active);
  res.status = status;
  return res;
}

}  // namespace

SafetyFilterResult solve_single_constraint(const QpProblem& qp)
{
  if (qp.rows.size() != 1) throw std::invalid_argument("single-constraint solve needs exactly one row");
  const QpRow& row = qp.rows.front();
  const double psi = row_slack(row, qp.u_ref);
  if (psi >= 0.0) return finish(qp, qp.u_ref, {}, FilterStatus::inactive);

  const double gram = row.lg_h.dot(row.lg_h);
  if (!(gram > 0.0)) throw DegenerateRow("L_g h vanishes; the constraint cannot be enforced");
  const double t = -psi / gram;
  VectorXd u_star = qp.u_ref;
  u_star += t * row.lg_h;
  return finish(qp, std::move(u_star), {0}, FilterStatus::corrected);
}

SafetyFilterResult solve_multi_constraint(const QpProblem& qp)
{
  for (const auto& row : qp.rows) {
    if (row.lg_h.size() != qp.u_ref.size() || !row.lg_h.allFinite() || !std::isfinite(row.rhs)) {
      throw std::invalid_argument("QP rows must be finite and match the input dimension");
    }
  }
  const std::vector<QpRow> rows = all_rows(qp);

  DualSolution sol = dual_active_set(qp.u_ref, rows, 0.0);
  if (sol.feasible) {
    const bool moved = !sol.active.empty();
    std::vector<int> active;
    for (int i : sol.active) {
      if (i < static_cast<int>(qp.rows.size())) active.push_back(i);
    }
    return finish(qp, std::move(sol.u), std::move(active),
                  moved ? FilterStatus::corrected : FilterStatus::inactive);
  }

  // Smallest uniform relaxation that admits a solution, by bisection.
  double hi = 0.0;
  for (const auto& row : rows) hi = std::max(hi, -row_slack(row, qp.u_ref));
  double lo = 0.0;
  DualSolution best = dual_active_set(qp.u_ref, rows, hi);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    DualSolution trial = dual_active_set(qp.u_ref, rows, mid);
    if (trial.feasible) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  std::vector<int> active;
  for (int i : best.active) {
    if (i < static_cast<int>(qp.rows.size())) active.push_back(i);
  }
  SafetyFilterResult res = finish(qp, std::move(best.u), std::move(active), FilterStatus::infeasible);
  res.max_violation = hi;
  return res;
}

}  // namespace conebarrier
