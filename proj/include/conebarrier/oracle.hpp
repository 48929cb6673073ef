#pragma once

#include "conebarrier/filter.hpp"

#include <vector>

namespace conebarrier
{

/// Best grid point of the box [−half_width, half_width]² for a two-input QP.
/// Each grid column is searched exactly: its feasible set is an interval and the
/// objective is a convex parabola, so only the grid points nearest its vertex matter.
struct GridMinimum
{
  bool feasible = false;
  VectorXd u;
  double objective = 0.0;
  std::size_t columns = 0;
};

GridMinimum grid_minimize(const QpProblem& qp, double step, double half_width);

/// Karush–Kuhn–Tucker residuals of a filter solution (rows only, no bounds).
struct KktResiduals
{
  std::vector<double> multipliers;  // one per row, zero off the active set
  double stationarity = 0.0;        // ‖u* − u_ref − Σ λ_i lg_i‖
  double primal = 0.0;              // max(0, −slack)
  double dual = 0.0;                // max(0, −λ)
  double complementarity = 0.0;     // max |λ_i · slack_i|
};

KktResiduals kkt_residuals(const QpProblem& qp, const SafetyFilterResult& res);

}  // namespace conebarrier

#include <cstdint>
#include <random>

namespace conebarrier
{

/// Random feasible instance with 1..max_rows rows. A feasible point in [−3, 3]² is
/// planted and u_ref is drawn from [−2, 2]², so the optimum stays inside a ±10 box.
QpProblem random_qp_instance(std::mt19937_64& rng, int max_rows);

struct QpOracleStudy
{
  std::size_t instances = 0;
  std::size_t single_row = 0;
  std::size_t corrected = 0;
  double grid_step = 0.0;
  double half_width = 0.0;
  double max_distance = 0.0;         // ‖u_grid − u*‖, informational
  double max_objective_gap = 0.0;    // f(u_grid) − f(u*)
  double max_gap_ratio = 0.0;        // gap over its resolution bound, ≤ 1 to pass
  double max_grid_advantage = 0.0;   // f(u*) − f(u_grid), must stay ≤ rounding
  double max_closed_form_gap = 0.0;  // single-row closed form vs active set
  double max_complementarity = 0.0;
  double max_stationarity = 0.0;
  double max_primal = 0.0;
  double max_dual = 0.0;
  std::size_t failures = 0;
};

/// Solves every instance with both solvers and compares against grid_minimize.
/// Within resolution means f(u*) ≤ f(u_grid) and f(u_grid) − f(u*) ≤ 2‖u* − u_ref‖d + d²
/// where d = step·(√2 + 1/sin θ) bounds the distance from u* to a feasible grid
/// point, θ the smallest angle between two active normals (θ = π/2 otherwise).
QpOracleStudy qp_oracle_study(std::size_t instances, std::uint64_t seed, double step, double half_width,
                              int max_rows = 3);

}  // namespace conebarrier
