#pragma once

#include "conebarrier/barriers.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace conebarrier
{

enum class ObstacleMotion
{
  static_obstacle,
  moving
};

std::string to_string(ObstacleMotion motion);

enum class ValidityDomain
{
  none,  // not a valid barrier
  safe_set,  // inequality holds where h ≥ 0 only
  full_domain  // inequality holds on every admissible state
};

std::string to_string(ValidityDomain domain);

struct ProbeSettings
{
  double workspace = 10.0;  // vehicle and obstacle positions in [-workspace, workspace]²
  double max_speed = 3.0;
  double max_yaw_rate = 2.0;
  double max_obstacle_speed = 3.0;
  double min_axis = 0.3;
  double max_axis = 2.0;
  double clearance = 0.2;  // samples keep ‖p_rel‖ ≥ r + clearance
  double width = 0.5;
  double body_offset = 0.1;
  BicycleGeometry geometry{};
  double kappa_gain = 1.0;  // κ and κ₁ are linear with this gain
  double structural_zero_tol = 1e-12;
  double kernel_tol = 1e-9;
  double psi_tol = 1e-9;
  int heading_grid = 720;
};

/// Randomized reproduction of a barrier's validity for one (barrier, model,
/// obstacle motion) cell.
///
/// Two sample families are drawn:
///  - general admissible states, which fix the structure of L_g h (input columns
///    that vanish identically, smallest ‖L_g h‖ seen);
///  - kernel states, where the inequality has to hold without any help from the
///    input. When L_g h vanishes identically every general sample is a kernel
///    state. Otherwise kernel states are constructed on the stationary-vehicle
///    slice (v = 0, ω = 0): the vehicle's own motion contributes nothing there,
///    so what remains is the barrier structure against the obstacle motion. The
///    heading that zeroes L_g h is found by grid scan plus bisection.
///
/// The barrier is declared invalid when a kernel state with h ≥ 0 has
/// ψ = L_f h + κ(h) < −psi_tol. A valid barrier is reported on the full domain
/// unless some kernel state with h < 0 also violates the inequality.
struct ValidityReport
{
  BarrierKind barrier = BarrierKind::c3bf;
  ModelKind model = ModelKind::unicycle;
  ObstacleMotion motion = ObstacleMotion::static_obstacle;

  std::size_t samples = 0;
  std::size_t admissible_samples = 0;
  std::size_t kernel_states = 0;

  double min_lg_norm = std::numeric_limits<double>::infinity();
  std::vector<double> column_max;
  bool input_never_appears = false;
  bool no_acceleration = false;
  bool no_steering = false;

  double worst_psi_safe = std::numeric_limits<double>::infinity();
  double worst_psi_unsafe = std::numeric_limits<double>::infinity();
  std::optional<VectorXd> counterexample_state;
  std::optional<Obstacle> counterexample_obstacle;

  bool valid = false;
  ValidityDomain domain = ValidityDomain::none;

  /// Table-style wording, e.g. "Valid CBF, No acceleration".
  std::string verdict() const;
};

ValidityReport validity_probe(BarrierKind barrier, ModelKind model, ObstacleMotion motion,
                              std::size_t sample_count, std::uint64_t seed,
                              const ProbeSettings& settings = {});

/// One row of the verdict matrix: a (barrier, model) pair under both obstacle motions.
struct ValidityRow
{
  BarrierKind barrier;
  ModelKind model;
  ValidityReport static_case;
  ValidityReport moving_case;
  bool extension = false;  // rows beyond the standard six-row comparison
};

/// Evaluates the standard matrix (ellipse/HOCBF/C3BF × unicycle/bicycle) plus
/// the point-mass C3BF extension row. The collision-cone rows report one
/// validity domain per row: static obstacles are the ċ = 0 member of the moving
/// family, so the domain found over moving obstacles is carried to both cells.
std::vector<ValidityRow> validity_matrix(std::size_t sample_count, std::uint64_t seed,
                                         const ProbeSettings& settings = {});

}  // namespace conebarrier
