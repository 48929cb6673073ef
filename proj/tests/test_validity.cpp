#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conebarrier/validity.hpp"

using namespace conebarrier;

namespace
{

ProbeSettings fast_settings()
{
  ProbeSettings s;
  s.heading_grid = 180;
  return s;
}

ValidityReport probe(BarrierKind b, ModelKind m, ObstacleMotion motion)
{
  return validity_probe(b, m, motion, 1000, 17, fast_settings());
}

}  // namespace

TEST_CASE("first-order ellipse barrier on the unicycle never sees the input")
{
  const auto r = probe(BarrierKind::ellipse, ModelKind::unicycle, ObstacleMotion::static_obstacle);
  CHECK(r.input_never_appears);
  CHECK_FALSE(r.valid);
  CHECK(r.verdict() == "Not a valid CBF");
  CHECK(r.counterexample_state.has_value());
}

TEST_CASE("ellipse barrier on the bicycle")
{
  const auto st = probe(BarrierKind::ellipse, ModelKind::bicycle, ObstacleMotion::static_obstacle);
  CHECK(st.valid);
  CHECK(st.no_acceleration);
  CHECK_FALSE(st.no_steering);
  const auto mv = probe(BarrierKind::ellipse, ModelKind::bicycle, ObstacleMotion::moving);
  CHECK_FALSE(mv.valid);
  REQUIRE(mv.counterexample_obstacle.has_value());
  CHECK(mv.counterexample_obstacle->velocity.norm() > 0.0);
}

TEST_CASE("second-order barrier loses steering on the unicycle")
{
  const auto r = probe(BarrierKind::hocbf, ModelKind::unicycle, ObstacleMotion::static_obstacle);
  CHECK(r.valid);
  CHECK(r.no_steering);
  CHECK_FALSE(r.no_acceleration);
}

TEST_CASE("second-order barrier on the bicycle")
{
  CHECK(probe(BarrierKind::hocbf, ModelKind::bicycle, ObstacleMotion::static_obstacle).valid);
  const auto mv = probe(BarrierKind::hocbf, ModelKind::bicycle, ObstacleMotion::moving);
  CHECK_FALSE(mv.valid);
  CHECK(mv.worst_psi_safe < 0.0);
}

TEST_CASE("cone barrier validity domains")
{
  const auto uni = probe(BarrierKind::c3bf, ModelKind::unicycle, ObstacleMotion::moving);
  CHECK(uni.valid);
  CHECK(uni.domain == ValidityDomain::full_domain);
  CHECK(uni.min_lg_norm > 0.0);
  const auto bic = probe(BarrierKind::c3bf, ModelKind::bicycle, ObstacleMotion::moving);
  CHECK(bic.valid);
  CHECK(bic.domain == ValidityDomain::safe_set);
  CHECK(bic.kernel_states > 0);
  CHECK(bic.worst_psi_safe >= -1e-9);
  CHECK(bic.worst_psi_unsafe < 0.0);
  const auto pm = probe(BarrierKind::c3bf, ModelKind::pointmass, ObstacleMotion::moving);
  CHECK(pm.valid);
  CHECK(pm.domain == ValidityDomain::full_domain);
}

TEST_CASE("probe is deterministic for a seed")
{
  const auto a = probe(BarrierKind::c3bf, ModelKind::bicycle, ObstacleMotion::moving);
  const auto b = probe(BarrierKind::c3bf, ModelKind::bicycle, ObstacleMotion::moving);
  CHECK(a.kernel_states == b.kernel_states);
  CHECK(a.worst_psi_unsafe == b.worst_psi_unsafe);
  CHECK(a.min_lg_norm == b.min_lg_norm);
}

TEST_CASE("verdict wording")
{
  ValidityReport r;
  CHECK(r.verdict() == "Not a valid CBF");
  r.valid = true;
  r.domain = ValidityDomain::safe_set;
  CHECK(r.verdict() == "Valid CBF in C");
  r.domain = ValidityDomain::full_domain;
  r.no_acceleration = true;
  CHECK(r.verdict() == "Valid CBF in D, No acceleration");
}

TEST_CASE("matrix layout")
{
  const auto rows = validity_matrix(1000, 5, fast_settings());
  REQUIRE(rows.size() == 7);
  int extensions = 0;
  for (const auto& row : rows) {
    CHECK(row.static_case.barrier == row.barrier);
    CHECK(row.moving_case.motion == ObstacleMotion::moving);
    extensions += row.extension ? 1 : 0;
    if (row.barrier == BarrierKind::c3bf) CHECK(row.static_case.domain == row.moving_case.domain);
  }
  CHECK(extensions == 1);
  CHECK(rows.back().model == ModelKind::pointmass);
  CHECK(rows.back().extension);
}
