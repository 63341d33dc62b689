#include <gtest/gtest.h>

#include <cmath>

#include "tacter/tendon.hpp"

using namespace tacter;

namespace {

TendonRoute make_route(double arm_y, double tension) {
  TendonRoute r;
  r.arm_offset = Vec3(0.0, arm_y, 0.0);
  r.tension = tension;
  r.termination_s = 30.0;
  return r;
}

}  // namespace

TEST(PathDerivatives, FiniteDifferenceAlongArc) {
  // Prescribe smooth strain fields u(s), v(s); the body-frame tendon offset is
  // constant, so p_dot and p_ddot follow from u, v and their derivatives.
  // Check the closed forms against central differences of u(s) x r + v(s).
  const TendonRoute route = make_route(3.0, 1.0);
  auto u_of = [](double s) { return Vec3(0.04 * std::sin(0.2 * s), 0.03 * s / 30.0, 0.01); };
  auto v_of = [](double s) { return Vec3(0.001 * s, -0.002, 1.0 + 0.0005 * std::cos(s)); };
  auto p_dot_of = [&](double s) { return Vec3(u_of(s).cross(route.arm_offset) + v_of(s)); };

  const double s0 = 7.3, h = 1e-5;
  const Vec3 u_dot = (u_of(s0 + h) - u_of(s0 - h)) / (2.0 * h);
  const Vec3 v_dot = (v_of(s0 + h) - v_of(s0 - h)) / (2.0 * h);
  const TendonPathDerivatives d =
      tendon_path_derivatives(u_of(s0), v_of(s0), u_dot, v_dot, route);

  EXPECT_LT((d.p_dot - p_dot_of(s0)).norm(), 1e-14);
  // the body-frame second derivative adds the frame rotation term u x p_dot
  // on top of the componentwise derivative of p_dot(s)
  const Vec3 p_ddot_fd = (p_dot_of(s0 + h) - p_dot_of(s0 - h)) / (2.0 * h) +
                         u_of(s0).cross(p_dot_of(s0));
  EXPECT_LT((d.p_ddot - p_ddot_fd).norm(), 1e-8);
}

TEST(DistributedWrench, ForcePerpendicularToPath) {
  const TendonRoute route = make_route(3.0, 2.0);
  const Vec3 u(0.03, -0.01, 0.005), v(0.002, 0.001, 1.001);
  const Vec3 u_dot(0.001, 0.002, -0.0005), v_dot(1e-4, -2e-4, 5e-5);
  const auto d = tendon_path_derivatives(u, v, u_dot, v_dot, route);
  const auto w = distributed_wrench(route, d.p_dot, d.p_ddot);
  EXPECT_LT(std::abs(w.f.dot(d.p_dot)), 1e-12 * w.f.norm() * d.p_dot.norm());
  EXPECT_LT((w.tau + route.arm_offset.cross(w.f)).norm(), 1e-15);
}

TEST(DistributedWrench, LinearInTension) {
  const Vec3 u(0.03, -0.01, 0.005), v(0.002, 0.001, 1.001);
  const Vec3 u_dot(0.001, 0.002, -0.0005), v_dot(1e-4, -2e-4, 5e-5);
  const TendonRoute r1 = make_route(3.0, 1.0), r3 = make_route(3.0, 3.0);
  const auto d = tendon_path_derivatives(u, v, u_dot, v_dot, r1);
  const auto w1 = distributed_wrench(r1, d.p_dot, d.p_ddot);
  const auto w3 = distributed_wrench(r3, d.p_dot, d.p_ddot);
  EXPECT_LT((w3.f - 3.0 * w1.f).norm(), 1e-12 * w3.f.norm());
  EXPECT_LT((w3.tau - 3.0 * w1.tau).norm(), 1e-12 * w3.tau.norm());
}

TEST(DistributedWrench, StraightRodCarriesNoDistributedLoad) {
  // u = 0, v = e3 and vanishing strain derivatives: the path is straight, so
  // the capstan load is zero.
  const TendonRoute route = make_route(3.0, 5.0);
  const auto d = tendon_path_derivatives(Vec3::Zero(), kE3, Vec3::Zero(), Vec3::Zero(), route);
  const auto w = distributed_wrench(route, d.p_dot, d.p_ddot);
  EXPECT_LT(w.f.norm(), 1e-15);
  EXPECT_LT(w.tau.norm(), 1e-15);
}

TEST(DistributedWrench, ConstantCurvatureMagnitude) {
  // With r = 0 (centerline routing) and constant curvature kappa about d1,
  // |p_dot| = 1 and the load reduces to lambda * kappa pointing back toward
  // the center of curvature.
  TendonRoute route = make_route(0.0, 2.0);
  const double kappa = 0.05;
  const Vec3 u(kappa, 0.0, 0.0), v = kE3;
  const auto d = tendon_path_derivatives(u, v, Vec3::Zero(), Vec3::Zero(), route);
  const auto w = distributed_wrench(route, d.p_dot, d.p_ddot);
  EXPECT_NEAR(w.f.norm(), route.tension * kappa, 1e-14);
  // curvature about +d1 turns the tangent toward -d2; the restoring load
  // points at the center of curvature
  EXPECT_LT((w.f - Vec3(0.0, -route.tension * kappa, 0.0)).norm(), 1e-14);
  EXPECT_LT(w.tau.norm(), 1e-15);
}

TEST(DistributedWrench, ThrowsOnDegeneratePath) {
  const TendonRoute route = make_route(3.0, 1.0);
  EXPECT_THROW(distributed_wrench(route, Vec3::Zero(), Vec3(0, 0, 1)), DegeneracyError);
}

TEST(TerminalWrench, PullsBackAlongPath) {
  const TendonRoute route = make_route(3.0, 1.5);
  const Vec3 p_dot(0.1, -0.05, 1.0);
  const auto [F, M] = terminal_wrench(route, p_dot);
  EXPECT_NEAR(F.norm(), route.tension, 1e-12);
  EXPECT_LT((F + route.tension * p_dot.normalized()).norm(), 1e-12);
  EXPECT_LT((M - route.arm_offset.cross(F)).norm(), 1e-15);
}

TEST(TerminalWrench, JumpConditionSigns) {
  const Vec3 n_after(0.1, 0.2, -0.3), m_after(1.0, -2.0, 0.5);
  const Vec3 F(0.0, 0.0, -1.5), M(0.4, 0.0, 0.0);
  const auto [n_before, m_before] = apply_termination_jump(n_after, m_after, F, M);
  EXPECT_LT((n_before - (n_after + F)).norm(), 1e-15);
  EXPECT_LT((m_before - (m_after + M)).norm(), 1e-15);
}

TEST(Route, ValidationRejectsBadInput) {
  TendonRoute r = make_route(3.0, -1.0);
  EXPECT_THROW(r.validate(), ConfigError);
  r.tension = 1.0;
  r.arm_offset.z() = 0.5;
  EXPECT_THROW(r.validate(), ConfigError);
}
