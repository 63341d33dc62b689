#pragma once

// Coupled two-tube statics on the overlap segment and the single-rod closure
// on the distal segment.
//
// Overlap state: the shared centerline P, tube-1 frame R1, tube-1 strains
// (u1, v1), the inner tube's d3 curvature u_{d3,2}, the dilation ratio beta,
// and the inter-tube twist theta. Tube-2 strains are reconstructed from the
// twist/dilation coupling. The derivative closure is a linear 8x8 system in
// [u1_dot, v1_dot, u_{d3,2}_dot, beta_dot]: two moment-sum and two force-sum
// rows (d1, d2 of the additive equilibrium of both tubes, expressed in the
// tube-1 frame) plus per-tube d3 moment and force balances.

#include <cmath>
#include <span>
#include <vector>

#include "tacter/common.hpp"
#include "tacter/geometry.hpp"
#include "tacter/rod.hpp"
#include "tacter/tendon.hpp"

namespace tacter {

// Undeformed reference strains: both tubes are straight when unactuated.
inline const Vec3 kRefV{0.0, 0.0, 1.0};

struct OverlapState {
  Vec3 u1 = Vec3::Zero();
  Vec3 v1 = kRefV;
  double u_d3_2 = 0.0;
  double beta = 1.0;
  double theta = 0.0;

  double theta_dot() const { return u_d3_2 - u1.z(); }
};

struct Tube2Strains {
  Vec3 u2, v2, u2_dot, v2_dot;
};

// Tube-2 strains and their arc-length derivatives from tube-1 strains and the
// twist/dilation coupling.
inline Tube2Strains reconstruct_tube2_strains(const Vec3& u1, const Vec3& v1, double theta,
                                              double theta_dot, double beta, double beta_dot,
                                              const Vec3& u1_dot, const Vec3& v1_dot,
                                              double u_d3_2_dot) {
  const Mat3 Rt = rot_d3(theta).transpose();
  Tube2Strains t;
  t.u2 = Rt * u1 + theta_dot * kE3;
  t.v2 = beta * (Rt * v1);
  Mat3 A = Rt;
  A.row(2).setZero(); // Rt - diag(0,0,1): third row of Rt is e3^T
  t.u2_dot = A * u1_dot - theta_dot * kE3.cross(Rt * u1) + u_d3_2_dot * kE3;
  t.v2_dot = beta_dot * (Rt * v1) - beta * theta_dot * kE3.cross(Rt * v1) + beta * (Rt * v1_dot);
  return t;
}

// Aggregated tendon terms for one tube at a given strain state. With
// C_t = -lambda [p_dot]^2 / |p_dot|^3 per tendon, the distributed loads are
//   f   = -D u_dot + S v_dot + g
//   tau =  P u_dot - Q v_dot + h
struct TendonSystemTerms {
  Mat3 S = Mat3::Zero();
  Mat3 D = Mat3::Zero();
  Mat3 P = Mat3::Zero();
  Mat3 Q = Mat3::Zero();
  Vec3 g = Vec3::Zero();
  Vec3 h = Vec3::Zero();
};

inline TendonSystemTerms tendon_system_terms(std::span<const TendonRoute> routes, const Vec3& u,
                                             const Vec3& v) {
  TendonSystemTerms t;
  for (const TendonRoute& route : routes) {
    const Vec3 p_dot = u.cross(route.arm_offset) + v;
    const double speed = p_dot.norm();
    if (speed <= kMinTendonSpeed)
      throw DegeneracyError("degenerate tendon path in system assembly", 0.0);
    const Mat3 Sp = skew(p_dot);
    const Mat3 C = -(route.tension / (speed * speed * speed)) * (Sp * Sp);
    const Mat3 Sr = skew(route.arm_offset);
    t.S += C;
    t.D += C * Sr;
    t.P += Sr * C * Sr;
    t.Q += Sr * C;
    const Vec3 w = C * u.cross(p_dot);
    t.g += w;
    t.h -= Sr * w;
  }
  return t;
}

struct CoupledSystem {
  Mat8 lhs;
  Vec8 rhs;
};

namespace detail {

// Cheap singularity guard on a computed LU: ratio of extreme |U_ii|.
template <class LU>
void check_conditioning(const LU& lu, double s, const char* what) {
  const auto diag = lu.matrixLU().diagonal();
  const double mx = diag.cwiseAbs().maxCoeff();
  const double mn = diag.cwiseAbs().minCoeff();
  if (!(mn > 0.0) || mx / mn > 1e12 || !std::isfinite(mx))
    throw DegeneracyError(std::string("near-singular local system: ") + what, s);
}

}  // namespace detail

// The linear system whose solution is x = [u1_dot; v1_dot; u_{d3,2}_dot; beta_dot].
inline CoupledSystem assemble_coupled_system(const OverlapState& st, const CrossSection& sec1,
                                             const CrossSection& sec2,
                                             std::span<const TendonRoute> tube1_routes,
                                             std::span<const TendonRoute> tube2_routes) {
  const double theta_dot = st.theta_dot();
  const Mat3 Rth = rot_d3(st.theta);
  const Mat3 Rt = Rth.transpose();

  const Vec3 u2 = Rt * st.u1 + theta_dot * kE3;
  const Vec3 v2 = st.beta * (Rt * st.v1);

  const Vec3 n1 = sec1.K_se * (st.v1 - kRefV);
  const Vec3 m1 = sec1.K_bt * st.u1;
  const Vec3 n2 = sec2.K_se * (v2 - kRefV);
  const Vec3 m2 = sec2.K_bt * u2;

  const TendonSystemTerms T1 = tendon_system_terms(tube1_routes, st.u1, st.v1);
  const TendonSystemTerms T2 = tendon_system_terms(tube2_routes, u2, v2);

  // Linear maps from x to the tube-2 strain derivatives:
  //   u2_dot = A u1_dot + e3 sigma + a0,   v2_dot = B v1_dot + b1 beta_dot + b0
  Mat3 A = Rt;
  A.row(2).setZero();
  const Vec3 a0 = -theta_dot * kE3.cross(Rt * st.u1);
  const Mat3 B = st.beta * Rt;
  const Vec3 b1 = Rt * st.v1;
  const Vec3 b0 = -st.beta * theta_dot * kE3.cross(Rt * st.v1);

  // Tube-1 equilibrium residuals as affine functions of x.
  const Mat3 M1u = sec1.K_bt + T1.P;
  const Mat3 M1v = -T1.Q;
  const Vec3 cM1 = st.u1.cross(m1) + st.v1.cross(n1) + T1.h;
  const Mat3 N1u = -T1.D;
  const Mat3 N1v = sec1.K_se + T1.S;
  const Vec3 cN1 = st.u1.cross(n1) + T1.g;

  // Tube-2 residuals, composed through the reconstruction maps.
  const Mat3 KP2 = sec2.K_bt + T2.P;
  const Mat3 M2u = KP2 * A;
  const Mat3 M2v = -T2.Q * B;
  const Vec3 M2s = KP2 * kE3;
  const Vec3 M2b = -T2.Q * b1;
  const Vec3 cM2 = KP2 * a0 - T2.Q * b0 + u2.cross(m2) + v2.cross(n2) + T2.h;
  const Mat3 KS2 = sec2.K_se + T2.S;
  const Mat3 N2u = -T2.D * A;
  const Mat3 N2v = KS2 * B;
  const Vec3 N2s = -T2.D * kE3;
  const Vec3 N2b = KS2 * b1;
  const Vec3 cN2 = KS2 * b0 - T2.D * a0 + u2.cross(n2) + T2.g;

  // Additive sums in the tube-1 frame: tube-2 local vectors rotate by R_d3(theta).
  const Mat3 SMu = M1u + Rth * M2u;
  const Mat3 SMv = M1v + Rth * M2v;
  const Vec3 SMs = Rth * M2s;
  const Vec3 SMb = Rth * M2b;
  const Vec3 SMc = cM1 + Rth * cM2;
  const Mat3 SNu = N1u + Rth * N2u;
  const Mat3 SNv = N1v + Rth * N2v;
  const Vec3 SNs = Rth * N2s;
  const Vec3 SNb = Rth * N2b;
  const Vec3 SNc = cN1 + Rth * cN2;

  CoupledSystem sys;
  sys.lhs.setZero();
  sys.rhs.setZero();
  auto fill_row = [&sys](int row, const Eigen::RowVector3d& cu, const Eigen::RowVector3d& cv,
                         double cs, double cb, double c) {
    sys.lhs.block<1, 3>(row, 0) = cu;
    sys.lhs.block<1, 3>(row, 3) = cv;
    sys.lhs(row, 6) = cs;
    sys.lhs(row, 7) = cb;
    sys.rhs(row) = -c;
  };
  // Rows 0-1: d1, d2 of the moment sum.  Rows 2-3: d1, d2 of the force sum.
  for (int k = 0; k < 2; ++k) {
    fill_row(k, SMu.row(k), SMv.row(k), SMs(k), SMb(k), SMc(k));
    fill_row(2 + k, SNu.row(k), SNv.row(k), SNs(k), SNb(k), SNc(k));
  }
  // Rows 4-5: per-tube d3 moment balances.  Rows 6-7: per-tube d3 force balances.
  fill_row(4, M1u.row(2), M1v.row(2), 0.0, 0.0, cM1(2));
  fill_row(5, M2u.row(2), M2v.row(2), M2s(2), M2b(2), cM2(2));
  fill_row(6, N1u.row(2), N1v.row(2), 0.0, 0.0, cN1(2));
  fill_row(7, N2u.row(2), N2v.row(2), N2s(2), N2b(2), cN2(2));
  return sys;
}

struct CoupledDerivative {
  Vec3 u1_dot, v1_dot;
  double u_d3_2_dot = 0.0, beta_dot = 0.0, theta_dot = 0.0;
  Tube2Strains tube2;
  Vec3 n1_dot, m1_dot, n2_dot, m2_dot;
};

inline CoupledDerivative coupled_derivative(const OverlapState& st, const CrossSection& sec1,
                                            const CrossSection& sec2,
                                            std::span<const TendonRoute> tube1_routes,
                                            std::span<const TendonRoute> tube2_routes,
                                            double s = 0.0) {
  const CoupledSystem sys = assemble_coupled_system(st, sec1, sec2, tube1_routes, tube2_routes);
  Eigen::PartialPivLU<Mat8> lu(sys.lhs);
  detail::check_conditioning(lu, s, "coupled 8x8");
  const Vec8 x = lu.solve(sys.rhs);
  if (!x.allFinite()) throw IntegrationError("non-finite coupled derivative", s);

  CoupledDerivative d;
  d.u1_dot = x.segment<3>(0);
  d.v1_dot = x.segment<3>(3);
  d.u_d3_2_dot = x(6);
  d.beta_dot = x(7);
  d.theta_dot = st.theta_dot();
  d.tube2 = reconstruct_tube2_strains(st.u1, st.v1, st.theta, d.theta_dot, st.beta, d.beta_dot,
                                      d.u1_dot, d.v1_dot, d.u_d3_2_dot);
  d.n1_dot = sec1.K_se * d.v1_dot;
  d.m1_dot = sec1.K_bt * d.u1_dot;
  d.n2_dot = sec2.K_se * d.tube2.v2_dot;
  d.m2_dot = sec2.K_bt * d.tube2.u2_dot;
  return d;
}

struct RodDerivative {
  Vec3 u_dot, v_dot, n_dot, m_dot;
};

// Classical single-rod closure: equilibrium with the constitutive law and
// tendon loads solved for (u_dot, v_dot).
inline RodDerivative single_rod_derivative(const Vec3& u, const Vec3& v, const CrossSection& sec,
                                           std::span<const TendonRoute> routes, double s = 0.0) {
  const Vec3 n = sec.K_se * (v - kRefV);
  const Vec3 m = sec.K_bt * u;
  const TendonSystemTerms T = tendon_system_terms(routes, u, v);

  Eigen::Matrix<double, 6, 6> L;
  L.block<3, 3>(0, 0) = sec.K_bt + T.P;
  L.block<3, 3>(0, 3) = -T.Q;
  L.block<3, 3>(3, 0) = -T.D;
  L.block<3, 3>(3, 3) = sec.K_se + T.S;
  Eigen::Matrix<double, 6, 1> r;
  r.segment<3>(0) = -(u.cross(m) + v.cross(n) + T.h);
  r.segment<3>(3) = -(u.cross(n) + T.g);

  Eigen::PartialPivLU<Eigen::Matrix<double, 6, 6>> lu(L);
  detail::check_conditioning(lu, s, "single-rod 6x6");
  const Eigen::Matrix<double, 6, 1> x = lu.solve(r);
  if (!x.allFinite()) throw IntegrationError("non-finite single-rod derivative", s);

  RodDerivative d;
  d.u_dot = x.segment<3>(0);
  d.v_dot = x.segment<3>(3);
  d.n_dot = sec.K_se * d.v_dot;
  d.m_dot = sec.K_bt * d.u_dot;
  return d;
}

// ---------------------------------------------------------------------------
// Full-robot assembly and integration.

struct ModelConfig {
  CrossSection outer;
  CrossSection inner;
  std::vector<TendonRoute> outer_routes; // terminate at l1
  std::vector<TendonRoute> inner_routes; // terminate at l2
  double l1 = 0.0;
  double l2 = 0.0;
  bool outer_present = true;
  double theta0 = 0.0;
  Mat3 R0 = Mat3::Identity();
  Vec3 P0 = Vec3::Zero();
  int overlap_steps = 200;
  int distal_steps = 200;
};

struct BackboneSample {
  double s = 0.0;
  Vec3 P;
  Mat3 R1, R2;
  Vec3 u1, v1, u2, v2;
  double theta = 0.0, beta = 1.0;
  bool overlap = false;
};

struct BackboneSolution {
  std::vector<BackboneSample> samples;
  Vec3 tip_position;
  Mat3 tip_rotation;
  // Boundary captures in the owning tube's material frame, for the shooting
  // residual and the termination transfer.
  Vec3 n1_l1 = Vec3::Zero(), m1_l1 = Vec3::Zero();     // tube 1 at l1-
  Vec3 F1_tip = Vec3::Zero(), M1_tip = Vec3::Zero();   // outer tendon point loads at l1
  Vec3 n2_tip = Vec3::Zero(), m2_tip = Vec3::Zero();   // tube 2 at l2-
  Vec3 F2_tip = Vec3::Zero(), M2_tip = Vec3::Zero();   // inner tendon point loads at l2
};

struct ShootingUnknowns {
  Vec3 u1_0 = Vec3::Zero();      // inner-only mode: tube-2 base strains
  Vec3 v1_0 = kRefV;
  double u_d3_2_0 = 0.0;
  double beta_0 = 1.0;

  static ShootingUnknowns trivial() { return {}; }
};

// Spec'd dispatch helper: which regime governs at arc length s.
enum class SegmentKind { coupled, distal };
inline SegmentKind segment_at(double s, const ModelConfig& cfg) {
  return (cfg.outer_present && s < cfg.l1) ? SegmentKind::coupled : SegmentKind::distal;
}

// Integrates the full backbone from base strains. theta and beta are frozen at
// their l1 values on the distal segment, where the coupling is inapplicable.
inline BackboneSolution integrate_backbone(const ModelConfig& cfg, const ShootingUnknowns& unk) {
  BackboneSolution sol;
  using Vec12 = Eigen::Matrix<double, 12, 1>;
  using Vec9 = Eigen::Matrix<double, 9, 1>;

  Vec3 P = cfg.P0;
  Mat3 R2 = cfg.R0; // distal-segment frame (tube 2)
  Vec3 u2, v2;
  double theta = cfg.theta0, beta = unk.beta_0;

  if (cfg.outer_present) {
    // Overlap segment [0, l1].
    Vec12 w;
    w.segment<3>(0) = cfg.P0;
    w.segment<3>(3) = unk.u1_0;
    w.segment<3>(6) = unk.v1_0;
    w(9) = unk.u_d3_2_0;
    w(10) = unk.beta_0;
    w(11) = cfg.theta0;
    Mat3 R1 = cfg.R0;

    auto deriv = [&cfg](double s, const Mat3&, const Vec12& y, Vec12& ydot, Vec3& frame_u) {
      OverlapState st;
      st.u1 = y.segment<3>(3);
      st.v1 = y.segment<3>(6);
      st.u_d3_2 = y(9);
      st.beta = y(10);
      st.theta = y(11);
      const CoupledDerivative d =
          coupled_derivative(st, cfg.outer, cfg.inner, cfg.outer_routes, cfg.inner_routes, s);
      ydot.segment<3>(0) = Vec3::Zero(); // P handled below with the live frame
      ydot.segment<3>(3) = d.u1_dot;
      ydot.segment<3>(6) = d.v1_dot;
      ydot(9) = d.u_d3_2_dot;
      ydot(10) = d.beta_dot;
      ydot(11) = d.theta_dot;
      frame_u = st.u1;
    };
    // P must see the stage-rotated frame, so wrap the callback.
    auto deriv_full = [&deriv](double s, const Mat3& R, const Vec12& y, Vec12& ydot,
                               Vec3& frame_u) {
      deriv(s, R, y, ydot, frame_u);
      ydot.segment<3>(0) = R * y.segment<3>(6);
    };

    const double h = cfg.l1 / cfg.overlap_steps;
    auto record = [&](double s) {
      BackboneSample smp;
      smp.s = s;
      smp.P = w.segment<3>(0);
      smp.R1 = R1;
      smp.theta = w(11);
      smp.beta = w(10);
      smp.R2 = R1 * rot_d3(smp.theta);
      smp.u1 = w.segment<3>(3);
      smp.v1 = w.segment<3>(6);
      const double theta_dot = w(9) - smp.u1.z();
      smp.u2 = rot_d3(smp.theta).transpose() * smp.u1 + theta_dot * kE3;
      smp.v2 = smp.beta * (rot_d3(smp.theta).transpose() * smp.v1);
      smp.overlap = true;
      sol.samples.push_back(smp);
    };
    record(0.0);
    for (int i = 0; i < cfg.overlap_steps; ++i) {
      rkmk4_step(deriv_full, i * h, h, R1, w);
      record((i + 1) * h);
    }

    // Termination transfer at l1: tube 1 ends; its tendon applies point loads,
    // and the inter-tube contact reaction carries the d1,d2 remainder of
    // tube 1's internal loads into tube 2.
    const Vec3 u1 = w.segment<3>(3);
    const Vec3 v1 = w.segment<3>(6);
    theta = w(11);
    beta = w(10);
    const double theta_dot = w(9) - u1.z();
    const Mat3 Rt = rot_d3(theta).transpose();
    const Vec3 u2_minus = Rt * u1 + theta_dot * kE3;
    const Vec3 v2_minus = beta * (Rt * v1);

    sol.n1_l1 = cfg.outer.K_se * (v1 - kRefV);
    sol.m1_l1 = cfg.outer.K_bt * u1;
    Vec3 F1 = Vec3::Zero(), M1 = Vec3::Zero();
    for (const TendonRoute& route : cfg.outer_routes) {
      const Vec3 p_dot = u1.cross(route.arm_offset) + v1;
      const auto [F, M] = terminal_wrench(route, p_dot);
      F1 += F;
      M1 += M;
    }
    sol.F1_tip = F1;
    sol.M1_tip = M1;

    const Vec3 n2_minus = cfg.inner.K_se * (v2_minus - kRefV);
    const Vec3 m2_minus = cfg.inner.K_bt * u2_minus;
    // Total internal load transfer across l1, expressed in the tube-2 frame:
    // n2(l1+) = Rt*(n1 - F1) + n2(l1-), and likewise for moments.
    const Vec3 n2_plus = Rt * (sol.n1_l1 - F1) + n2_minus;
    const Vec3 m2_plus = Rt * (sol.m1_l1 - M1) + m2_minus;
    v2 = cfg.inner.K_se.inverse() * n2_plus + kRefV;
    u2 = cfg.inner.K_bt.inverse() * m2_plus;

    P = w.segment<3>(0);
    R2 = R1 * rot_d3(theta);
  } else {
    u2 = unk.u1_0;
    v2 = unk.v1_0;
    theta = cfg.theta0;
    beta = 1.0;
  }

  // Distal segment: tube 2 alone on [l1, l2] (or [0, l2] without the outer).
  const double s0 = cfg.outer_present ? cfg.l1 : 0.0;
  Vec9 w;
  w.segment<3>(0) = P;
  w.segment<3>(3) = u2;
  w.segment<3>(6) = v2;

  auto deriv = [&cfg](double s, const Mat3& R, const Vec9& y, Vec9& ydot, Vec3& frame_u) {
    const Vec3 u = y.segment<3>(3);
    const Vec3 v = y.segment<3>(6);
    const RodDerivative d = single_rod_derivative(u, v, cfg.inner, cfg.inner_routes, s);
    ydot.segment<3>(0) = R * v;
    ydot.segment<3>(3) = d.u_dot;
    ydot.segment<3>(6) = d.v_dot;
    frame_u = u;
  };

  auto record = [&](double s) {
    BackboneSample smp;
    smp.s = s;
    smp.P = w.segment<3>(0);
    smp.R1 = R2; // no tube 1 here; mirror the tube-2 frame
    smp.R2 = R2;
    smp.u1 = Vec3::Zero();
    smp.v1 = Vec3::Zero();
    smp.u2 = w.segment<3>(3);
    smp.v2 = w.segment<3>(6);
    smp.theta = theta;
    smp.beta = beta;
    smp.overlap = false;
    sol.samples.push_back(smp);
  };
  record(s0);
  const double h = (cfg.l2 - s0) / cfg.distal_steps;
  for (int i = 0; i < cfg.distal_steps; ++i) {
    rkmk4_step(deriv, s0 + i * h, h, R2, w);
    record(s0 + (i + 1) * h);
  }

  const Vec3 u_tip = w.segment<3>(3);
  const Vec3 v_tip = w.segment<3>(6);
  sol.n2_tip = cfg.inner.K_se * (v_tip - kRefV);
  sol.m2_tip = cfg.inner.K_bt * u_tip;
  Vec3 F2 = Vec3::Zero(), M2 = Vec3::Zero();
  for (const TendonRoute& route : cfg.inner_routes) {
    const Vec3 p_dot = u_tip.cross(route.arm_offset) + v_tip;
    const auto [F, M] = terminal_wrench(route, p_dot);
    F2 += F;
    M2 += M;
  }
  sol.F2_tip = F2;
  sol.M2_tip = M2;
  sol.tip_position = w.segment<3>(0);
  sol.tip_rotation = R2;
  return sol;
}

}  // namespace tacter
