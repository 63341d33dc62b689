#pragma once

// Distributed and terminal wrenches applied by the actuation tendons, plus
// the internal-load jump at a tendon termination point.

#include <utility>
#include <vector>

#include "tacter/common.hpp"
#include "tacter/rod.hpp"

namespace tacter {

enum class TendonOwner { outer, inner };

struct TendonRoute {
  Vec3 arm_offset = Vec3::Zero(); // body-frame [x_d1, y_d2, 0], mm
  double tension = 0.0;           // lambda, N
  TendonOwner owner = TendonOwner::inner;
  double termination_s = 0.0;     // mm

  void validate() const {
    if (!(tension >= 0.0)) throw ConfigError("tendon tension must be >= 0");
    if (arm_offset.z() != 0.0) throw ConfigError("tendon offset must lie in the d1-d2 plane");
  }
};

struct DistributedWrench {
  Vec3 f = Vec3::Zero();   // N/mm
  Vec3 tau = Vec3::Zero(); // N
};

struct TendonPathDerivatives {
  Vec3 p_dot;  // body-frame tendon path tangent
  Vec3 p_ddot;
};

inline TendonPathDerivatives tendon_path_derivatives(const Vec3& u, const Vec3& v,
                                                     const Vec3& u_dot, const Vec3& v_dot,
                                                     const TendonRoute& route) {
  TendonPathDerivatives d;
  d.p_dot = u.cross(route.arm_offset) + v;
  d.p_ddot = u.cross(d.p_dot) - route.arm_offset.cross(u_dot) + v_dot;
  return d;
}

constexpr double kMinTendonSpeed = 1e-9;

inline DistributedWrench distributed_wrench(const TendonRoute& route, const Vec3& p_dot,
                                            const Vec3& p_ddot) {
  const double speed = p_dot.norm();
  if (speed <= kMinTendonSpeed)
    throw DegeneracyError("degenerate tendon path: |p_dot| ~ 0", 0.0);
  DistributedWrench w;
  const Mat3 S = skew(p_dot);
  w.f = -(route.tension / (speed * speed * speed)) * (S * S * p_ddot);
  w.tau = -route.arm_offset.cross(w.f);
  return w;
}

// Point loads exerted where the tendon terminates, in the owning tube's frame.
inline std::pair<Vec3, Vec3> terminal_wrench(const TendonRoute& route, const Vec3& p_dot_at_tip) {
  const double speed = p_dot_at_tip.norm();
  if (speed <= kMinTendonSpeed)
    throw DegeneracyError("degenerate tendon path at termination", route.termination_s);
  const Vec3 F = -(route.tension / speed) * p_dot_at_tip;
  const Vec3 M = route.arm_offset.cross(F); // = -[r_arm] * lambda * p_dot/|p_dot|
  return {F, M};
}

// n(l-) = n(l+) + F,  m(l-) = m(l+) + M.
inline std::pair<Vec3, Vec3> apply_termination_jump(const Vec3& n_after, const Vec3& m_after,
                                                    const Vec3& F_tip, const Vec3& M_tip) {
  return {n_after + F_tip, m_after + M_tip};
}

}  // namespace tacter
