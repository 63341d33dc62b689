#pragma once

// Rotation-group utilities and the geometric fixed-step integrator shared by
// the coupled and single-rod models. The frame is advanced multiplicatively
// through the exponential map (Munthe-Kaas RK4), so orthonormality is
// preserved to roundoff per step.

#include <cmath>
#include <vector>

#include "tacter/common.hpp"

namespace tacter {

inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return m;
}

// Rotation by theta about the third director.
inline Mat3 rot_d3(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

// Rodrigues formula with a series fallback near zero.
inline Mat3 exp_so3(const Vec3& psi) {
  const double t = psi.norm();
  const Mat3 S = skew(psi);
  double a, b;
  if (t < 1e-8) {
    a = 1.0 - t * t / 6.0;
    b = 0.5 - t * t / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / (t * t);
  }
  return Mat3::Identity() + a * S + b * S * S;
}

// Inverse differential of exp for the body-frame convention
// d/ds exp(psi) = exp(psi) [u], truncated to the terms needed for order 4.
inline Vec3 dexpinv(const Vec3& psi, const Vec3& u) {
  const Vec3 c = psi.cross(u);
  return u + 0.5 * c + (1.0 / 12.0) * psi.cross(c);
}

// One fourth-order step of the coupled (frame, vector) system.
// The derivative callback fills wdot and the body angular rate u driving
// Rdot = R [u]:   f(s, R, w, wdot_out, u_out)
template <class VecN, class F>
void rkmk4_step(F&& f, double s, double h, Mat3& R, VecN& w) {
  VecN k1, k2, k3, k4;
  Vec3 a1, a2, a3, a4;

  f(s, R, w, k1, a1);
  const Vec3 p2 = 0.5 * h * a1;
  f(s + 0.5 * h, R * exp_so3(p2), VecN(w + 0.5 * h * k1), k2, a2);
  const Vec3 q2 = dexpinv(p2, a2);
  const Vec3 p3 = 0.5 * h * q2;
  f(s + 0.5 * h, R * exp_so3(p3), VecN(w + 0.5 * h * k2), k3, a3);
  const Vec3 q3 = dexpinv(p3, a3);
  const Vec3 p4 = h * q3;
  f(s + h, R * exp_so3(p4), VecN(w + h * k3), k4, a4);
  const Vec3 q4 = dexpinv(p4, a4);

  w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  R = R * exp_so3((h / 6.0) * (a1 + 2.0 * q2 + 2.0 * q3 + q4));
  if (!w.allFinite() || !R.allFinite())
    throw IntegrationError("non-finite state after integration step", s);
}

// Monotone arc-length grid over [0, l2] with a mandatory breakpoint at l1.
struct ArcGrid {
  std::vector<double> s;
  std::size_t l1_index = 0;
};

inline ArcGrid make_arc_grid(double l1, double l2, int overlap_steps, int distal_steps) {
  if (!(l1 >= 0.0) || !(l2 > l1) || overlap_steps < 1 || distal_steps < 1)
    throw ConfigError("invalid arc grid request");
  ArcGrid g;
  for (int i = 0; i <= overlap_steps; ++i)
    g.s.push_back(l1 * static_cast<double>(i) / overlap_steps);
  g.l1_index = g.s.size() - 1;
  for (int i = 1; i <= distal_steps; ++i)
    g.s.push_back(l1 + (l2 - l1) * static_cast<double>(i) / distal_steps);
  return g;
}

}  // namespace tacter
