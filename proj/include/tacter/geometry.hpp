#pragma once

// Cross-section properties of the two robots. Internal units are mm, N, MPa
// throughout, so E*I comes out in N*mm^2 directly.

#include <cmath>
#include <optional>

#include "tacter/common.hpp"

namespace tacter {

struct OuterTubeSpec {
  double notch_depth = 0.0;     // d, mm
  double notch_spacing = 0.0;   // h, mm
  double notch_width = 0.0;     // s_w, mm
  double outer_radius = 0.0;    // r_o1, mm
  double inner_radius = 0.0;    // r_i1, mm
  double tendon_radius = 0.0;   // r_tendon1, mm
  double elastic_modulus = 0.0; // E, MPa
  double shear_modulus = 0.0;   // G, MPa

  // Full design-document invariants; stricter than what the individual
  // geometry routines need, so it is applied at config ingestion.
  void validate() const {
    if (!(inner_radius > 0.0) || !(inner_radius < outer_radius))
      throw GeometryError("outer tube: require 0 < r_i1 < r_o1");
    if (!(notch_depth > outer_radius) || !(notch_depth < 2.0 * outer_radius))
      throw GeometryError("outer tube: require r_o1 < d < 2*r_o1");
    if (!(notch_spacing > 0.0) || !(notch_width > 0.0) || !(tendon_radius > 0.0))
      throw GeometryError("outer tube: all lengths must be positive");
    if (!(elastic_modulus > 0.0) || !(shear_modulus > 0.0))
      throw GeometryError("outer tube: moduli must be positive");
  }
};

struct InnerRobotSpec {
  double spine_rod_radius = 0.0;  // r_rod, mm
  double outer_radius = 0.0;      // r_o2, mm
  double inner_radius = 0.0;      // r_i2, mm
  double tendon_radius = 0.0;     // r_tendon2, mm
  double tendon_moment_arm = 0.0; // r_arm2, mm
  double elastic_modulus = 0.0;   // E, MPa
  double shear_modulus = 0.0;     // G, MPa

  void validate() const {
    if (!(spine_rod_radius > 0.0))
      throw GeometryError("inner robot: require r_rod > 0");
    if (!(inner_radius > 0.0) || !(inner_radius < outer_radius))
      throw GeometryError("inner robot: require 0 < r_i2 < r_o2");
    if (!(tendon_moment_arm > 0.0))
      throw GeometryError("inner robot: require r_arm2 > 0");
    if (!(elastic_modulus > 0.0) || !(shear_modulus > 0.0))
      throw GeometryError("inner robot: moduli must be positive");
  }
};

// Derived stiffness and geometry of one tube.
struct CrossSection {
  double area = 0.0;                // A, mm^2
  double second_moment_d1 = 0.0;    // I_d1, mm^4
  double second_moment_d2 = 0.0;    // I_d2, mm^4
  double polar_moment = 0.0;        // J, mm^4
  double neutral_axis_offset = 0.0; // d_na, mm (0 for the inner robot)
  double tendon_arm = 0.0;          // r_arm, mm
  Mat3 K_se = Mat3::Zero();         // diag(GA, GA, EA), N
  Mat3 K_bt = Mat3::Zero();         // diag(EI_d1, EI_d2, GJ), N*mm^2
};

struct SegmentAreas {
  double A_out = 0.0; // mm^2
  double A_in = 0.0;  // mm^2
  double A1 = 0.0;    // mm^2, retained bending-member area
  double phi_o = 0.0; // rad
  double phi_i = 0.0; // rad
};

// Retained cross-section of the notched tube: difference of two circular
// segments cut by the chord at distance (d - r_o1) from the centerline.
inline SegmentAreas outer_segment_areas(const OuterTubeSpec& spec) {
  const double c = spec.notch_depth - spec.outer_radius;
  const double ao = c / spec.outer_radius;
  const double ai = c / spec.inner_radius;
  if (std::abs(ao) > 1.0 || std::abs(ai) > 1.0)
    throw GeometryError("notch depth incompatible with radii: acos argument outside [-1, 1]");
  SegmentAreas out;
  out.phi_o = 2.0 * std::acos(ao);
  out.phi_i = 2.0 * std::acos(ai);
  out.A_out = 0.5 * spec.outer_radius * spec.outer_radius * (out.phi_o - std::sin(out.phi_o));
  out.A_in = 0.5 * spec.inner_radius * spec.inner_radius * (out.phi_i - std::sin(out.phi_i));
  out.A1 = out.A_out - out.A_in;
  if (!(out.A1 > 0.0))
    throw GeometryError("notched cross-section has non-positive area");
  return out;
}

// Distance from the tube centerline to the neutral axis, via the two segment
// centroids weighted by their areas.
inline double outer_neutral_axis(const OuterTubeSpec& spec) {
  const SegmentAreas seg = outer_segment_areas(spec);
  const double wo = seg.phi_o - std::sin(seg.phi_o);
  const double wi = seg.phi_i - std::sin(seg.phi_i);
  constexpr double kSliver = 1e-12;
  if (wo < kSliver || wi < kSliver)
    throw GeometryError("degenerate sliver segment: phi - sin(phi) underflows");
  const double so = std::sin(0.5 * seg.phi_o);
  const double si = std::sin(0.5 * seg.phi_i);
  const double c_out = 4.0 * spec.outer_radius * so * so * so / (3.0 * wo);
  const double c_in = 4.0 * spec.inner_radius * si * si * si / (3.0 * wi);
  const double d_na = (seg.A_out * c_out - seg.A_in * c_in) / seg.A1;
  if (!std::isfinite(d_na))
    throw GeometryError("neutral axis offset is not finite");
  return d_na;
}

struct OuterMoments {
  double I_na = 0.0; // segment second moment about the centerline axis, mm^4
  double I1 = 0.0;   // about the neutral (centroidal) axis, mm^4
};

inline OuterMoments outer_second_moment(const OuterTubeSpec& spec) {
  const SegmentAreas seg = outer_segment_areas(spec);
  const double d_na = outer_neutral_axis(spec);
  auto segment_moment = [](double r, double phi) {
    const double sh = std::sin(0.5 * phi);
    return r * r * r * r / 8.0 * (phi - std::sin(phi) + 2.0 * std::sin(phi) * sh * sh);
  };
  OuterMoments out;
  out.I_na = segment_moment(spec.outer_radius, seg.phi_o) -
             segment_moment(spec.inner_radius, seg.phi_i);
  out.I1 = out.I_na - seg.A1 * d_na * d_na;
  if (!(out.I1 > 0.0))
    throw GeometryError("inconsistent geometry: non-positive second moment about the neutral axis");
  return out;
}

inline double outer_moment_arm(const OuterTubeSpec& spec, double d_na) {
  return d_na + spec.inner_radius - spec.tendon_radius;
}

inline void build_stiffness(double A, double I_d1, double I_d2, double J, double E, double G,
                            Mat3& K_se, Mat3& K_bt) {
  if (!(A > 0.0 && I_d1 > 0.0 && I_d2 > 0.0 && J > 0.0 && E > 0.0 && G > 0.0))
    throw GeometryError("stiffness inputs must all be positive");
  K_se = Vec3(G * A, G * A, E * A).asDiagonal();
  K_bt = Vec3(E * I_d1, E * I_d2, G * J).asDiagonal();
}

// All derived properties of the notched outer tube. Isotropic bending
// (I_d1 = I_d2 = I1) and J = I_d1 + I_d2; in-plane experiments are
// insensitive to the torsional constant.
// moment_arm_override: use the documented arm instead of d_na + r_i1 - r_tendon1.
inline CrossSection outer_section(const OuterTubeSpec& spec,
                                  std::optional<double> moment_arm_override = std::nullopt) {
  const SegmentAreas seg = outer_segment_areas(spec);
  const double d_na = outer_neutral_axis(spec);
  const OuterMoments mom = outer_second_moment(spec);
  CrossSection cs;
  cs.area = seg.A1;
  cs.second_moment_d1 = mom.I1;
  cs.second_moment_d2 = mom.I1;
  cs.polar_moment = 2.0 * mom.I1;
  cs.neutral_axis_offset = d_na;
  cs.tendon_arm = moment_arm_override ? *moment_arm_override : outer_moment_arm(spec, d_na);
  build_stiffness(cs.area, cs.second_moment_d1, cs.second_moment_d2, cs.polar_moment,
                  spec.elastic_modulus, spec.shear_modulus, cs.K_se, cs.K_bt);
  return cs;
}

// The inner robot bends about its two nitinol spine rods; only their
// cross-section enters the constitutive law.
inline CrossSection inner_section(const InnerRobotSpec& spec) {
  if (!(spec.spine_rod_radius > 0.0))
    throw GeometryError("inner robot: zero spine rod radius gives zero stiffness");
  const double r = spec.spine_rod_radius;
  CrossSection cs;
  cs.area = 2.0 * M_PI * r * r;
  cs.second_moment_d1 = 0.5 * M_PI * r * r * r * r;
  cs.second_moment_d2 = cs.second_moment_d1;
  cs.polar_moment = cs.second_moment_d1 + cs.second_moment_d2;
  cs.neutral_axis_offset = 0.0;
  cs.tendon_arm = spec.tendon_moment_arm;
  build_stiffness(cs.area, cs.second_moment_d1, cs.second_moment_d2, cs.polar_moment,
                  spec.elastic_modulus, spec.shear_modulus, cs.K_se, cs.K_bt);
  return cs;
}

}  // namespace tacter
