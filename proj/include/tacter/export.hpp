#pragma once

// Deterministic result export. All numeric text output is formatted with 9
// significant digits, dot decimal separator, no locale dependence, so repeated
// runs are byte-identical. Every file embeds the resolved configuration.

#include <cstdio>
#include <sstream>
#include <string>

#include "tacter/common.hpp"
#include "tacter/config.hpp"
#include "tacter/shooting.hpp"

namespace tacter {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Full resolved run description embedded in every output as provenance.
inline json resolved_run_json(const RobotParams& params, const ActuationInput& input,
                              int overlap_steps, int distal_steps, double tolerance) {
  json j;
  j["params"] = params_to_json(params);
  j["actuation"] = {{"lambda_outer_n", input.lambda_outer},
                    {"lambda_inner_left_n", input.lambda_inner_left},
                    {"lambda_inner_right_n", input.lambda_inner_right},
                    {"inner_translation_mm", input.inner_translation},
                    {"theta0_rad", input.theta0},
                    {"outer_present", input.outer_present}};
  j["discretization"] = {{"overlap_steps", overlap_steps}, {"distal_steps", distal_steps}};
  j["tolerance"] = tolerance;
  return j;
}

inline std::string backbone_to_delimited(const ShootingResult& res, const json& provenance) {
  std::ostringstream os;
  os << "# tacter-backbone v1\n";
  os << "# config: " << provenance.dump() << "\n";
  os << "# converged: " << (res.converged ? 1 : 0) << "\n";
  os << "# iterations: " << res.iterations << "\n";
  os << "# residual_norm: " << format_g9(res.residual_norm) << "\n";
  const Vec3& tip = res.backbone.tip_position;
  os << "# tip: " << format_g9(tip.x()) << " " << format_g9(tip.y()) << " " << format_g9(tip.z())
     << "\n";
  os << "s P_x P_y P_z"
        " R1_11 R1_12 R1_13 R1_21 R1_22 R1_23 R1_31 R1_32 R1_33"
        " R2_11 R2_12 R2_13 R2_21 R2_22 R2_23 R2_31 R2_32 R2_33"
        " u1_1 u1_2 u1_3 v1_1 v1_2 v1_3 u2_1 u2_2 u2_3 v2_1 v2_2 v2_3"
        " theta beta overlap\n";
  for (const BackboneSample& smp : res.backbone.samples) {
    os << format_g9(smp.s);
    auto emit3 = [&os](const Vec3& v) {
      for (int i = 0; i < 3; ++i) os << " " << format_g9(v(i));
    };
    auto emit9 = [&os](const Mat3& m) {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) os << " " << format_g9(m(r, c));
    };
    emit3(smp.P);
    emit9(smp.R1);
    emit9(smp.R2);
    emit3(smp.u1);
    emit3(smp.v1);
    emit3(smp.u2);
    emit3(smp.v2);
    os << " " << format_g9(smp.theta) << " " << format_g9(smp.beta) << " "
       << (smp.overlap ? 1 : 0) << "\n";
  }
  return os.str();
}

inline json backbone_to_json(const ShootingResult& res, const json& provenance) {
  json j;
  j["schema"] = "tacter-backbone v1";
  j["config"] = provenance;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["residual_norm"] = res.residual_norm;
  if (!res.message.empty()) j["message"] = res.message;
  const Vec3& tip = res.backbone.tip_position;
  j["tip"] = {tip.x(), tip.y(), tip.z()};
  json rows = json::array();
  for (const BackboneSample& smp : res.backbone.samples) {
    json row;
    row["s"] = smp.s;
    row["P"] = {smp.P.x(), smp.P.y(), smp.P.z()};
    auto mat = [](const Mat3& m) {
      json a = json::array();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
      return a;
    };
    row["R1"] = mat(smp.R1);
    row["R2"] = mat(smp.R2);
    row["u1"] = {smp.u1.x(), smp.u1.y(), smp.u1.z()};
    row["v1"] = {smp.v1.x(), smp.v1.y(), smp.v1.z()};
    row["u2"] = {smp.u2.x(), smp.u2.y(), smp.u2.z()};
    row["v2"] = {smp.v2.x(), smp.v2.y(), smp.v2.z()};
    row["theta"] = smp.theta;
    row["beta"] = smp.beta;
    row["overlap"] = smp.overlap;
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  return j;
}

}  // namespace tacter
