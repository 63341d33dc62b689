#pragma once

// Robot parameterization, the experiment configuration taxonomy, and the
// pushing-unit force-sensor conversion.
//
// Parameter documents are JSON with explicit unit suffixes on every key and a
// versioned schema field; unknown keys are rejected. Moduli are given in GPa
// and converted to the internal MPa at ingestion.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacter/common.hpp"
#include "tacter/coupled.hpp"
#include "tacter/geometry.hpp"

namespace tacter {

using json = nlohmann::ordered_json;

struct LengthParams {
  double outer_length = 0.0;       // l1, mm
  double distal_tip = 0.0;         // constant distal length beyond the translation, mm
  double translation_range = 0.0;  // mm
  double inner_only_length = 0.0;  // single-rod length for the inner-only configuration, mm
};

struct ActuationParams {
  double outer_bent_tension = 0.0;            // N, tension held for OB configurations
  double inner_max_tension = 0.0;             // N, top of the 15-step ramp
  std::array<double, 3> translations_os{};    // mm, IN/IH/IF with the outer straight
  std::array<double, 3> translations_ob{};    // mm, IN/IH/IF with the outer bent
};

struct LayoutParams {
  // Sign convention tying the L/R actuation labels to the d2 director; the
  // mapping is configuration, not a hardcoded truth.
  int outer_tendon_d2_sign = -1;
  int inner_left_d2_sign = 1;
};

struct RobotParams {
  OuterTubeSpec outer;
  InnerRobotSpec inner;
  std::optional<double> outer_moment_arm_override; // mm, Table-value alternative to the formula
  LengthParams lengths;
  ActuationParams actuation;
  LayoutParams layout;

  double l2_max() const {
    return lengths.outer_length + lengths.translation_range + lengths.distal_tip;
  }

  void validate() const {
    outer.validate();
    inner.validate();
    if (!(lengths.outer_length > 0.0))
      throw ConfigError("lengths.outer_length_mm must be > 0");
    if (!(lengths.distal_tip > 0.0))
      throw ConfigError("lengths.distal_tip_mm must be > 0");
    if (!(lengths.translation_range >= 0.0))
      throw ConfigError("lengths.translation_range_mm must be >= 0");
    if (!(lengths.inner_only_length > 0.0))
      throw ConfigError("lengths.inner_only_length_mm must be > 0");
    if (!(actuation.outer_bent_tension >= 0.0) || !(actuation.inner_max_tension > 0.0))
      throw ConfigError("actuation tensions must be non-negative (inner max > 0)");
    if (std::abs(layout.outer_tendon_d2_sign) != 1 || std::abs(layout.inner_left_d2_sign) != 1)
      throw ConfigError("layout signs must be +1 or -1");
  }
};

struct ActuationInput {
  double lambda_outer = 0.0;       // N
  double lambda_inner_left = 0.0;  // N
  double lambda_inner_right = 0.0; // N
  double inner_translation = 0.0;  // mm; l2 = l1 + translation + distal_tip
  double theta0 = 0.0;             // rad
  Mat3 R0 = Mat3::Identity();
  Vec3 P0 = Vec3::Zero();
  bool outer_present = true;

  void validate(const RobotParams& params) const {
    if (lambda_outer < 0.0 || lambda_inner_left < 0.0 || lambda_inner_right < 0.0)
      throw ConfigError("tendon tensions must be >= 0");
    if (inner_translation < 0.0 || inner_translation > params.lengths.translation_range + 1e-9)
      throw ConfigError("inner translation outside the configured range");
    if ((R0 * R0.transpose() - Mat3::Identity()).norm() > 1e-9 || std::abs(R0.determinant() - 1.0) > 1e-9)
      throw ConfigError("base frame R0 is not a rotation");
  }
};

// --- configuration taxonomy -------------------------------------------------

enum class OuterState { straight, bent };
enum class InnerTranslationState { sheathed, half, full };
enum class Side { left, right };

struct ConfigurationLabel {
  bool inner_only = false;
  OuterState outer_state = OuterState::straight;
  InnerTranslationState translation = InnerTranslationState::sheathed;
  Side side = Side::left;

  bool operator==(const ConfigurationLabel& o) const {
    if (inner_only != o.inner_only) return false;
    if (inner_only) return side == o.side;
    return outer_state == o.outer_state && translation == o.translation && side == o.side;
  }
};

inline std::string to_string(const ConfigurationLabel& l) {
  if (l.inner_only) return "IO";
  std::string s = (l.outer_state == OuterState::straight) ? "OS-" : "OB-";
  switch (l.translation) {
    case InnerTranslationState::sheathed: s += "IN-"; break;
    case InnerTranslationState::half: s += "IH-"; break;
    case InnerTranslationState::full: s += "IF-"; break;
  }
  s += (l.side == Side::left) ? "L" : "R";
  return s;
}

inline ConfigurationLabel parse_label(const std::string& s) {
  if (s == "IO") return ConfigurationLabel{.inner_only = true};
  ConfigurationLabel l;
  if (s.size() != 7 || s[2] != '-' || s[5] != '-')
    throw ConfigError("unrecognized configuration label: " + s);
  const std::string a = s.substr(0, 2), b = s.substr(3, 2);
  if (a == "OS") l.outer_state = OuterState::straight;
  else if (a == "OB") l.outer_state = OuterState::bent;
  else throw ConfigError("unrecognized configuration label: " + s);
  if (b == "IN") l.translation = InnerTranslationState::sheathed;
  else if (b == "IH") l.translation = InnerTranslationState::half;
  else if (b == "IF") l.translation = InnerTranslationState::full;
  else throw ConfigError("unrecognized configuration label: " + s);
  if (s[6] == 'L') l.side = Side::left;
  else if (s[6] == 'R') l.side = Side::right;
  else throw ConfigError("unrecognized configuration label: " + s);
  return l;
}

// The thirteen tested configurations: {OS,OB} x {IN,IH,IF} x {L,R} plus the
// inner robot on its own.
inline std::vector<ConfigurationLabel> all_configuration_labels() {
  std::vector<ConfigurationLabel> out;
  for (OuterState os : {OuterState::straight, OuterState::bent})
    for (InnerTranslationState tr : {InnerTranslationState::sheathed, InnerTranslationState::half,
                                     InnerTranslationState::full})
      for (Side sd : {Side::left, Side::right})
        out.push_back({false, os, tr, sd});
  out.push_back(ConfigurationLabel{.inner_only = true});
  return out;
}

inline ActuationInput configuration_to_input(const ConfigurationLabel& label,
                                             const RobotParams& params, double lambda) {
  ActuationInput in;
  if (label.inner_only) {
    in.outer_present = false;
    in.inner_translation = 0.0;
  } else {
    const auto& tr = (label.outer_state == OuterState::bent) ? params.actuation.translations_ob
                                                             : params.actuation.translations_os;
    in.inner_translation = tr[static_cast<int>(label.translation)];
    in.lambda_outer =
        (label.outer_state == OuterState::bent) ? params.actuation.outer_bent_tension : 0.0;
  }
  if (label.side == Side::left)
    in.lambda_inner_left = lambda;
  else
    in.lambda_inner_right = lambda;
  return in;
}

// --- model assembly ---------------------------------------------------------

inline ModelConfig make_model(const RobotParams& params, const ActuationInput& input,
                              int overlap_steps = 200, int distal_steps = 200) {
  params.validate();
  input.validate(params);
  ModelConfig cfg;
  cfg.outer = outer_section(params.outer, params.outer_moment_arm_override);
  cfg.inner = inner_section(params.inner);
  cfg.outer_present = input.outer_present;
  cfg.l1 = input.outer_present ? params.lengths.outer_length : 0.0;
  cfg.l2 = input.outer_present
               ? params.lengths.outer_length + input.inner_translation + params.lengths.distal_tip
               : params.lengths.inner_only_length;
  cfg.theta0 = input.theta0;
  cfg.R0 = input.R0;
  cfg.P0 = input.P0;
  cfg.overlap_steps = overlap_steps;
  cfg.distal_steps = distal_steps;

  if (input.outer_present) {
    TendonRoute outer_tendon;
    outer_tendon.arm_offset =
        Vec3(0.0, params.layout.outer_tendon_d2_sign * cfg.outer.tendon_arm, 0.0);
    outer_tendon.tension = input.lambda_outer;
    outer_tendon.owner = TendonOwner::outer;
    outer_tendon.termination_s = cfg.l1;
    cfg.outer_routes.push_back(outer_tendon);
  }
  TendonRoute left, right;
  left.arm_offset = Vec3(0.0, params.layout.inner_left_d2_sign * cfg.inner.tendon_arm, 0.0);
  left.tension = input.lambda_inner_left;
  left.owner = TendonOwner::inner;
  left.termination_s = cfg.l2;
  right = left;
  right.arm_offset = -left.arm_offset;
  right.tension = input.lambda_inner_right;
  cfg.inner_routes.push_back(left);
  cfg.inner_routes.push_back(right);
  return cfg;
}

// --- force sensor -----------------------------------------------------------

// Tendon tension from the pushing-unit force: T = F_B / (2 sin(2 gamma)).
inline double tension_from_sensor(double F_B, double gamma) {
  const double s = std::sin(2.0 * gamma);
  if (std::abs(s) < 1e-12)
    throw ConfigError("undefined tendon routing: sin(2*gamma) = 0");
  return F_B / (2.0 * s);
}

// --- parameter document I/O -------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key '" + path + it.key() + "'");
  }
}

inline double require_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError("missing field '" + path + key + "'");
  if (!j.at(key).is_number()) throw ConfigError("field '" + path + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline RobotParams params_from_json(const json& j) {
  using detail::reject_unknown_keys;
  using detail::require_number;
  reject_unknown_keys(j, {"schema_version", "outer", "inner", "lengths", "actuation", "layout"},
                      "");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
    throw ConfigError("parameter document must declare schema_version 1");
  RobotParams p;
  {
    if (!j.contains("outer")) throw ConfigError("missing section 'outer'");
    const json& o = j.at("outer");
    reject_unknown_keys(o,
                        {"notch_depth_mm", "notch_spacing_mm", "notch_width_mm", "outer_radius_mm",
                         "inner_radius_mm", "tendon_radius_mm", "elastic_modulus_gpa",
                         "shear_modulus_gpa", "moment_arm_override_mm"},
                        "outer.");
    p.outer.notch_depth = require_number(o, "notch_depth_mm", "outer.");
    p.outer.notch_spacing = require_number(o, "notch_spacing_mm", "outer.");
    p.outer.notch_width = require_number(o, "notch_width_mm", "outer.");
    p.outer.outer_radius = require_number(o, "outer_radius_mm", "outer.");
    p.outer.inner_radius = require_number(o, "inner_radius_mm", "outer.");
    p.outer.tendon_radius = require_number(o, "tendon_radius_mm", "outer.");
    p.outer.elastic_modulus = 1000.0 * require_number(o, "elastic_modulus_gpa", "outer.");
    p.outer.shear_modulus = 1000.0 * require_number(o, "shear_modulus_gpa", "outer.");
    if (o.contains("moment_arm_override_mm") && !o.at("moment_arm_override_mm").is_null())
      p.outer_moment_arm_override = o.at("moment_arm_override_mm").get<double>();
  }
  {
    if (!j.contains("inner")) throw ConfigError("missing section 'inner'");
    const json& i = j.at("inner");
    reject_unknown_keys(i,
                        {"spine_rod_radius_mm", "outer_radius_mm", "inner_radius_mm",
                         "tendon_radius_mm", "tendon_moment_arm_mm", "elastic_modulus_gpa",
                         "shear_modulus_gpa"},
                        "inner.");
    p.inner.spine_rod_radius = require_number(i, "spine_rod_radius_mm", "inner.");
    p.inner.outer_radius = require_number(i, "outer_radius_mm", "inner.");
    p.inner.inner_radius = require_number(i, "inner_radius_mm", "inner.");
    p.inner.tendon_radius = require_number(i, "tendon_radius_mm", "inner.");
    p.inner.tendon_moment_arm = require_number(i, "tendon_moment_arm_mm", "inner.");
    p.inner.elastic_modulus = 1000.0 * require_number(i, "elastic_modulus_gpa", "inner.");
    p.inner.shear_modulus = 1000.0 * require_number(i, "shear_modulus_gpa", "inner.");
  }
  {
    if (!j.contains("lengths")) throw ConfigError("missing section 'lengths'");
    const json& l = j.at("lengths");
    reject_unknown_keys(
        l, {"outer_length_mm", "distal_tip_mm", "translation_range_mm", "inner_only_length_mm"},
        "lengths.");
    p.lengths.outer_length = require_number(l, "outer_length_mm", "lengths.");
    p.lengths.distal_tip = require_number(l, "distal_tip_mm", "lengths.");
    p.lengths.translation_range = require_number(l, "translation_range_mm", "lengths.");
    p.lengths.inner_only_length = require_number(l, "inner_only_length_mm", "lengths.");
  }
  {
    if (!j.contains("actuation")) throw ConfigError("missing section 'actuation'");
    const json& a = j.at("actuation");
    reject_unknown_keys(a,
                        {"outer_bent_tension_n", "inner_max_tension_n", "translations_os_mm",
                         "translations_ob_mm"},
                        "actuation.");
    p.actuation.outer_bent_tension = require_number(a, "outer_bent_tension_n", "actuation.");
    p.actuation.inner_max_tension = require_number(a, "inner_max_tension_n", "actuation.");
    auto read3 = [&a](const char* key) {
      if (!a.contains(key) || !a.at(key).is_array() || a.at(key).size() != 3)
        throw ConfigError(std::string("actuation.") + key + " must be an array of 3 numbers");
      std::array<double, 3> out{};
      for (int i = 0; i < 3; ++i) out[i] = a.at(key).at(i).get<double>();
      return out;
    };
    p.actuation.translations_os = read3("translations_os_mm");
    p.actuation.translations_ob = read3("translations_ob_mm");
  }
  if (j.contains("layout")) {
    const json& l = j.at("layout");
    reject_unknown_keys(l, {"outer_tendon_d2_sign", "inner_left_d2_sign"}, "layout.");
    if (l.contains("outer_tendon_d2_sign"))
      p.layout.outer_tendon_d2_sign = l.at("outer_tendon_d2_sign").get<int>();
    if (l.contains("inner_left_d2_sign"))
      p.layout.inner_left_d2_sign = l.at("inner_left_d2_sign").get<int>();
  }
  p.validate();
  return p;
}

inline json params_to_json(const RobotParams& p) {
  json j;
  j["schema_version"] = 1;
  j["outer"] = {{"notch_depth_mm", p.outer.notch_depth},
                {"notch_spacing_mm", p.outer.notch_spacing},
                {"notch_width_mm", p.outer.notch_width},
                {"outer_radius_mm", p.outer.outer_radius},
                {"inner_radius_mm", p.outer.inner_radius},
                {"tendon_radius_mm", p.outer.tendon_radius},
                {"elastic_modulus_gpa", p.outer.elastic_modulus / 1000.0},
                {"shear_modulus_gpa", p.outer.shear_modulus / 1000.0}};
  if (p.outer_moment_arm_override)
    j["outer"]["moment_arm_override_mm"] = *p.outer_moment_arm_override;
  j["inner"] = {{"spine_rod_radius_mm", p.inner.spine_rod_radius},
                {"outer_radius_mm", p.inner.outer_radius},
                {"inner_radius_mm", p.inner.inner_radius},
                {"tendon_radius_mm", p.inner.tendon_radius},
                {"tendon_moment_arm_mm", p.inner.tendon_moment_arm},
                {"elastic_modulus_gpa", p.inner.elastic_modulus / 1000.0},
                {"shear_modulus_gpa", p.inner.shear_modulus / 1000.0}};
  j["lengths"] = {{"outer_length_mm", p.lengths.outer_length},
                  {"distal_tip_mm", p.lengths.distal_tip},
                  {"translation_range_mm", p.lengths.translation_range},
                  {"inner_only_length_mm", p.lengths.inner_only_length}};
  j["actuation"] = {{"outer_bent_tension_n", p.actuation.outer_bent_tension},
                    {"inner_max_tension_n", p.actuation.inner_max_tension},
                    {"translations_os_mm", p.actuation.translations_os},
                    {"translations_ob_mm", p.actuation.translations_ob}};
  j["layout"] = {{"outer_tendon_d2_sign", p.layout.outer_tendon_d2_sign},
                 {"inner_left_d2_sign", p.layout.inner_left_d2_sign}};
  return j;
}

inline RobotParams load_params(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter document parse error: ") + e.what());
  }
  try {
    return params_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter document: ") + e.what());
  }
}

// The Table-1 parameterization of the physical prototype. Absolute lengths and
// the held outer-bent tension are not design-table data; the values below are
// working defaults and are meant to be overridden from a document.
inline RobotParams tacter_table1_params() {
  RobotParams p;
  p.outer = {.notch_depth = 2.93,
             .notch_spacing = 0.96,
             .notch_width = 1.96,
             .outer_radius = 1.97,
             .inner_radius = 1.60,
             .tendon_radius = 0.08,
             .elastic_modulus = 84000.0,
             .shear_modulus = 28800.0};
  p.inner = {.spine_rod_radius = 0.115,
             .outer_radius = 1.51,
             .inner_radius = 0.45,
             .tendon_radius = 0.002,
             .tendon_moment_arm = 0.725,
             .elastic_modulus = 100000.0,
             .shear_modulus = 28800.0};
  p.lengths = {.outer_length = 30.0,
               .distal_tip = 5.0,
               .translation_range = 30.36,
               .inner_only_length = 35.0};
  p.actuation = {.outer_bent_tension = 8.0,
                 .inner_max_tension = 1.5,
                 .translations_os = {0.0, 15.90, 30.22},
                 .translations_ob = {0.0, 15.28, 30.36}};
  return p;
}

}  // namespace tacter
