#include <gtest/gtest.h>

#include <cmath>

#include "tacter/config.hpp"

using namespace tacter;

TEST(Params, Table1Defaults) {
  const RobotParams p = tacter_table1_params();
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.outer.notch_depth, 2.93);
  EXPECT_DOUBLE_EQ(p.outer.outer_radius, 1.97);
  EXPECT_DOUBLE_EQ(p.outer.elastic_modulus, 84000.0);
  EXPECT_DOUBLE_EQ(p.inner.spine_rod_radius, 0.115);
  EXPECT_DOUBLE_EQ(p.inner.tendon_moment_arm, 0.725);
  EXPECT_DOUBLE_EQ(p.actuation.translations_os[1], 15.90);
  EXPECT_DOUBLE_EQ(p.actuation.translations_ob[2], 30.36);
}

TEST(Params, JsonRoundTrip) {
  RobotParams p = tacter_table1_params();
  p.outer_moment_arm_override = 3.06;
  const json j = params_to_json(p);
  const RobotParams q = params_from_json(j);
  EXPECT_EQ(params_to_json(q).dump(), j.dump());
  EXPECT_DOUBLE_EQ(q.outer.elastic_modulus, 84000.0); // GPa -> MPa round trip
  ASSERT_TRUE(q.outer_moment_arm_override.has_value());
  EXPECT_DOUBLE_EQ(*q.outer_moment_arm_override, 3.06);
}

TEST(Params, RejectsMissingField) {
  json j = params_to_json(tacter_table1_params());
  j["outer"].erase("notch_depth_mm");
  try {
    params_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("outer.notch_depth_mm"), std::string::npos);
  }
}

TEST(Params, RejectsUnknownKeyAndBadSchema) {
  json j = params_to_json(tacter_table1_params());
  j["outer"]["typo_mm"] = 1.0;
  EXPECT_THROW(params_from_json(j), ConfigError);
  json k = params_to_json(tacter_table1_params());
  k["schema_version"] = 2;
  EXPECT_THROW(params_from_json(k), ConfigError);
}

TEST(Params, RejectsNegativeRadius) {
  json j = params_to_json(tacter_table1_params());
  j["inner"]["spine_rod_radius_mm"] = -0.1;
  EXPECT_THROW(params_from_json(j), Error);
}

TEST(Params, LoadRejectsMalformedText) {
  EXPECT_THROW(load_params("{ not json"), ConfigError);
}

TEST(Labels, ThirteenConfigurations) {
  const auto labels = all_configuration_labels();
  ASSERT_EQ(labels.size(), 13u);
  int inner_only = 0;
  for (const auto& l : labels) {
    if (l.inner_only) ++inner_only;
    EXPECT_EQ(parse_label(to_string(l)), l);
  }
  EXPECT_EQ(inner_only, 1);
  // all labels distinct
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      EXPECT_FALSE(labels[i] == labels[j]) << to_string(labels[i]);
}

TEST(Labels, ParseKnownStrings) {
  const ConfigurationLabel l = parse_label("OB-IH-R");
  EXPECT_FALSE(l.inner_only);
  EXPECT_EQ(l.outer_state, OuterState::bent);
  EXPECT_EQ(l.translation, InnerTranslationState::half);
  EXPECT_EQ(l.side, Side::right);
  EXPECT_TRUE(parse_label("IO").inner_only);
  EXPECT_THROW(parse_label("OX-IN-L"), ConfigError);
  EXPECT_THROW(parse_label("OS-IN-X"), ConfigError);
  EXPECT_THROW(parse_label("nonsense"), ConfigError);
}

TEST(Labels, ConfigurationToInputMapping) {
  const RobotParams p = tacter_table1_params();
  const ActuationInput a = configuration_to_input(parse_label("OB-IF-L"), p, 1.0);
  EXPECT_DOUBLE_EQ(a.lambda_outer, p.actuation.outer_bent_tension);
  EXPECT_DOUBLE_EQ(a.inner_translation, 30.36);
  EXPECT_DOUBLE_EQ(a.lambda_inner_left, 1.0);
  EXPECT_DOUBLE_EQ(a.lambda_inner_right, 0.0);

  const ActuationInput b = configuration_to_input(parse_label("OS-IH-R"), p, 0.7);
  EXPECT_DOUBLE_EQ(b.lambda_outer, 0.0);
  EXPECT_DOUBLE_EQ(b.inner_translation, 15.90);
  EXPECT_DOUBLE_EQ(b.lambda_inner_right, 0.7);

  const ActuationInput c = configuration_to_input(parse_label("IO"), p, 0.5);
  EXPECT_FALSE(c.outer_present);
  EXPECT_DOUBLE_EQ(c.lambda_inner_left, 0.5);
}

TEST(Model, LengthsFollowTranslation) {
  const RobotParams p = tacter_table1_params();
  ActuationInput in;
  in.inner_translation = 15.90;
  const ModelConfig cfg = make_model(p, in);
  EXPECT_DOUBLE_EQ(cfg.l1, 30.0);
  EXPECT_DOUBLE_EQ(cfg.l2, 30.0 + 15.90 + 5.0);
  ASSERT_EQ(cfg.outer_routes.size(), 1u);
  ASSERT_EQ(cfg.inner_routes.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.outer_routes[0].termination_s, cfg.l1);
  EXPECT_DOUBLE_EQ(cfg.inner_routes[0].termination_s, cfg.l2);
  // default layout: outer tendon on -d2, left inner tendon on +d2
  EXPECT_LT(cfg.outer_routes[0].arm_offset.y(), 0.0);
  EXPECT_GT(cfg.inner_routes[0].arm_offset.y(), 0.0);
  EXPECT_DOUBLE_EQ(cfg.inner_routes[1].arm_offset.y(), -cfg.inner_routes[0].arm_offset.y());

  ActuationInput io;
  io.outer_present = false;
  const ModelConfig icfg = make_model(p, io);
  EXPECT_DOUBLE_EQ(icfg.l2, p.lengths.inner_only_length);
  EXPECT_FALSE(icfg.outer_present);
}

TEST(Model, RejectsOutOfRangeInput) {
  const RobotParams p = tacter_table1_params();
  ActuationInput in;
  in.inner_translation = p.lengths.translation_range + 1.0;
  EXPECT_THROW(make_model(p, in), ConfigError);
  ActuationInput neg;
  neg.lambda_inner_left = -0.5;
  EXPECT_THROW(make_model(p, neg), ConfigError);
}

TEST(Sensor, TensionConversion) {
  // T = F_B / (2 sin 2*gamma); at the routing angle 52 deg, 1 N at the sensor
  // is 0.51531 N of tendon tension.
  const double gamma = 52.0 * M_PI / 180.0;
  EXPECT_NEAR(tension_from_sensor(1.0, gamma), 0.5153068, 1e-6);
  EXPECT_NEAR(tension_from_sensor(1.0, 45.0 * M_PI / 180.0), 0.5, 1e-12);
  EXPECT_NEAR(tension_from_sensor(3.0, gamma), 3.0 * tension_from_sensor(1.0, gamma), 1e-12);
  EXPECT_THROW(tension_from_sensor(1.0, 0.0), ConfigError);
  EXPECT_THROW(tension_from_sensor(1.0, M_PI / 2.0), ConfigError);
}
