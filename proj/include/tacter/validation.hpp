#pragma once

// Experiment-sweep protocol and tip-error statistics: runs the thirteen
// configuration sweeps and compares model tip positions against externally
// measured poses, pooling left/right trials per cell.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tacter/common.hpp"
#include "tacter/config.hpp"
#include "tacter/shooting.hpp"

namespace tacter {

struct MeasuredPose {
  ConfigurationLabel configuration;
  int step_index = 0;
  Vec3 tip_position = Vec3::Zero(); // mm, offsets already applied upstream
  double tendon_tension = 0.0;      // N

  void validate() const {
    if (!tip_position.allFinite() || !std::isfinite(tendon_tension))
      throw ConfigError("measured pose contains non-finite values");
    if (step_index < 0) throw ConfigError("measured pose step index must be >= 0");
  }
};

struct LabeledResult {
  ConfigurationLabel configuration;
  int step_index = 0;
  double tendon_tension = 0.0;
  ShootingResult result;
};

struct TensionSchedule {
  ConfigurationLabel label;
  std::vector<double> tensions; // N, one solve per entry
};

// Evenly spaced ramps to the configured maximum inner tension, one schedule
// per configuration label.
inline std::vector<TensionSchedule> default_protocol_schedules(const RobotParams& params,
                                                               int steps = 15) {
  std::vector<TensionSchedule> out;
  for (const ConfigurationLabel& label : all_configuration_labels()) {
    TensionSchedule sch;
    sch.label = label;
    for (int i = 1; i <= steps; ++i)
      sch.tensions.push_back(params.actuation.inner_max_tension * i / steps);
    out.push_back(std::move(sch));
  }
  return out;
}

// Sequential warm-started solves over every schedule; per-pose failures are
// recorded in place and the run continues.
inline std::vector<LabeledResult> run_protocol(const RobotParams& params,
                                               const std::vector<TensionSchedule>& schedules,
                                               const ShootingOptions& opt = {},
                                               int overlap_steps = 200, int distal_steps = 200) {
  std::vector<LabeledResult> out;
  for (const TensionSchedule& sch : schedules) {
    std::vector<ModelConfig> configs;
    configs.reserve(sch.tensions.size());
    for (double lambda : sch.tensions)
      configs.push_back(make_model(params, configuration_to_input(sch.label, params, lambda),
                                   overlap_steps, distal_steps));
    std::vector<ShootingResult> results = sweep(configs, opt);
    for (std::size_t i = 0; i < results.size(); ++i)
      out.push_back({sch.label, static_cast<int>(i), sch.tensions[i], std::move(results[i])});
  }
  return out;
}

struct CellStats {
  double avg = 0.0;
  double max = 0.0;
  int count = 0;
};

// Table-2-shaped error summary: {OS,OB} x {IN,IH,IF} with L and R pooled,
// plus a separate cell for the inner-only configuration when present.
struct ErrorReport {
  CellStats cells[2][3];
  std::optional<CellStats> inner_only;
  std::vector<std::string> unmatched; // keys present on only one side
};

inline ErrorReport compute_errors(const std::vector<MeasuredPose>& measurements,
                                  const std::vector<LabeledResult>& model_results) {
  ErrorReport report;
  auto key_of = [](const ConfigurationLabel& l, int step) {
    std::ostringstream os;
    os << to_string(l) << "#" << step;
    return os.str();
  };

  std::map<std::string, const LabeledResult*> by_key;
  for (const LabeledResult& r : model_results) by_key[key_of(r.configuration, r.step_index)] = &r;

  struct Accum {
    double sum = 0.0, max = 0.0;
    int n = 0;
  };
  Accum acc[2][3];
  Accum acc_io;
  std::map<std::string, bool> matched_model;

  for (const MeasuredPose& m : measurements) {
    m.validate();
    const std::string key = key_of(m.configuration, m.step_index);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      report.unmatched.push_back("measurement without model result: " + key);
      continue;
    }
    matched_model[key] = true;
    const double err = (m.tip_position - it->second->result.backbone.tip_position).norm();
    Accum& a = m.configuration.inner_only
                   ? acc_io
                   : acc[static_cast<int>(m.configuration.outer_state)]
                        [static_cast<int>(m.configuration.translation)];
    a.sum += err;
    a.max = std::max(a.max, err);
    a.n += 1;
  }
  for (const LabeledResult& r : model_results) {
    const std::string key = key_of(r.configuration, r.step_index);
    if (!matched_model.count(key))
      report.unmatched.push_back("model result without measurement: " + key);
  }
  if (!report.unmatched.empty())
    return report;

  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 3; ++k)
      if (acc[i][k].n > 0)
        report.cells[i][k] = {acc[i][k].sum / acc[i][k].n, acc[i][k].max, acc[i][k].n};
  if (acc_io.n > 0) report.inner_only = CellStats{acc_io.sum / acc_io.n, acc_io.max, acc_io.n};
  return report;
}

// --- measurement file format ------------------------------------------------
//
// Delimited text, one record per pose:
//   # tacter-measurements v1
//   label step tension_n x_mm y_mm z_mm

inline std::vector<MeasuredPose> parse_measurements(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<MeasuredPose> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("tacter-measurements v1") != std::string::npos) header_seen = true;
      continue;
    }
    if (!header_seen)
      throw ConfigError("measurement file missing '# tacter-measurements v1' header");
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string label;
    MeasuredPose m;
    if (!(ls >> label >> m.step_index >> m.tendon_tension >> m.tip_position.x() >>
          m.tip_position.y() >> m.tip_position.z()))
      throw ConfigError("measurement file: malformed record at line " + std::to_string(lineno));
    m.configuration = parse_label(label);
    m.validate();
    out.push_back(m);
  }
  return out;
}

inline json error_report_to_json(const ErrorReport& r) {
  json j;
  j["schema"] = "tacter-error-report v1";
  const char* outer_names[2] = {"outer_straight", "outer_bent"};
  const char* trans_names[3] = {"IN", "IH", "IF"};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 3; ++k)
      j[outer_names[i]][trans_names[k]] = {{"avg_mm", r.cells[i][k].avg},
                                           {"max_mm", r.cells[i][k].max},
                                           {"poses", r.cells[i][k].count}};
  if (r.inner_only)
    j["inner_only"] = {{"avg_mm", r.inner_only->avg},
                       {"max_mm", r.inner_only->max},
                       {"poses", r.inner_only->count}};
  j["unmatched"] = r.unmatched;
  return j;
}

inline std::string error_report_to_text(const ErrorReport& r) {
  std::ostringstream os;
  os << "Tip position error (mm)\n";
  os << "            Outer Straight            Outer Bent\n";
  os << "Error       IN      IH      IF        IN      IH      IF\n";
  auto row = [&](const char* name, auto pick) {
    os << name;
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 3; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%8.3f", pick(r.cells[i][k]));
        os << buf;
      }
      os << "  ";
    }
    os << "\n";
  };
  row("Avg.  ", [](const CellStats& c) { return c.avg; });
  row("Max   ", [](const CellStats& c) { return c.max; });
  if (r.inner_only) {
    os << "Inner only: avg " << r.inner_only->avg << " mm, max " << r.inner_only->max << " mm ("
       << r.inner_only->count << " poses)\n";
  }
  return os.str();
}

}  // namespace tacter
