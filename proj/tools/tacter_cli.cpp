// Command-line front door: single solves, protocol sweeps with optional
// validation against measured tip positions, and workspace sampling.
//
// Exit codes: 0 success, 2 configuration error, 3 non-convergence,
// 4 mismatched measurement labels.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tacter/export.hpp"
#include "tacter/validation.hpp"

namespace fs = std::filesystem;
using tacter::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tacter::ConfigError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tacter::ConfigError("cannot write file: " + path);
  out << content;
}

struct SolveRequest {
  std::string params_path;
  std::string output_path = "backbone.txt";
  std::string format = "delimited"; // delimited | structured
  double lambda_outer = 0.0;
  double lambda_inner_left = 0.0;
  double lambda_inner_right = 0.0;
  double translation = 0.0;
  double theta0_deg = 0.0;
  bool inner_only = false;
  int overlap_steps = 200;
  int distal_steps = 200;
  double tolerance = 1e-9;
};

void apply_manifest(SolveRequest& req, const std::string& manifest_path) {
  json m = json::parse(read_file(manifest_path));
  auto get = [&m](const char* key, auto& target) {
    if (m.contains(key)) target = m.at(key).template get<std::decay_t<decltype(target)>>();
  };
  get("params", req.params_path);
  get("output", req.output_path);
  get("format", req.format);
  get("lambda_outer_n", req.lambda_outer);
  get("lambda_inner_left_n", req.lambda_inner_left);
  get("lambda_inner_right_n", req.lambda_inner_right);
  get("translation_mm", req.translation);
  get("theta0_deg", req.theta0_deg);
  get("inner_only", req.inner_only);
  get("overlap_steps", req.overlap_steps);
  get("distal_steps", req.distal_steps);
  get("tolerance", req.tolerance);
}

int run_solve(const SolveRequest& req) {
  if (req.format != "delimited" && req.format != "structured")
    throw tacter::ConfigError("unrecognized output format: " + req.format);
  const tacter::RobotParams params = tacter::load_params(read_file(req.params_path));
  tacter::ActuationInput input;
  input.lambda_outer = req.lambda_outer;
  input.lambda_inner_left = req.lambda_inner_left;
  input.lambda_inner_right = req.lambda_inner_right;
  input.inner_translation = req.translation;
  input.theta0 = req.theta0_deg * M_PI / 180.0;
  input.outer_present = !req.inner_only;

  const tacter::ModelConfig cfg =
      tacter::make_model(params, input, req.overlap_steps, req.distal_steps);
  tacter::ShootingOptions opt;
  opt.tolerance = req.tolerance;
  const tacter::ShootingResult res = tacter::solve(cfg, tacter::ShootingUnknowns::trivial(), opt);

  const json prov = tacter::resolved_run_json(params, input, req.overlap_steps, req.distal_steps,
                                              req.tolerance);
  if (req.format == "delimited")
    write_file(req.output_path, tacter::backbone_to_delimited(res, prov));
  else
    write_file(req.output_path, tacter::backbone_to_json(res, prov).dump(2) + "\n");

  if (!res.converged) {
    std::cerr << "solve did not converge: " << res.message << "\n";
    return 3;
  }
  return 0;
}

std::vector<tacter::TensionSchedule> load_schedules(const std::string& path) {
  json j = json::parse(read_file(path));
  if (!j.contains("schema") || j.at("schema") != "tacter-schedule v1")
    throw tacter::ConfigError("schedule file must declare schema 'tacter-schedule v1'");
  std::vector<tacter::TensionSchedule> out;
  for (const json& e : j.at("schedules")) {
    tacter::TensionSchedule sch;
    sch.label = tacter::parse_label(e.at("label").get<std::string>());
    for (const json& t : e.at("tensions")) sch.tensions.push_back(t.get<double>());
    out.push_back(std::move(sch));
  }
  return out;
}

int run_protocol(const std::string& params_path, const std::string& schedule_path,
                 const std::string& measurements_path, const std::string& out_dir, int steps,
                 int overlap_steps, int distal_steps, double tolerance) {
  const tacter::RobotParams params = tacter::load_params(read_file(params_path));
  std::vector<tacter::TensionSchedule> schedules =
      schedule_path.empty() ? tacter::default_protocol_schedules(params, steps)
                            : load_schedules(schedule_path);
  tacter::ShootingOptions opt;
  opt.tolerance = tolerance;
  std::vector<tacter::LabeledResult> results =
      tacter::run_protocol(params, schedules, opt, overlap_steps, distal_steps);

  fs::create_directories(out_dir);
  int failures = 0;
  for (const tacter::LabeledResult& r : results) {
    tacter::ActuationInput input =
        tacter::configuration_to_input(r.configuration, params, r.tendon_tension);
    const json prov =
        tacter::resolved_run_json(params, input, overlap_steps, distal_steps, tolerance);
    std::ostringstream name;
    name << tacter::to_string(r.configuration) << "_" << r.step_index << ".txt";
    write_file((fs::path(out_dir) / name.str()).string(),
               tacter::backbone_to_delimited(r.result, prov));
    if (!r.result.converged) ++failures;
  }
  std::cerr << results.size() << " poses solved, " << failures << " failures\n";

  if (!measurements_path.empty()) {
    std::vector<tacter::MeasuredPose> measurements =
        tacter::parse_measurements(read_file(measurements_path));
    tacter::ErrorReport report = tacter::compute_errors(measurements, results);
    if (!report.unmatched.empty()) {
      std::cerr << "measurement/model key mismatch:\n";
      for (const std::string& u : report.unmatched) std::cerr << "  " << u << "\n";
      return 4;
    }
    write_file((fs::path(out_dir) / "error_report.txt").string(),
               tacter::error_report_to_text(report));
    write_file((fs::path(out_dir) / "error_report.json").string(),
               tacter::error_report_to_json(report).dump(2) + "\n");
    std::cout << tacter::error_report_to_text(report);
  }
  return failures == 0 ? 0 : 3;
}

struct AxisSpec {
  double lo = 0.0, hi = 0.0;
  int count = 1;
  double at(int i) const { return count < 2 ? lo : lo + (hi - lo) * i / (count - 1); }
};

int run_workspace(const std::string& params_path, const AxisSpec& ax_outer,
                  const AxisSpec& ax_inner, const AxisSpec& ax_trans, const std::string& side,
                  const std::string& output_path, int overlap_steps, int distal_steps,
                  double tolerance) {
  const tacter::RobotParams params = tacter::load_params(read_file(params_path));
  if (ax_trans.lo < 0.0 || ax_trans.hi > params.lengths.translation_range)
    throw tacter::ConfigError("workspace translation grid exceeds the configured range");
  if (ax_outer.lo < 0.0 || ax_inner.lo < 0.0)
    throw tacter::ConfigError("workspace tension grid must be non-negative");
  std::vector<std::string> sides;
  if (side == "L" || side == "both") sides.push_back("L");
  if (side == "R" || side == "both") sides.push_back("R");
  if (sides.empty()) throw tacter::ConfigError("side must be L, R, or both");

  tacter::ShootingOptions opt;
  opt.tolerance = tolerance;
  std::ostringstream os;
  os << "# tacter-workspace v1\n";
  os << "# params: " << tacter::params_to_json(params).dump() << "\n";
  os << "lambda_outer_n lambda_inner_n side translation_mm tip_x tip_y tip_z converged\n";
  int divergent = 0;
  for (int it = 0; it < ax_trans.count; ++it) {
    for (const std::string& sd : sides) {
      for (int io = 0; io < ax_outer.count; ++io) {
        tacter::ShootingUnknowns guess = tacter::ShootingUnknowns::trivial();
        for (int ii = 0; ii < ax_inner.count; ++ii) {
          tacter::ActuationInput input;
          input.lambda_outer = ax_outer.at(io);
          (sd == "L" ? input.lambda_inner_left : input.lambda_inner_right) = ax_inner.at(ii);
          input.inner_translation = ax_trans.at(it);
          const tacter::ModelConfig cfg =
              tacter::make_model(params, input, overlap_steps, distal_steps);
          const tacter::ShootingResult res = tacter::solve(cfg, guess, opt);
          if (res.converged) guess = res.unknowns;
          else ++divergent;
          const tacter::Vec3& tip = res.backbone.tip_position;
          os << tacter::format_g9(input.lambda_outer) << " " << tacter::format_g9(ax_inner.at(ii))
             << " " << sd << " " << tacter::format_g9(input.inner_translation) << " "
             << tacter::format_g9(tip.x()) << " " << tacter::format_g9(tip.y()) << " "
             << tacter::format_g9(tip.z()) << " " << (res.converged ? 1 : 0) << "\n";
        }
      }
    }
  }
  write_file(output_path, os.str());
  if (divergent > 0) std::cerr << divergent << " grid cells did not converge\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TACTER coupled Cosserat-rod static model"};
  app.require_subcommand(1);

  SolveRequest req;
  std::string manifest;
  CLI::App* solve = app.add_subcommand("solve", "solve a single actuation input");
  solve->add_option("--params", req.params_path, "robot parameter document (JSON)");
  solve->add_option("--manifest", manifest, "run manifest (JSON); flags override it");
  solve->add_option("--lambda-outer", req.lambda_outer, "outer tendon tension, N");
  solve->add_option("--lambda-inner-left", req.lambda_inner_left, "inner left tendon tension, N");
  solve->add_option("--lambda-inner-right", req.lambda_inner_right,
                    "inner right tendon tension, N");
  solve->add_option("--translation", req.translation, "inner robot translation, mm");
  solve->add_option("--theta0-deg", req.theta0_deg, "base inter-tube twist, degrees");
  solve->add_flag("--inner-only", req.inner_only, "model the inner robot alone");
  solve->add_option("--overlap-steps", req.overlap_steps, "integration steps on [0, l1]");
  solve->add_option("--distal-steps", req.distal_steps, "integration steps on [l1, l2]");
  solve->add_option("--tol", req.tolerance, "shooting residual tolerance");
  solve->add_option("--output", req.output_path, "output file");
  solve->add_option("--format", req.format, "delimited | structured");

  std::string pr_params, pr_schedule, pr_measurements, pr_outdir = "protocol_out";
  int pr_steps = 15, pr_overlap = 200, pr_distal = 200;
  double pr_tol = 1e-9;
  CLI::App* protocol = app.add_subcommand("protocol", "run the 13-configuration sweep protocol");
  protocol->add_option("--params", pr_params, "robot parameter document (JSON)")->required();
  protocol->add_option("--schedule", pr_schedule, "tension schedule file (JSON)");
  protocol->add_option("--steps", pr_steps, "ramp steps when generating default schedules");
  protocol->add_option("--measurements", pr_measurements, "measured tip positions (delimited)");
  protocol->add_option("--output-dir", pr_outdir, "directory for per-pose backbones and reports");
  protocol->add_option("--overlap-steps", pr_overlap, "integration steps on [0, l1]");
  protocol->add_option("--distal-steps", pr_distal, "integration steps on [l1, l2]");
  protocol->add_option("--tol", pr_tol, "shooting residual tolerance");

  std::string ws_params, ws_side = "both", ws_output = "workspace.txt";
  std::vector<double> ws_outer{0.0, 0.0, 1.0}, ws_inner{0.0, 0.0, 1.0}, ws_trans{0.0, 0.0, 1.0};
  int ws_overlap = 200, ws_distal = 200;
  double ws_tol = 1e-9;
  CLI::App* workspace = app.add_subcommand("workspace", "sample tip positions over a grid");
  workspace->add_option("--params", ws_params, "robot parameter document (JSON)")->required();
  workspace->add_option("--lambda-outer", ws_outer, "min max count")->expected(3);
  workspace->add_option("--lambda-inner", ws_inner, "min max count")->expected(3);
  workspace->add_option("--translation", ws_trans, "min max count")->expected(3);
  workspace->add_option("--side", ws_side, "L | R | both");
  workspace->add_option("--output", ws_output, "point cloud output file");
  workspace->add_option("--overlap-steps", ws_overlap, "integration steps on [0, l1]");
  workspace->add_option("--distal-steps", ws_distal, "integration steps on [l1, l2]");
  workspace->add_option("--tol", ws_tol, "shooting residual tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      if (!manifest.empty()) {
        SolveRequest base;
        apply_manifest(base, manifest);
        // explicit flags take precedence over manifest values
        if (solve->count("--params") == 0) req.params_path = base.params_path;
        if (solve->count("--output") == 0) req.output_path = base.output_path;
        if (solve->count("--format") == 0) req.format = base.format;
        if (solve->count("--lambda-outer") == 0) req.lambda_outer = base.lambda_outer;
        if (solve->count("--lambda-inner-left") == 0)
          req.lambda_inner_left = base.lambda_inner_left;
        if (solve->count("--lambda-inner-right") == 0)
          req.lambda_inner_right = base.lambda_inner_right;
        if (solve->count("--translation") == 0) req.translation = base.translation;
        if (solve->count("--theta0-deg") == 0) req.theta0_deg = base.theta0_deg;
        if (solve->count("--inner-only") == 0) req.inner_only = base.inner_only;
        if (solve->count("--overlap-steps") == 0) req.overlap_steps = base.overlap_steps;
        if (solve->count("--distal-steps") == 0) req.distal_steps = base.distal_steps;
        if (solve->count("--tol") == 0) req.tolerance = base.tolerance;
      }
      if (req.params_path.empty())
        throw tacter::ConfigError("--params is required (flag or manifest)");
      return run_solve(req);
    }
    if (protocol->parsed())
      return run_protocol(pr_params, pr_schedule, pr_measurements, pr_outdir, pr_steps, pr_overlap,
                          pr_distal, pr_tol);
    if (workspace->parsed()) {
      auto axis = [](const std::vector<double>& v) {
        AxisSpec a{v[0], v[1], static_cast<int>(v[2])};
        if (a.count < 1) throw tacter::ConfigError("grid axis count must be >= 1");
        return a;
      };
      return run_workspace(ws_params, axis(ws_outer), axis(ws_inner), axis(ws_trans), ws_side,
                           ws_output, ws_overlap, ws_distal, ws_tol);
    }
  } catch (const tacter::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
