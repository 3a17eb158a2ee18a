// Command-line front end for the skid-steer kinematics toolkit:
// simulate synthetic runs, calibrate model parameters, evaluate per-meter
// prediction errors, and sweep training/evaluation horizons.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skidkin/calibration.hpp"
#include "skidkin/dataset.hpp"
#include "skidkin/errors.hpp"
#include "skidkin/evaluation.hpp"
#include "skidkin/model_io.hpp"
#include "skidkin/models.hpp"
#include "skidkin/segmentation.hpp"

namespace {

namespace fs = std::filesystem;
using namespace skidkin;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void log_info(const std::string& msg) { std::fprintf(stderr, "[info] %s\n", msg.c_str()); }
void log_warn(const std::string& msg) { std::fprintf(stderr, "[warn] %s\n", msg.c_str()); }

const std::vector<std::string> kVariants = {"ideal-dd", "ext-dd-sym", "ext-dd-asym", "roc",
                                            "full-linear"};

struct SegmentationFlags {
  std::string mode = "spatial";
  double horizon = 2.0;
  std::string stride;  // per-subcommand default
  double zero_thresh = 0.05;
  double zero_frac = 0.5;

  void attach(CLI::App* cmd, const std::string& default_stride) {
    stride = default_stride;
    cmd->add_option("--mode", mode, "Horizon mode: spatial (m) or temporal (s)")
        ->check(CLI::IsMember({"spatial", "temporal"}))
        ->capture_default_str();
    cmd->add_option("--horizon", horizon, "Segment horizon, meters or seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--stride", stride, "Window stride")
        ->check(CLI::IsMember({"non-overlapping", "sliding"}))
        ->capture_default_str();
    cmd->add_option("--zero-thresh", zero_thresh,
                    "Wheel rate below which a sample counts as idle, rad/s")
        ->capture_default_str();
    cmd->add_option("--zero-frac", zero_frac,
                    "Drop windows with more than this fraction of idle samples")
        ->capture_default_str();
  }

  HorizonConfig config() const {
    HorizonConfig cfg;
    cfg.mode = mode == "temporal" ? HorizonMode::Temporal : HorizonMode::Spatial;
    cfg.h = horizon;
    cfg.stride = stride == "sliding" ? Stride::Sliding : Stride::NonOverlapping;
    cfg.zero_command_threshold = zero_thresh;
    cfg.zero_command_fraction = zero_frac;
    return cfg;
  }
};

void require_readable(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error("input file does not exist: '" + path.string() + "'");
  }
}

SyncedTrajectory load_synced(const std::string& cmd_path, const std::string& pose_path) {
  require_readable(cmd_path);
  require_readable(pose_path);
  const CommandLog cmds = load_command_log(cmd_path);
  const PoseLog poses = load_pose_log(pose_path);
  return synchronize(cmds, poses);
}

std::vector<Segment> segmented(const SyncedTrajectory& traj, const HorizonConfig& cfg) {
  const SegmentationResult result = segment(traj, cfg);
  if (result.horizon_exceeded) {
    log_warn("horizon exceeds the trajectory; no segments produced");
  }
  if (result.dropped_zero_command > 0) {
    log_warn(std::to_string(result.dropped_zero_command) +
             " windows dropped as zero-command outliers");
  }
  return result.segments;
}

LossConfig sigma_from_flag(const std::vector<double>& values) {
  LossConfig cfg;
  if (!values.empty()) {
    for (std::size_t i = 0; i < 9; ++i) cfg.sigma[i] = values[i];
  }
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Skid-steer kinematic model toolkit"};
  app.require_subcommand(1);

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic command/pose run");
  std::string scenario_path;
  std::string sim_out;
  sim->add_option("--scenario", scenario_path, "Scenario config file")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();

  // --- calibrate ---
  auto* cal = app.add_subcommand("calibrate", "Fit model parameters on a training run");
  std::string cal_variant = "ext-dd-sym";
  std::vector<std::string> cal_train;
  std::string cal_out;
  double cal_r = 0.3, cal_b = 1.2;
  std::uint64_t cal_seed = 0;
  int cal_restarts = 16;
  int cal_budget = 2000;
  double cal_tol = 1e-8;
  std::vector<double> cal_sigma;
  SegmentationFlags cal_seg;
  cal->add_option("--model", cal_variant, "Model variant to train")
      ->check(CLI::IsMember(kVariants))
      ->capture_default_str();
  cal->add_option("--train", cal_train, "Training commands.csv and poses.csv")
      ->expected(2)
      ->required();
  cal->add_option("--out", cal_out, "Output model file")->required();
  cal->add_option("-r,--wheel-radius", cal_r, "Wheel radius, m")->capture_default_str();
  cal->add_option("-b,--width", cal_b, "Vehicle width, m")->capture_default_str();
  cal->add_option("--seed", cal_seed, "Optimizer seed")->capture_default_str();
  cal->add_option("--restarts", cal_restarts, "Multi-start count")->capture_default_str();
  cal->add_option("--budget", cal_budget, "Loss evaluations per start")
      ->capture_default_str();
  cal->add_option("--tol", cal_tol, "Simplex convergence size")->capture_default_str();
  cal->add_option("--sigma", cal_sigma, "Row-major 3x3 residual weight matrix")
      ->expected(9);
  cal_seg.attach(cal, "non-overlapping");

  // --- evaluate ---
  auto* eva = app.add_subcommand("evaluate", "Score a fitted model on an evaluation run");
  std::string eva_model_file;
  std::vector<std::string> eva_eval;
  std::string eva_out;
  std::size_t eva_bins = 30;
  std::size_t eva_grid = 20;
  SegmentationFlags eva_seg;
  eva->add_option("--model-file", eva_model_file, "Fitted model document")->required();
  eva->add_option("--eval", eva_eval, "Evaluation commands.csv and poses.csv")
      ->expected(2)
      ->required();
  eva->add_option("--out", eva_out, "Report directory")->required();
  eva->add_option("--bins", eva_bins, "Rotation response bin count")->capture_default_str();
  eva->add_option("--grid-res", eva_grid, "Error grid resolution")->capture_default_str();
  eva_seg.attach(eva, "sliding");

  // --- sweep ---
  auto* swp = app.add_subcommand("sweep", "Median/IQR of eps_t over (h_t, h_e) pairs");
  std::string swp_variant = "ext-dd-sym";
  std::vector<std::string> swp_train, swp_eval;
  std::vector<double> swp_ht, swp_he;
  std::string swp_out;
  double swp_r = 0.3, swp_b = 1.2;
  std::uint64_t swp_seed = 0;
  int swp_restarts = 16;
  int swp_budget = 2000;
  SegmentationFlags swp_seg;
  swp->add_option("--model", swp_variant, "Model variant to train")
      ->check(CLI::IsMember(kVariants))
      ->capture_default_str();
  swp->add_option("--train", swp_train, "Training commands.csv and poses.csv")
      ->expected(2)
      ->required();
  swp->add_option("--eval", swp_eval, "Evaluation commands.csv and poses.csv")
      ->expected(2)
      ->required();
  swp->add_option("--ht", swp_ht, "Training horizons, m")->required()->delimiter(',');
  swp->add_option("--he", swp_he, "Evaluation horizons, m")->required()->delimiter(',');
  swp->add_option("--out", swp_out, "Output CSV")->required();
  swp->add_option("-r,--wheel-radius", swp_r, "Wheel radius, m")->capture_default_str();
  swp->add_option("-b,--width", swp_b, "Vehicle width, m")->capture_default_str();
  swp->add_option("--seed", swp_seed, "Optimizer seed")->capture_default_str();
  swp->add_option("--restarts", swp_restarts, "Multi-start count")->capture_default_str();
  swp->add_option("--budget", swp_budget, "Loss evaluations per start")
      ->capture_default_str();
  swp_seg.attach(swp, "non-overlapping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version carry exit code 0, everything else is misuse
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (sim->parsed()) {
    require_readable(scenario_path);
    const SimScenario scenario = load_scenario(scenario_path);
    const auto [cmd_log, pose_log] = simulate(scenario);
    save_command_log(fs::path(sim_out) / "commands.csv", cmd_log);
    save_pose_log(fs::path(sim_out) / "poses.csv", pose_log);
    log_info("simulated " + std::to_string(cmd_log.commands.size()) + " commands, " +
             std::to_string(pose_log.samples.size()) + " ground-truth poses");
    return kExitOk;
  }

  if (cal->parsed()) {
    const SyncedTrajectory traj = load_synced(cal_train[0], cal_train[1]);
    const auto segments = segmented(traj, cal_seg.config());
    OptimizerConfig opt;
    opt.seed = cal_seed;
    opt.restarts = cal_restarts;
    opt.max_evals_per_start = cal_budget;
    opt.simplex_tolerance = cal_tol;
    const KinematicModel initial = make_model(cal_variant, ChassisGeometry{cal_r, cal_b});
    const CalibrationReport report =
        calibrate(initial, segments, sigma_from_flag(cal_sigma), opt);
    save_calibration_report(cal_out, report);
    log_info("fitted " + cal_variant + " on " + std::to_string(segments.size()) +
             " segments, final loss " + std::to_string(report.final_loss) +
             (report.converged ? "" : " (budget exhausted)"));
    return kExitOk;
  }

  if (eva->parsed()) {
    require_readable(eva_model_file);
    const KinematicModel model = load_model(eva_model_file);
    const SyncedTrajectory traj = load_synced(eva_eval[0], eva_eval[1]);
    const auto segments = segmented(traj, eva_seg.config());
    const auto samples = evaluate(model, segments);
    const ChassisGeometry geom = std::visit([](const auto& m) { return m.geom; }, model);

    const fs::path out_dir(eva_out);
    write_samples_csv(out_dir / "samples.csv", samples);
    write_summary_json(out_dir / "summary.json", variant_name(model), eva_seg.horizon,
                       samples);
    write_rotation_response_csv(out_dir / "rotation_response.csv",
                                rotation_response(segments, geom, eva_bins));
    write_error_grid_csv(out_dir / "error_grid.csv", error_command_grid(samples, eva_grid));
    log_info("evaluated " + std::to_string(samples.size()) + " segments into " +
             out_dir.string());
    return kExitOk;
  }

  if (swp->parsed()) {
    const SyncedTrajectory traj_train = load_synced(swp_train[0], swp_train[1]);
    const SyncedTrajectory traj_eval = load_synced(swp_eval[0], swp_eval[1]);
    OptimizerConfig opt;
    opt.seed = swp_seed;
    opt.restarts = swp_restarts;
    opt.max_evals_per_start = swp_budget;
    const KinematicModel initial = make_model(swp_variant, ChassisGeometry{swp_r, swp_b});
    const HorizonSweep sweep = horizon_sweep(initial, traj_train, traj_eval, swp_ht, swp_he,
                                             LossConfig{}, opt, swp_seg.config());
    write_sweep_csv(swp_out, sweep);
    log_info("swept " + std::to_string(swp_ht.size()) + " training x " +
             std::to_string(swp_he.size()) + " evaluation horizons into " + swp_out);
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const skidkin::NothingToTrainError& e) {
    std::fprintf(stderr, "[error] %s\n", e.what());
    return kExitUsage;
  } catch (const skidkin::Error& e) {
    std::fprintf(stderr, "[error] %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[error] %s\n", e.what());
    return kExitData;
  }
}
