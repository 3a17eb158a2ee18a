#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "skidkin/geometry.hpp"
#include "skidkin/models.hpp"

namespace skidkin {

// Commanded wheel velocities, strictly increasing timestamps (nominally 20 Hz).
struct CommandLog {
  std::vector<WheelCommand> commands;
};

// Ground-truth poses, strictly increasing timestamps (nominally 10 Hz).
struct PoseLog {
  struct Sample {
    double t = 0.0;
    Pose2D pose;
  };
  std::vector<Sample> samples;
};

// Command and ground-truth streams aligned onto the command timestamps.
struct SyncedTrajectory {
  struct Sample {
    double t = 0.0;
    double omega_l = 0.0;
    double omega_r = 0.0;
    Pose2D pose;           // ground truth interpolated at t
    double cum_length = 0.0;  // path length accumulated from the first sample, m
  };
  std::vector<Sample> samples;

  double total_length() const { return samples.empty() ? 0.0 : samples.back().cum_length; }
  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

// Rotation-per-meter response shaping applied by the simulator: below
// `threshold` (rad/m) commands pass through; beyond it the response slope
// drops to `gain`.
struct AngularSaturation {
  double threshold = 0.5;  // rad/m
  double gain = 1.0;       // slope past the threshold
};

// Everything needed to reproduce one synthetic run.
struct SimScenario {
  KinematicModel true_model = IdealDiffDrive{};
  std::vector<WheelCommand> command_profile;
  double twist_noise_vx = 0.0;     // m/s
  double twist_noise_vy = 0.0;     // m/s
  double twist_noise_omega = 0.0;  // rad/s
  std::optional<AngularSaturation> angular_saturation;
  std::uint64_t rng_seed = 0;
};

// CSV schema: header "t,omega_l,omega_r"; units s, rad/s, rad/s.
CommandLog load_command_log(const std::filesystem::path& path);
void save_command_log(const std::filesystem::path& path, const CommandLog& log);

// CSV schema: header "t,x,y,theta"; units s, m, m, rad.
PoseLog load_pose_log(const std::filesystem::path& path);
void save_pose_log(const std::filesystem::path& path, const PoseLog& log);

// Interpolates ground truth onto every command timestamp inside the time
// overlap of the two logs (linear in x/y, shortest arc in theta) and
// accumulates path length. Throws AlignmentError when the overlap is
// shorter than 1 s.
SyncedTrajectory synchronize(const CommandLog& cmds, const PoseLog& poses);

// Rolls out the scenario's true model over its command profile with seeded
// Gaussian twist perturbation and optional angular saturation. The command
// log keeps the full profile rate; the pose log is downsampled to every
// other command interval (20 Hz in, 10 Hz out).
std::pair<CommandLog, PoseLog> simulate(const SimScenario& scenario);

// Piecewise-constant 20 Hz command profile covering the command box
// [-speed_limit, speed_limit]^2, including straight lines, zero-radius
// turns, and arcs in both directions. Deterministic for a given seed.
// Throws EmptyLogError when duration <= 0.
CommandLog excitation_profile(double duration, double speed_limit, std::uint64_t seed);

// Scenario config: flat "key = value" file. Recognized keys: variant, r, b,
// per-variant parameter names, duration, speed_limit, seed, noise_vx,
// noise_vy, noise_omega, sat_threshold, sat_gain, commands_csv.
// The command profile comes from commands_csv when present, otherwise from
// excitation_profile(duration, speed_limit, seed).
SimScenario load_scenario(const std::filesystem::path& path);

}  // namespace skidkin
