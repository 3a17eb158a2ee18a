#include "skidkin/segmentation.hpp"

#include <cmath>
#include <random>

#include <doctest.h>

#include "skidkin/dataset.hpp"
#include "skidkin/errors.hpp"
#include "test_support.hpp"

using namespace skidkin;
using namespace skidkin::testing;

namespace {

// Independent reference for the sliding-window count: quadratic scan, no
// two-pointer bookkeeping.
std::size_t brute_force_sliding_count(const SyncedTrajectory& traj, double h) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    for (std::size_t j = i + 1; j < traj.samples.size(); ++j) {
      if (traj.samples[j].cum_length - traj.samples[i].cum_length >= h) {
        ++count;
        break;
      }
    }
  }
  return count;
}

SyncedTrajectory noisy_trajectory(double duration, std::uint64_t seed) {
  SimScenario scenario;
  scenario.true_model = ExtendedDiffDriveSymmetric{ChassisGeometry{0.3, 1.2}, 0.86, 3.08};
  scenario.command_profile = excitation_profile(duration, 3.0, seed).commands;
  scenario.twist_noise_vx = 0.05;
  scenario.twist_noise_omega = 0.05;
  scenario.rng_seed = seed;
  const auto [cmds, poses] = simulate(scenario);
  return synchronize(cmds, poses);
}

}  // namespace

TEST_CASE("spatial non-overlapping segmentation of a straight line") {
  const SyncedTrajectory traj = straight_line_trajectory(1.0, 10.0);
  HorizonConfig cfg;
  cfg.h = 2.0;
  const SegmentationResult result = segment(traj, cfg);
  CHECK(count(result) == 5);
  for (const auto& seg : result.segments) {
    CHECK(seg.path_length == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(seg.duration == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(seg.mean_omega_l == doctest::Approx(2.0));
    CHECK(seg.heading_change == 0.0);
  }
  // consecutive tiling
  CHECK(result.segments.front().start_pose.x == doctest::Approx(0.0));
  CHECK(result.segments.back().end_pose.x == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("sliding stride count matches the brute-force scan") {
  SUBCASE("straight line") {
    const SyncedTrajectory traj = straight_line_trajectory(1.0, 10.0);
    HorizonConfig cfg;
    cfg.h = 2.0;
    cfg.stride = Stride::Sliding;
    const SegmentationResult result = segment(traj, cfg);
    CHECK(count(result) == brute_force_sliding_count(traj, 2.0));
    CHECK(count(result) == 161);  // samples with at least 2 m of path remaining
  }

  SUBCASE("noisy synthetic trajectory") {
    const SyncedTrajectory traj = noisy_trajectory(60.0, 3);
    HorizonConfig cfg;
    cfg.h = 2.0;
    cfg.stride = Stride::Sliding;
    cfg.zero_command_threshold = 0.0;  // count pure window placement
    const SegmentationResult result = segment(traj, cfg);
    CHECK(count(result) == brute_force_sliding_count(traj, 2.0));
    CHECK(count(result) > 0);
  }
}

TEST_CASE("stationary zero-command trajectory yields no segments") {
  SyncedTrajectory traj;
  for (int i = 0; i <= 200; ++i) {
    traj.samples.push_back({0.05 * i, 0.0, 0.0, Pose2D{}, 0.0});
  }
  SUBCASE("spatial horizon cannot even fit") {
    HorizonConfig cfg;
    cfg.h = 2.0;
    const SegmentationResult result = segment(traj, cfg);
    CHECK(count(result) == 0);
    CHECK(result.horizon_exceeded);
  }
  SUBCASE("temporal horizon fits but the outlier rule drops every window") {
    HorizonConfig cfg;
    cfg.mode = HorizonMode::Temporal;
    cfg.h = 2.0;
    const SegmentationResult result = segment(traj, cfg);
    CHECK(count(result) == 0);
    CHECK(!result.horizon_exceeded);
    CHECK(result.dropped_zero_command == 5);
  }
}

TEST_CASE("zero-command windows are dropped, active ones kept") {
  // 5 s of driving, 5 s idle while coasting poses stay still, 5 s driving
  SyncedTrajectory traj;
  double x = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.05 * i;
    const bool idle = t >= 5.0 && t < 10.0;
    SyncedTrajectory::Sample s;
    s.t = t;
    s.omega_l = s.omega_r = idle ? 0.0 : 2.0;
    s.pose = Pose2D{x, 0, 0};
    s.cum_length = x;
    traj.samples.push_back(s);
    if (!idle) x += 0.6 * 0.05;
  }
  HorizonConfig cfg;
  cfg.mode = HorizonMode::Temporal;
  cfg.h = 2.0;
  const SegmentationResult result = segment(traj, cfg);
  // 15 s -> 7 windows of 2 s; windows 3 and 4 (4-6 s, 6-8 s) are idle-heavy
  CHECK(result.dropped_zero_command >= 2);
  CHECK(count(result) <= 5);
  for (const auto& seg : result.segments) {
    CHECK(seg.duration == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("temporal mode cuts on elapsed time") {
  const SyncedTrajectory traj = straight_line_trajectory(0.5, 12.0);
  HorizonConfig cfg;
  cfg.mode = HorizonMode::Temporal;
  cfg.h = 3.0;
  const SegmentationResult result = segment(traj, cfg);
  CHECK(count(result) == 4);
  for (const auto& seg : result.segments) {
    CHECK(seg.duration == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(seg.path_length == doctest::Approx(1.5).epsilon(1e-9));
  }
}

TEST_CASE("non-overlapping segments tile the trajectory") {
  const SyncedTrajectory traj = noisy_trajectory(90.0, 9);
  HorizonConfig cfg;
  cfg.h = 2.0;
  cfg.zero_command_threshold = 0.0;  // keep every window so lengths add up
  const SegmentationResult result = segment(traj, cfg);
  REQUIRE(count(result) > 10);
  double covered = 0.0;
  double max_step = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    max_step =
        std::max(max_step, traj.samples[i].cum_length - traj.samples[i - 1].cum_length);
  }
  for (const auto& seg : result.segments) {
    covered += seg.path_length;
    CHECK(seg.path_length >= 2.0);
    CHECK(seg.path_length <= 2.0 + max_step + 1e-12);
    CHECK(!seg.commands.empty());
  }
  CHECK(traj.total_length() - covered < cfg.h);
}

TEST_CASE("horizon larger than the data is a warning, not an error") {
  const SyncedTrajectory traj = straight_line_trajectory(1.0, 5.0);
  HorizonConfig cfg;
  cfg.h = 50.0;
  const SegmentationResult result = segment(traj, cfg);
  CHECK(count(result) == 0);
  CHECK(result.horizon_exceeded);

  SyncedTrajectory empty;
  CHECK_THROWS_AS(segment(empty, cfg), InvalidInputError);
}

TEST_CASE("segmentation is deterministic") {
  const SyncedTrajectory traj = noisy_trajectory(45.0, 12);
  HorizonConfig cfg;
  cfg.h = 2.0;
  cfg.stride = Stride::Sliding;
  const SegmentationResult a = segment(traj, cfg);
  const SegmentationResult b = segment(traj, cfg);
  REQUIRE(count(a) == count(b));
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    CHECK(a.segments[i].path_length == b.segments[i].path_length);
    CHECK(a.segments[i].start_pose == b.segments[i].start_pose);
  }
}
