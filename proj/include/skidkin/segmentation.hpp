#pragma once

#include <cstddef>
#include <vector>

#include "skidkin/dataset.hpp"

namespace skidkin {

enum class HorizonMode { Spatial, Temporal };
enum class Stride { NonOverlapping, Sliding };

struct HorizonConfig {
  HorizonMode mode = HorizonMode::Spatial;
  double h = 2.0;  // m (spatial) or s (temporal)
  Stride stride = Stride::NonOverlapping;
  double zero_command_threshold = 0.05;  // rad/s
  double zero_command_fraction = 0.5;    // drop when more than this fraction is idle
};

// One ground-truth-anchored slice of a trajectory; the unit of training and
// evaluation. `commands` spans the segment's samples inclusively; the last
// command only terminates the zero-order hold.
struct Segment {
  Pose2D start_pose;
  Pose2D end_pose;
  std::vector<WheelCommand> commands;
  double path_length = 0.0;     // m, ground truth
  double duration = 0.0;        // s
  double heading_change = 0.0;  // rad, accumulated (unwrapped) ground-truth yaw
  double mean_omega_l = 0.0;    // rad/s, over the applied commands
  double mean_omega_r = 0.0;    // rad/s
};

struct SegmentationResult {
  std::vector<Segment> segments;
  std::size_t dropped_zero_command = 0;
  // Set when the horizon exceeds the trajectory's total path/duration, in
  // which case `segments` is empty. A diagnostic, not an error.
  bool horizon_exceeded = false;
};

// Cuts the trajectory into horizon-length windows. Spatial mode cuts at the
// first sample whose path length since the window start reaches cfg.h;
// temporal mode cuts on elapsed time. NonOverlapping restarts at each cut,
// Sliding starts a window at every sample. Trailing partial windows are
// discarded; windows dominated by zero commands are dropped as outliers.
// Throws InvalidInputError on an empty trajectory.
SegmentationResult segment(const SyncedTrajectory& traj, const HorizonConfig& cfg);

inline std::size_t count(const SegmentationResult& result) { return result.segments.size(); }

}  // namespace skidkin
