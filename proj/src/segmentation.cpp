#include "skidkin/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

struct Prefix {
  std::vector<double> heading;  // accumulated wrapped yaw deltas up to sample k
  std::vector<double> omega_l;  // sum of omega_l over samples [0, k)
  std::vector<double> omega_r;
  std::vector<std::size_t> idle;  // count of near-zero-command samples in [0, k)
};

Prefix build_prefix(const SyncedTrajectory& traj, double zero_threshold) {
  const auto& s = traj.samples;
  Prefix p;
  p.heading.resize(s.size(), 0.0);
  p.omega_l.resize(s.size() + 1, 0.0);
  p.omega_r.resize(s.size() + 1, 0.0);
  p.idle.resize(s.size() + 1, 0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k > 0) {
      p.heading[k] =
          p.heading[k - 1] + angle_difference(s[k].pose.theta, s[k - 1].pose.theta);
    }
    p.omega_l[k + 1] = p.omega_l[k] + s[k].omega_l;
    p.omega_r[k + 1] = p.omega_r[k] + s[k].omega_r;
    const bool is_idle = std::max(std::abs(s[k].omega_l), std::abs(s[k].omega_r)) <
                         zero_threshold;
    p.idle[k + 1] = p.idle[k] + (is_idle ? 1 : 0);
  }
  return p;
}

Segment make_segment(const SyncedTrajectory& traj, const Prefix& p, std::size_t i,
                     std::size_t j) {
  const auto& s = traj.samples;
  Segment seg;
  seg.start_pose = s[i].pose;
  seg.end_pose = s[j].pose;
  seg.commands.reserve(j - i + 1);
  for (std::size_t k = i; k <= j; ++k) {
    seg.commands.push_back(WheelCommand{s[k].t, s[k].omega_l, s[k].omega_r});
  }
  seg.path_length = s[j].cum_length - s[i].cum_length;
  seg.duration = s[j].t - s[i].t;
  seg.heading_change = p.heading[j] - p.heading[i];
  // Means are over the commands actually applied; the sample at j only
  // terminates the last hold interval.
  const auto applied = static_cast<double>(j - i);
  seg.mean_omega_l = (p.omega_l[j] - p.omega_l[i]) / applied;
  seg.mean_omega_r = (p.omega_r[j] - p.omega_r[i]) / applied;
  return seg;
}

}  // namespace

SegmentationResult segment(const SyncedTrajectory& traj, const HorizonConfig& cfg) {
  if (traj.samples.empty()) {
    throw InvalidInputError("segment: empty trajectory");
  }
  if (!(cfg.h > 0.0)) {
    throw InvalidInputError("segment: horizon must be positive");
  }
  const auto& s = traj.samples;
  const auto metric_at = [&](std::size_t k) {
    return cfg.mode == HorizonMode::Spatial ? s[k].cum_length : s[k].t - s.front().t;
  };

  SegmentationResult result;
  if (metric_at(s.size() - 1) - metric_at(0) < cfg.h) {
    result.horizon_exceeded = true;
    return result;
  }

  const Prefix prefix = build_prefix(traj, cfg.zero_command_threshold);
  const auto maybe_emit = [&](std::size_t i, std::size_t j) {
    const auto window = static_cast<double>(j - i + 1);
    const auto idle = static_cast<double>(prefix.idle[j + 1] - prefix.idle[i]);
    if (idle > cfg.zero_command_fraction * window) {
      ++result.dropped_zero_command;
      return;
    }
    result.segments.push_back(make_segment(traj, prefix, i, j));
  };

  if (cfg.stride == Stride::NonOverlapping) {
    std::size_t i = 0;
    while (true) {
      std::size_t j = i + 1;
      while (j < s.size() && metric_at(j) - metric_at(i) < cfg.h) ++j;
      if (j >= s.size()) break;  // trailing partial window discarded
      maybe_emit(i, j);
      i = j;
    }
  } else {
    std::size_t j = 1;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (j <= i) j = i + 1;
      while (j < s.size() && metric_at(j) - metric_at(i) < cfg.h) ++j;
      if (j >= s.size()) break;  // no later start can reach the horizon either
      maybe_emit(i, j);
    }
  }
  return result;
}

}  // namespace skidkin
