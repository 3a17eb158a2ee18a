#include "skidkin/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "internal/text_io.hpp"
#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

using detail::format_double;

double ideal_dd_omega(const ChassisGeometry& geom, double omega_l, double omega_r) {
  return geom.r * (omega_r - omega_l) / geom.b;
}

double commanded_rotation_per_meter(const ChassisGeometry& geom, const Segment& seg) {
  return ideal_dd_omega(geom, seg.mean_omega_l, seg.mean_omega_r) * seg.duration /
         seg.path_length;
}

}  // namespace

std::vector<ErrorSample> evaluate(const KinematicModel& model,
                                  std::span<const Segment> segments) {
  const ChassisGeometry geom = std::visit([](const auto& m) { return m.geom; }, model);
  std::vector<ErrorSample> samples;
  samples.reserve(segments.size());
  for (const auto& seg : segments) {
    const Pose2D predicted = rollout_final_pose(model, seg.start_pose, seg.commands);
    ErrorSample s;
    s.eps_t = std::hypot(seg.end_pose.x - predicted.x, seg.end_pose.y - predicted.y) /
              seg.path_length;
    s.eps_theta =
        std::abs(angle_difference(seg.end_pose.theta, predicted.theta)) / seg.path_length;
    s.path_length = seg.path_length;
    s.duration = seg.duration;
    s.mean_omega_l = seg.mean_omega_l;
    s.mean_omega_r = seg.mean_omega_r;
    s.commanded_rotation_per_meter = commanded_rotation_per_meter(geom, seg);
    s.measured_rotation_per_meter = seg.heading_change / seg.path_length;
    samples.push_back(s);
  }
  return samples;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw InvalidInputError("quantile: empty sample set");
  }
  q = std::min(std::max(q, 0.0), 1.0);
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

DistributionSummary summarize(const std::vector<double>& values) {
  DistributionSummary s;
  s.q25 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q75 = quantile(values, 0.75);
  s.count = values.size();
  return s;
}

DistributionSummary summarize_eps_t(std::span<const ErrorSample> samples) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.eps_t);
  return summarize(v);
}

DistributionSummary summarize_eps_theta(std::span<const ErrorSample> samples) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.eps_theta);
  return summarize(v);
}

HorizonSweep horizon_sweep(const KinematicModel& initial, const SyncedTrajectory& traj_train,
                           const SyncedTrajectory& traj_eval, std::span<const double> h_t_list,
                           std::span<const double> h_e_list, const LossConfig& loss_cfg,
                           const OptimizerConfig& opt_cfg, const HorizonConfig& base_cfg) {
  if (h_t_list.empty() || h_e_list.empty()) {
    throw InvalidInputError("horizon_sweep: horizon lists must be non-empty");
  }
  HorizonSweep sweep;
  sweep.h_t_list.assign(h_t_list.begin(), h_t_list.end());
  sweep.h_e_list.assign(h_e_list.begin(), h_e_list.end());
  sweep.eps_t.reserve(h_t_list.size() * h_e_list.size());

  for (const double h_t : h_t_list) {
    HorizonConfig train_cfg = base_cfg;
    train_cfg.h = h_t;
    train_cfg.stride = Stride::NonOverlapping;
    const auto train_segments = segment(traj_train, train_cfg);
    const CalibrationReport fit =
        calibrate(initial, train_segments.segments, loss_cfg, opt_cfg);

    for (const double h_e : h_e_list) {
      HorizonConfig eval_cfg = base_cfg;
      eval_cfg.h = h_e;
      eval_cfg.stride = Stride::Sliding;
      const auto eval_segments = segment(traj_eval, eval_cfg);
      const auto samples = evaluate(fit.model, eval_segments.segments);
      sweep.eps_t.push_back(summarize_eps_t(samples));
    }
  }
  return sweep;
}

std::vector<RotationBin> rotation_response(std::span<const Segment> segments,
                                           const ChassisGeometry& geom, std::size_t bins) {
  std::vector<RotationBin> curve;
  if (segments.empty() || bins == 0) return curve;

  std::vector<double> commanded;
  std::vector<double> measured;
  commanded.reserve(segments.size());
  measured.reserve(segments.size());
  for (const auto& seg : segments) {
    commanded.push_back(commanded_rotation_per_meter(geom, seg));
    measured.push_back(seg.heading_change / seg.path_length);
  }

  const auto [lo_it, hi_it] = std::minmax_element(commanded.begin(), commanded.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<std::vector<double>> buckets(bins);
  for (std::size_t i = 0; i < commanded.size(); ++i) {
    std::size_t idx = 0;
    if (width > 0.0) {
      idx = std::min(bins - 1,
                     static_cast<std::size_t>((commanded[i] - lo) / width));
    }
    buckets[idx].push_back(measured[i]);
  }
  for (std::size_t idx = 0; idx < bins; ++idx) {
    if (buckets[idx].empty()) continue;
    RotationBin bin;
    bin.commanded_lo = lo + static_cast<double>(idx) * width;
    bin.commanded_hi = bin.commanded_lo + width;
    bin.commanded_center = bin.commanded_lo + width / 2.0;
    bin.measured = summarize(buckets[idx]);
    curve.push_back(bin);
  }
  return curve;
}

ErrorCommandGrid error_command_grid(std::span<const ErrorSample> samples,
                                    std::size_t resolution) {
  ErrorCommandGrid grid;
  grid.resolution = resolution;
  if (samples.empty() || resolution == 0) return grid;

  grid.omega_l_min = grid.omega_l_max = samples.front().mean_omega_l;
  grid.omega_r_min = grid.omega_r_max = samples.front().mean_omega_r;
  for (const auto& s : samples) {
    grid.omega_l_min = std::min(grid.omega_l_min, s.mean_omega_l);
    grid.omega_l_max = std::max(grid.omega_l_max, s.mean_omega_l);
    grid.omega_r_min = std::min(grid.omega_r_min, s.mean_omega_r);
    grid.omega_r_max = std::max(grid.omega_r_max, s.mean_omega_r);
  }
  // A degenerate box (all samples at one command) still gets finite cells.
  if (grid.omega_l_max == grid.omega_l_min) {
    grid.omega_l_min -= 0.5;
    grid.omega_l_max += 0.5;
  }
  if (grid.omega_r_max == grid.omega_r_min) {
    grid.omega_r_min -= 0.5;
    grid.omega_r_max += 0.5;
  }

  const double dl = (grid.omega_l_max - grid.omega_l_min) / static_cast<double>(resolution);
  const double dr = (grid.omega_r_max - grid.omega_r_min) / static_cast<double>(resolution);
  std::vector<std::vector<double>> buckets(resolution * resolution);
  for (const auto& s : samples) {
    const auto i = std::min(resolution - 1,
                            static_cast<std::size_t>((s.mean_omega_l - grid.omega_l_min) / dl));
    const auto j = std::min(resolution - 1,
                            static_cast<std::size_t>((s.mean_omega_r - grid.omega_r_min) / dr));
    buckets[i * resolution + j].push_back(s.eps_theta);
  }
  grid.cells.resize(resolution * resolution);
  for (std::size_t c = 0; c < buckets.size(); ++c) {
    grid.cells[c].count = buckets[c].size();
    if (!buckets[c].empty()) {
      grid.cells[c].median_eps_theta = quantile(buckets[c], 0.5);
    }
  }
  return grid;
}

// --- Report files ------------------------------------------------------------

void write_samples_csv(const std::filesystem::path& path, std::span<const ErrorSample> samples) {
  std::string out =
      "eps_t,eps_theta,path_length,duration,mean_omega_l,mean_omega_r,"
      "commanded_rot_per_m,measured_rot_per_m,wheel_rate_diff\n";
  for (const auto& s : samples) {
    out += format_double(s.eps_t) + "," + format_double(s.eps_theta) + "," +
           format_double(s.path_length) + "," + format_double(s.duration) + "," +
           format_double(s.mean_omega_l) + "," + format_double(s.mean_omega_r) + "," +
           format_double(s.commanded_rotation_per_meter) + "," +
           format_double(s.measured_rotation_per_meter) + "," +
           format_double(s.mean_omega_r - s.mean_omega_l) + "\n";
  }
  detail::write_file_atomic(path, out);
}

void write_summary_json(const std::filesystem::path& path, const std::string& model_name,
                        double horizon, std::span<const ErrorSample> samples) {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["horizon_m"] = horizon;
  j["count"] = samples.size();
  const auto emit = [](const DistributionSummary& s) {
    return nlohmann::ordered_json{
        {"median", s.median}, {"q25", s.q25}, {"q75", s.q75}, {"count", s.count}};
  };
  if (!samples.empty()) {
    j["eps_t"] = emit(summarize_eps_t(samples));
    j["eps_theta"] = emit(summarize_eps_theta(samples));
  }
  detail::write_file_atomic(path, j.dump(2) + "\n");
}

void write_rotation_response_csv(const std::filesystem::path& path,
                                 std::span<const RotationBin> bins) {
  std::string out =
      "# commanded axis: ideal differential-drive rotation per meter of the "
      "window's mean commands, rad/m\n"
      "commanded_lo,commanded_hi,commanded_center,count,median,q25,q75\n";
  for (const auto& b : bins) {
    out += format_double(b.commanded_lo) + "," + format_double(b.commanded_hi) + "," +
           format_double(b.commanded_center) + "," + std::to_string(b.measured.count) + "," +
           format_double(b.measured.median) + "," + format_double(b.measured.q25) + "," +
           format_double(b.measured.q75) + "\n";
  }
  detail::write_file_atomic(path, out);
}

void write_error_grid_csv(const std::filesystem::path& path, const ErrorCommandGrid& grid) {
  std::string out = "omega_l_lo,omega_l_hi,omega_r_lo,omega_r_hi,count,median_eps_theta\n";
  const auto res = grid.resolution;
  if (res == 0 || grid.cells.empty()) {
    detail::write_file_atomic(path, out);
    return;
  }
  const double dl = (grid.omega_l_max - grid.omega_l_min) / static_cast<double>(res);
  const double dr = (grid.omega_r_max - grid.omega_r_min) / static_cast<double>(res);
  for (std::size_t i = 0; i < res; ++i) {
    for (std::size_t j = 0; j < res; ++j) {
      const auto& cell = grid.at(i, j);
      out += format_double(grid.omega_l_min + static_cast<double>(i) * dl) + "," +
             format_double(grid.omega_l_min + static_cast<double>(i + 1) * dl) + "," +
             format_double(grid.omega_r_min + static_cast<double>(j) * dr) + "," +
             format_double(grid.omega_r_min + static_cast<double>(j + 1) * dr) + "," +
             std::to_string(cell.count) + "," +
             (cell.count > 0 ? format_double(cell.median_eps_theta) : "") + "\n";
    }
  }
  detail::write_file_atomic(path, out);
}

void write_sweep_csv(const std::filesystem::path& path, const HorizonSweep& sweep) {
  std::string out = "h_t,h_e,median_eps_t,q25_eps_t,q75_eps_t,count\n";
  for (std::size_t i = 0; i < sweep.h_t_list.size(); ++i) {
    for (std::size_t j = 0; j < sweep.h_e_list.size(); ++j) {
      const auto& s = sweep.at(i, j);
      out += format_double(sweep.h_t_list[i]) + "," + format_double(sweep.h_e_list[j]) + "," +
             format_double(s.median) + "," + format_double(s.q25) + "," +
             format_double(s.q75) + "," + std::to_string(s.count) + "\n";
    }
  }
  detail::write_file_atomic(path, out);
}

}  // namespace skidkin
