#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "skidkin/calibration.hpp"
#include "skidkin/models.hpp"
#include "skidkin/segmentation.hpp"

namespace skidkin {

// Per-segment relative prediction errors with the commands that caused them.
struct ErrorSample {
  double eps_t = 0.0;      // final translational error / path length, m/m
  double eps_theta = 0.0;  // |final heading error| / path length, rad/m
  double path_length = 0.0;
  double duration = 0.0;
  double mean_omega_l = 0.0;
  double mean_omega_r = 0.0;
  double commanded_rotation_per_meter = 0.0;  // ideal-DD omega of the mean command, rad/m
  double measured_rotation_per_meter = 0.0;   // ground-truth heading change, rad/m
};

struct DistributionSummary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t count = 0;

  double iqr() const { return q75 - q25; }
};

// One bin of the rotation response curve (Fig-6-style analysis).
struct RotationBin {
  double commanded_lo = 0.0;  // rad/m
  double commanded_hi = 0.0;
  double commanded_center = 0.0;
  DistributionSummary measured;  // measured rad/m within this bin
};

struct ErrorCommandCell {
  std::size_t count = 0;
  double median_eps_theta = 0.0;  // valid when count > 0
};

// Fixed-resolution grid of median angular error over the mean-command box.
struct ErrorCommandGrid {
  double omega_l_min = 0.0, omega_l_max = 0.0;
  double omega_r_min = 0.0, omega_r_max = 0.0;
  std::size_t resolution = 0;
  std::vector<ErrorCommandCell> cells;  // row-major, omega_l rows

  const ErrorCommandCell& at(std::size_t i_l, std::size_t i_r) const {
    return cells[i_l * resolution + i_r];
  }
};

// Median and IQR of eps_t per (h_t, h_e) pair.
struct HorizonSweep {
  std::vector<double> h_t_list;
  std::vector<double> h_e_list;
  std::vector<DistributionSummary> eps_t;  // row-major, h_t rows

  const DistributionSummary& at(std::size_t i_t, std::size_t i_e) const {
    return eps_t[i_t * h_e_list.size() + i_e];
  }
};

// Dead-reckons the model over each segment and forms the per-meter final
// pose errors. Segments are expected to come from sliding-stride
// segmentation at the evaluation horizon.
std::vector<ErrorSample> evaluate(const KinematicModel& model, std::span<const Segment> segments);

// Linear-interpolation quantile of an unsorted sample set, q in [0, 1].
// Throws InvalidInputError when empty.
double quantile(std::vector<double> values, double q);

// Median and quartiles. Throws InvalidInputError when empty.
DistributionSummary summarize(const std::vector<double>& values);

DistributionSummary summarize_eps_t(std::span<const ErrorSample> samples);
DistributionSummary summarize_eps_theta(std::span<const ErrorSample> samples);

// Trains at every h_t on the training trajectory and scores eps_t at every
// h_e on the evaluation trajectory.
HorizonSweep horizon_sweep(const KinematicModel& initial, const SyncedTrajectory& traj_train,
                           const SyncedTrajectory& traj_eval, std::span<const double> h_t_list,
                           std::span<const double> h_e_list, const LossConfig& loss_cfg = {},
                           const OptimizerConfig& opt_cfg = {},
                           const HorizonConfig& base_cfg = {});

// Measured versus commanded rotation per meter, binned on the commanded
// axis; empty bins are omitted. The commanded axis maps mean commands
// through the ideal differential-drive Jacobian of `geom`.
std::vector<RotationBin> rotation_response(std::span<const Segment> segments,
                                           const ChassisGeometry& geom, std::size_t bins = 30);

// Median eps_theta over a (mean omega_l, mean omega_r) grid spanning the
// observed command box.
ErrorCommandGrid error_command_grid(std::span<const ErrorSample> samples,
                                    std::size_t resolution = 20);

// --- Report files -----------------------------------------------------------
// All writers are atomic (temp file + rename) and emit doubles with 17
// significant digits so identical runs produce byte-identical files.

void write_samples_csv(const std::filesystem::path& path, std::span<const ErrorSample> samples);
void write_summary_json(const std::filesystem::path& path, const std::string& model_name,
                        double horizon, std::span<const ErrorSample> samples);
void write_rotation_response_csv(const std::filesystem::path& path,
                                 std::span<const RotationBin> bins);
void write_error_grid_csv(const std::filesystem::path& path, const ErrorCommandGrid& grid);
void write_sweep_csv(const std::filesystem::path& path, const HorizonSweep& sweep);

}  // namespace skidkin
