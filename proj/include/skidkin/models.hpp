#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skidkin/geometry.hpp"

namespace skidkin {

// One timestamped pair of commanded wheel angular velocities.
struct WheelCommand {
  double t = 0.0;        // s
  double omega_l = 0.0;  // rad/s
  double omega_r = 0.0;  // rad/s
};

// Fixed, measurable chassis properties shared by the physical models.
struct ChassisGeometry {
  double r = 0.3;  // wheel radius, m
  double b = 1.2;  // vehicle width, m
};

// --- The five kinematic model variants -------------------------------------
//
// Each variant owns its trained parameter vector; the geometry (r, b) is a
// fixed property of the chassis, not a trained quantity. Parameter ordering
// in vectors is documented next to each struct and is what param_vector()
// and with_params() use.

// Pure rolling differential drive. No trained parameters.
struct IdealDiffDrive {
  ChassisGeometry geom;
};

// Symmetric ICR pair at +-b_hat/2 with a common slip factor.
// Parameter order: [alpha, b_hat].
struct ExtendedDiffDriveSymmetric {
  ChassisGeometry geom;
  double alpha = 1.0;  // slip, in [0, 1]
  double b_hat = 1.2;  // virtual width 2*y0, m, in [0, inf)
};

// One ICR per wheel side plus the body ICR x-offset.
// Parameter order: [alpha_l, alpha_r, x_v, y_l, y_r].
struct ExtendedDiffDriveAsymmetric {
  ChassisGeometry geom;
  double alpha_l = 1.0;  // in [0, 1]
  double alpha_r = 1.0;  // in [0, 1]
  double x_v = 0.0;      // m
  double y_l = 0.6;      // m, in [0, inf)
  double y_r = -0.6;     // m, in (-inf, 0]
};

// Symmetric model whose virtual half-width y0 tracks the commanded radius
// of curvature. Parameter order: [alpha, beta1, beta2].
struct RocBased {
  ChassisGeometry geom;
  double alpha = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
};

// Unconstrained 3x2 twist map, row-major [vx_l, vx_r; vy_l, vy_r; w_l, w_r].
// Parameter order: [g11, g12, g21, g22, g31, g32].
struct FullLinear {
  ChassisGeometry geom;
  std::array<double, 6> gamma = {0, 0, 0, 0, 0, 0};
};

using KinematicModel = std::variant<IdealDiffDrive, ExtendedDiffDriveSymmetric,
                                    ExtendedDiffDriveAsymmetric, RocBased, FullLinear>;

// Estimated instantaneous centers of rotation of the body and of each wheel
// side; all three share the same x coordinate.
struct IcrEstimate {
  double x_v = 0.0;  // common x, m
  double y_v = 0.0;  // body ICR y, m
  double y_l = 0.0;  // left-side ICR y, m
  double y_r = 0.0;  // right-side ICR y, m
};

// Out-of-band prediction diagnostics, safe to share across threads.
struct PredictStats {
  std::atomic<std::uint64_t> y0_clamps{0};
};

// Box constraints for a variant's parameter vector; +-inf where unbounded.
struct ParamBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Body twist J(k) * [omega_l, omega_r]^T for any variant. The ROC-based
// variant computes its virtual half-width from the commanded curvature and
// clamps it to [b/2, 100*b]; clamps are counted in `stats` when given.
// Throws InvalidInputError on non-finite commands.
Twist2D predict_twist(const KinematicModel& model, const WheelCommand& cmd,
                      PredictStats* stats = nullptr);

// ICR positions recovered from an observed twist and the matching command.
// Throws DegenerateMotionError when |twist.omega| <= 1e-9.
IcrEstimate icr_positions(const Twist2D& twist, const WheelCommand& cmd,
                          double alpha_l, double alpha_r, double r);

// Trained parameters in documented order (empty for IdealDiffDrive).
std::vector<double> param_vector(const KinematicModel& model);

// Copy of `model` with its trained parameters replaced. Throws
// InvalidParameterError on wrong arity or out-of-bounds values, naming the
// offending entry.
KinematicModel with_params(const KinematicModel& model, std::span<const double> params);

// Bounds box matching param_vector() ordering.
ParamBounds param_bounds(const KinematicModel& model);

// Parameter names matching param_vector() ordering.
std::vector<std::string> param_names(const KinematicModel& model);

std::size_t param_count(const KinematicModel& model);

// Stable identifier used by files and the CLI: "ideal-dd", "ext-dd-sym",
// "ext-dd-asym", "roc", "full-linear".
std::string variant_name(const KinematicModel& model);

// Default-constructed variant of the given name with the given geometry.
// Throws InvalidParameterError on unknown names.
KinematicModel make_model(const std::string& variant, const ChassisGeometry& geom);

// The exact FullLinear equivalent of an asymmetric extended model (its 3x2
// product expanded entry by entry).
FullLinear full_linear_embedding(const ExtendedDiffDriveAsymmetric& m);

// Dead-reckons the model from `start` across a command sequence with
// zero-order hold between timestamps. Returns one pose per command
// timestamp; the first equals `start`. Throws InvalidInputError on fewer
// than two commands or non-increasing timestamps.
std::vector<Pose2D> rollout(const KinematicModel& model, const Pose2D& start,
                            std::span<const WheelCommand> commands,
                            PredictStats* stats = nullptr);

// Same propagation as rollout() but keeps only the final pose.
Pose2D rollout_final_pose(const KinematicModel& model, const Pose2D& start,
                          std::span<const WheelCommand> commands,
                          PredictStats* stats = nullptr);

}  // namespace skidkin
