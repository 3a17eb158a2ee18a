#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "skidkin/models.hpp"
#include "skidkin/segmentation.hpp"

namespace skidkin {

// Final-pose residual weighting. Row-major 3x3, must be symmetric positive
// definite; identity by default so meters and radians mix unweighted.
struct LossConfig {
  std::array<double, 9> sigma = {1, 0, 0, 0, 1, 0, 0, 0, 1};
};

struct OptimizerConfig {
  int restarts = 16;           // multi-start count, nominal start included
  int max_evals_per_start = 2000;
  double simplex_tolerance = 1e-8;  // vertex-spread convergence size
  std::uint64_t seed = 0;
};

struct CalibrationReport {
  KinematicModel model;     // fitted
  double final_loss = 0.0;
  long iterations = 0;      // loss evaluations across all starts
  int restarts_used = 0;
  bool converged = false;   // the winning start met the simplex tolerance
  std::uint64_t seed = 0;
};

// Sum over segments of the squared Mahalanobis distance between the
// ground-truth and dead-reckoned final pose, angular residual wrapped to
// (-pi, pi]. Returns +inf when a rollout degenerates to non-finite values.
// Throws InvalidInputError on empty segments.
double loss(const KinematicModel& model, std::span<const Segment> segments,
            const LossConfig& cfg = {});

// Fits the variant's parameters by bounded multi-start Nelder-Mead: one
// nominal start at the ideal differential-drive embedding plus seeded
// Latin-hypercube starts, each refined by a simplex search whose points are
// projected onto the bounds box. Deterministic for a given seed; ties
// between starts break toward the lower start index.
// Throws NothingToTrainError for IdealDiffDrive and InvalidInputError on
// empty segments.
CalibrationReport calibrate(const KinematicModel& initial, std::span<const Segment> segments,
                            const LossConfig& loss_cfg = {}, const OptimizerConfig& opt_cfg = {});

}  // namespace skidkin
