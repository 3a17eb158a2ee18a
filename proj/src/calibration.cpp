#include "skidkin/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Matrix3d inverse_weight(const LossConfig& cfg) {
  Eigen::Matrix3d sigma;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) sigma(i, j) = cfg.sigma[static_cast<std::size_t>(3 * i + j)];
  }
  if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
    throw InvalidInputError("loss: sigma must be symmetric");
  }
  const Eigen::LLT<Eigen::Matrix3d> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw InvalidInputError("loss: sigma must be positive definite");
  }
  return llt.solve(Eigen::Matrix3d::Identity());
}

double segment_term(const KinematicModel& model, const Segment& seg,
                    const Eigen::Matrix3d& sigma_inv) {
  Pose2D predicted;
  try {
    predicted = rollout_final_pose(model, seg.start_pose, seg.commands);
  } catch (const InvalidInputError&) {
    // Degenerate parameter combinations (e.g. a collapsed ICR spread) blow
    // up the twist; treat them as infinitely bad rather than aborting.
    return kInf;
  }
  const Eigen::Vector3d e(seg.end_pose.x - predicted.x, seg.end_pose.y - predicted.y,
                          angle_difference(seg.end_pose.theta, predicted.theta));
  const double term = e.dot(sigma_inv * e);
  return std::isfinite(term) ? term : kInf;
}

// --- Bounded Nelder-Mead -----------------------------------------------------

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

std::vector<double> project(std::vector<double> x, const Box& box) {
  for (std::size_t d = 0; d < x.size(); ++d) {
    x[d] = std::min(std::max(x[d], box.lo[d]), box.hi[d]);
  }
  return x;
}

struct SimplexResult {
  std::vector<double> x;
  double f = kInf;
  long evals = 0;
  bool converged = false;
};

template <typename Objective>
SimplexResult nelder_mead(const Objective& objective, const std::vector<double>& start,
                          const std::vector<double>& steps, const Box& box, int max_evals,
                          double tol) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> xs;
  std::vector<double> fs;
  long evals = 0;

  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return objective(x);
  };

  xs.push_back(project(start, box));
  for (std::size_t d = 0; d < n; ++d) {
    auto v = xs[0];
    // Step inward when the start sits on a bound, so the initial simplex
    // keeps full rank after projection.
    double step = steps[d];
    if (v[d] + step > box.hi[d]) step = -std::abs(step);
    if (v[d] + step < box.lo[d]) step = std::abs(step);
    v[d] += step;
    xs.push_back(project(std::move(v), box));
  }
  for (const auto& x : xs) fs.push_back(eval(x));

  std::vector<std::size_t> order(n + 1);
  SimplexResult result;
  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];  // n >= 1, callers train >= 1 param

    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        size = std::max(size, std::abs(xs[i][d] - xs[best][d]));
      }
    }
    if (size < tol) {
      result.converged = true;
      break;
    }
    if (evals >= max_evals) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) {
        x[d] = centroid[d] + coef * (centroid[d] - xs[worst][d]);
      }
      return project(std::move(x), box);
    };

    const auto reflected = along(1.0);
    const double f_reflected = eval(reflected);
    if (f_reflected < fs[best]) {
      const auto expanded = along(2.0);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
    } else if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < fs[worst];
      const auto contracted = along(outside ? 0.5 : -0.5);
      const double f_contracted = eval(contracted);
      if ((outside && f_contracted <= f_reflected) || (!outside && f_contracted < fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = f_contracted;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t d = 0; d < n; ++d) {
            xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
          }
          xs[i] = project(std::move(xs[i]), box);
          fs[i] = eval(xs[i]);
        }
      }
    }
  }

  const auto best_it = std::min_element(fs.begin(), fs.end());
  result.x = xs[static_cast<std::size_t>(best_it - fs.begin())];
  result.f = *best_it;
  result.evals = evals;
  return result;
}

// Finite ranges used only to place multi-start points and size the initial
// simplex; the search itself honors the true (possibly unbounded) box.
Box sampling_box(const KinematicModel& model) {
  const double r = std::visit([](const auto& m) { return m.geom.r; }, model);
  const double b = std::visit([](const auto& m) { return m.geom.b; }, model);
  return std::visit(
      [&](const auto& m) -> Box {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          return {{0.0, 0.2 * b}, {1.0, 6.0 * b}};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          return {{0.0, 0.0, -4.0 * b, 0.1 * b, -6.0 * b},
                  {1.0, 1.0, 4.0 * b, 6.0 * b, -0.1 * b}};
        } else if constexpr (std::is_same_v<T, RocBased>) {
          return {{0.0, -10.0, -3.0}, {1.0, 10.0, 3.0}};
        } else if constexpr (std::is_same_v<T, FullLinear>) {
          return {{-2.0 * r, -2.0 * r, -2.0 * r, -2.0 * r, -2.0 * r, 0.0},
                  {2.0 * r, 2.0 * r, 2.0 * r, 2.0 * r, 0.0, 2.0 * r}};
        } else {
          return {{}, {}};
        }
      },
      model);
}

std::vector<std::vector<double>> latin_hypercube(std::mt19937_64& rng, const Box& box,
                                                 std::size_t count) {
  const std::size_t dims = box.lo.size();
  std::vector<std::vector<double>> points(count, std::vector<double>(dims));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> strata(count);
  for (std::size_t d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    const double width = (box.hi[d] - box.lo[d]) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      points[i][d] = box.lo[d] + (static_cast<double>(strata[i]) + unit(rng)) * width;
    }
  }
  return points;
}

}  // namespace

double loss(const KinematicModel& model, std::span<const Segment> segments,
            const LossConfig& cfg) {
  if (segments.empty()) {
    throw InvalidInputError("loss: no segments");
  }
  const Eigen::Matrix3d sigma_inv = inverse_weight(cfg);
  double total = 0.0;
  for (const auto& seg : segments) {
    total += segment_term(model, seg, sigma_inv);
    if (!std::isfinite(total)) return kInf;
  }
  return total;
}

CalibrationReport calibrate(const KinematicModel& initial, std::span<const Segment> segments,
                            const LossConfig& loss_cfg, const OptimizerConfig& opt_cfg) {
  const std::size_t dims = param_count(initial);
  if (dims == 0) {
    throw NothingToTrainError("calibrate: " + variant_name(initial) +
                              " has no trainable parameters");
  }
  if (segments.empty()) {
    throw InvalidInputError("calibrate: no segments");
  }
  const Eigen::Matrix3d sigma_inv = inverse_weight(loss_cfg);

  const ParamBounds bounds = param_bounds(initial);
  const Box box{bounds.lower, bounds.upper};
  const Box init_box = sampling_box(initial);

  const auto objective = [&](const std::vector<double>& x) {
    for (const double v : x) {
      if (!std::isfinite(v)) return kInf;
    }
    const KinematicModel candidate = with_params(initial, x);
    double total = 0.0;
    for (const auto& seg : segments) {
      total += segment_term(candidate, seg, sigma_inv);
      if (!std::isfinite(total)) return kInf;
    }
    return total;
  };

  // Nominal start: the ideal differential-drive embedding of this variant,
  // so the fit can never end up worse than untrained physics.
  const ChassisGeometry geom{std::visit([](const auto& m) { return m.geom; }, initial)};
  std::vector<std::vector<double>> starts;
  starts.push_back(param_vector(make_model(variant_name(initial), geom)));

  std::mt19937_64 rng(opt_cfg.seed);
  const std::size_t extra =
      opt_cfg.restarts > 1 ? static_cast<std::size_t>(opt_cfg.restarts - 1) : 0;
  if (extra > 0) {
    for (auto& p : latin_hypercube(rng, init_box, extra)) {
      starts.push_back(std::move(p));
    }
  }

  std::vector<double> steps(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    steps[d] = 0.1 * (init_box.hi[d] - init_box.lo[d]);
  }

  CalibrationReport report;
  report.seed = opt_cfg.seed;
  report.restarts_used = static_cast<int>(starts.size());
  double best_f = kInf;
  std::vector<double> best_x;
  bool best_converged = false;
  for (const auto& start : starts) {
    const SimplexResult local = nelder_mead(objective, start, steps, box,
                                            opt_cfg.max_evals_per_start,
                                            opt_cfg.simplex_tolerance);
    report.iterations += local.evals;
    if (local.f < best_f) {  // strict: ties keep the earlier start
      best_f = local.f;
      best_x = local.x;
      best_converged = local.converged;
    }
  }

  report.model = with_params(initial, best_x);
  report.final_loss = best_f;
  report.converged = best_converged;
  return report;
}

}  // namespace skidkin
