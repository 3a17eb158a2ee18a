#include "skidkin/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const WheelCommand& cmd) {
  if (!std::isfinite(cmd.t) || !std::isfinite(cmd.omega_l) || !std::isfinite(cmd.omega_r)) {
    throw InvalidInputError("predict_twist: non-finite wheel command");
  }
}

// Virtual half-width as a function of the commanded curvature variable.
// The denominator 1 + beta2*sqrt(lambda) can cross zero; the result is
// clamped to [b/2, 100*b] to keep the model total over its input domain.
double roc_half_width(const RocBased& m, double lambda, PredictStats* stats) {
  const double y0_min = m.geom.b / 2.0;
  const double y0_max = 100.0 * m.geom.b;
  const double denom = 1.0 + m.beta2 * std::sqrt(lambda);
  double y0 = y0_min * (1.0 + m.beta1 / denom);
  if (!(y0 >= y0_min)) {  // also catches NaN from 0/0
    y0 = y0_min;
    if (stats) stats->y0_clamps.fetch_add(1, std::memory_order_relaxed);
  } else if (y0 > y0_max) {
    y0 = y0_max;
    if (stats) stats->y0_clamps.fetch_add(1, std::memory_order_relaxed);
  }
  return y0;
}

struct PredictVisitor {
  const WheelCommand& cmd;
  PredictStats* stats;

  Twist2D operator()(const IdealDiffDrive& m) const {
    const double r = m.geom.r;
    return Twist2D{r * (cmd.omega_l + cmd.omega_r) / 2.0, 0.0,
                   r * (cmd.omega_r - cmd.omega_l) / m.geom.b};
  }

  Twist2D operator()(const ExtendedDiffDriveSymmetric& m) const {
    const double ra = m.geom.r * m.alpha;
    return Twist2D{ra * (cmd.omega_l + cmd.omega_r) / 2.0, 0.0,
                   ra * (cmd.omega_r - cmd.omega_l) / m.b_hat};
  }

  Twist2D operator()(const ExtendedDiffDriveAsymmetric& m) const {
    const double s = m.geom.r / (m.y_l - m.y_r);
    const double wl = m.alpha_l * cmd.omega_l;
    const double wr = m.alpha_r * cmd.omega_r;
    return Twist2D{s * (-m.y_r * wl + m.y_l * wr), s * (m.x_v * wl - m.x_v * wr),
                   s * (-wl + wr)};
  }

  Twist2D operator()(const RocBased& m) const {
    const double ra = m.geom.r * m.alpha;
    if (cmd.omega_l == cmd.omega_r) {
      // lambda is undefined on straight lines and omega is exactly zero.
      return Twist2D{ra * cmd.omega_l, 0.0, 0.0};
    }
    const double lambda =
        std::abs((cmd.omega_r + cmd.omega_l) / (cmd.omega_r - cmd.omega_l));
    const double y0 = roc_half_width(m, lambda, stats);
    return Twist2D{ra * (cmd.omega_l + cmd.omega_r) / 2.0, 0.0,
                   ra * (cmd.omega_r - cmd.omega_l) / (2.0 * y0)};
  }

  Twist2D operator()(const FullLinear& m) const {
    const auto& g = m.gamma;
    return Twist2D{g[0] * cmd.omega_l + g[1] * cmd.omega_r,
                   g[2] * cmd.omega_l + g[3] * cmd.omega_r,
                   g[4] * cmd.omega_l + g[5] * cmd.omega_r};
  }
};

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Twist2D predict_twist(const KinematicModel& model, const WheelCommand& cmd,
                      PredictStats* stats) {
  check_finite(cmd);
  return std::visit(PredictVisitor{cmd, stats}, model);
}

IcrEstimate icr_positions(const Twist2D& twist, const WheelCommand& cmd, double alpha_l,
                          double alpha_r, double r) {
  if (std::abs(twist.omega) <= 1e-9) {
    throw DegenerateMotionError("icr_positions: |omega| <= 1e-9, ICR at infinity");
  }
  IcrEstimate icr;
  icr.x_v = -twist.vy / twist.omega;
  icr.y_v = twist.vx / twist.omega;
  icr.y_l = alpha_l * (r * cmd.omega_l - twist.vx) / twist.omega;
  icr.y_r = alpha_r * (r * cmd.omega_r - twist.vx) / twist.omega;
  return icr;
}

std::vector<double> param_vector(const KinematicModel& model) {
  return std::visit(
      [](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdealDiffDrive>) {
          return {};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          return {m.alpha, m.b_hat};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          return {m.alpha_l, m.alpha_r, m.x_v, m.y_l, m.y_r};
        } else if constexpr (std::is_same_v<T, RocBased>) {
          return {m.alpha, m.beta1, m.beta2};
        } else {
          return {m.gamma.begin(), m.gamma.end()};
        }
      },
      model);
}

std::vector<std::string> param_names(const KinematicModel& model) {
  return std::visit(
      [](const auto& m) -> std::vector<std::string> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdealDiffDrive>) {
          return {};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          return {"alpha", "b_hat"};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          return {"alpha_l", "alpha_r", "x_v", "y_l", "y_r"};
        } else if constexpr (std::is_same_v<T, RocBased>) {
          return {"alpha", "beta1", "beta2"};
        } else {
          return {"gamma11", "gamma12", "gamma21", "gamma22", "gamma31", "gamma32"};
        }
      },
      model);
}

ParamBounds param_bounds(const KinematicModel& model) {
  return std::visit(
      [](const auto& m) -> ParamBounds {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdealDiffDrive>) {
          return {{}, {}};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          return {{0.0, 0.0}, {1.0, kInf}};
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          return {{0.0, 0.0, -kInf, 0.0, -kInf}, {1.0, 1.0, kInf, kInf, 0.0}};
        } else if constexpr (std::is_same_v<T, RocBased>) {
          return {{0.0, -kInf, -kInf}, {1.0, kInf, kInf}};
        } else {
          return {{-kInf, -kInf, -kInf, -kInf, -kInf, 0.0},
                  {kInf, kInf, kInf, kInf, 0.0, kInf}};
        }
      },
      model);
}

std::size_t param_count(const KinematicModel& model) {
  return param_names(model).size();
}

KinematicModel with_params(const KinematicModel& model, std::span<const double> params) {
  const auto names = param_names(model);
  if (params.size() != names.size()) {
    std::ostringstream os;
    os << "with_params: " << variant_name(model) << " takes " << names.size()
       << " parameters, got " << params.size();
    throw InvalidParameterError(os.str());
  }
  const auto bounds = param_bounds(model);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(params[i]) || params[i] < bounds.lower[i] ||
        params[i] > bounds.upper[i]) {
      std::ostringstream os;
      os << "with_params: " << names[i] << "=" << format_value(params[i]) << " outside ["
         << format_value(bounds.lower[i]) << ", " << format_value(bounds.upper[i]) << "]";
      throw InvalidParameterError(os.str());
    }
  }

  KinematicModel out = model;
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          m.alpha = params[0];
          m.b_hat = params[1];
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          m.alpha_l = params[0];
          m.alpha_r = params[1];
          m.x_v = params[2];
          m.y_l = params[3];
          m.y_r = params[4];
        } else if constexpr (std::is_same_v<T, RocBased>) {
          m.alpha = params[0];
          m.beta1 = params[1];
          m.beta2 = params[2];
        } else if constexpr (std::is_same_v<T, FullLinear>) {
          for (std::size_t i = 0; i < 6; ++i) m.gamma[i] = params[i];
        }
      },
      out);
  return out;
}

std::string variant_name(const KinematicModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdealDiffDrive>) {
          return "ideal-dd";
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveSymmetric>) {
          return "ext-dd-sym";
        } else if constexpr (std::is_same_v<T, ExtendedDiffDriveAsymmetric>) {
          return "ext-dd-asym";
        } else if constexpr (std::is_same_v<T, RocBased>) {
          return "roc";
        } else {
          return "full-linear";
        }
      },
      model);
}

KinematicModel make_model(const std::string& variant, const ChassisGeometry& geom) {
  if (geom.r <= 0.0 || geom.b <= 0.0) {
    throw InvalidParameterError("make_model: chassis geometry requires r > 0 and b > 0");
  }
  if (variant == "ideal-dd") return IdealDiffDrive{geom};
  if (variant == "ext-dd-sym") return ExtendedDiffDriveSymmetric{geom, 1.0, geom.b};
  if (variant == "ext-dd-asym") {
    return ExtendedDiffDriveAsymmetric{geom, 1.0, 1.0, 0.0, geom.b / 2.0, -geom.b / 2.0};
  }
  if (variant == "roc") return RocBased{geom, 1.0, 0.0, 0.0};
  if (variant == "full-linear") {
    FullLinear m{geom};
    m.gamma = {geom.r / 2.0, geom.r / 2.0, 0.0, 0.0, -geom.r / geom.b, geom.r / geom.b};
    return m;
  }
  throw InvalidParameterError("make_model: unknown variant '" + variant + "'");
}

FullLinear full_linear_embedding(const ExtendedDiffDriveAsymmetric& m) {
  const double s = m.geom.r / (m.y_l - m.y_r);
  FullLinear out{m.geom};
  out.gamma = {s * -m.y_r * m.alpha_l, s * m.y_l * m.alpha_r,
               s * m.x_v * m.alpha_l,  s * -m.x_v * m.alpha_r,
               s * -m.alpha_l,         s * m.alpha_r};
  return out;
}

std::vector<Pose2D> rollout(const KinematicModel& model, const Pose2D& start,
                            std::span<const WheelCommand> commands, PredictStats* stats) {
  if (commands.size() < 2) {
    throw InvalidInputError("rollout: need at least 2 commands");
  }
  std::vector<Pose2D> poses;
  poses.reserve(commands.size());
  poses.push_back(start);
  Pose2D pose = start;
  for (std::size_t i = 1; i < commands.size(); ++i) {
    const double dt = commands[i].t - commands[i - 1].t;
    if (!(dt > 0.0)) {
      throw InvalidInputError("rollout: command timestamps must be strictly increasing");
    }
    pose = integrate(pose, predict_twist(model, commands[i - 1], stats), dt);
    poses.push_back(pose);
  }
  return poses;
}

Pose2D rollout_final_pose(const KinematicModel& model, const Pose2D& start,
                          std::span<const WheelCommand> commands, PredictStats* stats) {
  if (commands.size() < 2) {
    throw InvalidInputError("rollout: need at least 2 commands");
  }
  Pose2D pose = start;
  for (std::size_t i = 1; i < commands.size(); ++i) {
    const double dt = commands[i].t - commands[i - 1].t;
    if (!(dt > 0.0)) {
      throw InvalidInputError("rollout: command timestamps must be strictly increasing");
    }
    pose = integrate(pose, predict_twist(model, commands[i - 1], stats), dt);
  }
  return pose;
}

}  // namespace skidkin
