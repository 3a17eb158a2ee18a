#include "skidkin/geometry.hpp"

#include <cmath>

#include "skidkin/errors.hpp"

namespace skidkin {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
// Below this |omega * dt| the arc is integrated with its series expansion.
constexpr double kStraightLineThreshold = 1e-9;
}  // namespace

double normalize_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a <= -kPi) {
    a += kTwoPi;
  } else if (a > kPi) {
    a -= kTwoPi;
  }
  return a;
}

double angle_difference(double to, double from) { return normalize_angle(to - from); }

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return Pose2D{a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y,
                normalize_angle(a.theta + b.theta)};
}

Pose2D inverse(const Pose2D& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return Pose2D{-(c * p.x + s * p.y), -(-s * p.x + c * p.y), normalize_angle(-p.theta)};
}

Pose2D between(const Pose2D& a, const Pose2D& b) { return compose(inverse(a), b); }

Pose2D integrate(const Pose2D& pose, const Twist2D& twist, double dt) {
  if (!std::isfinite(twist.vx) || !std::isfinite(twist.vy) || !std::isfinite(twist.omega)) {
    throw InvalidInputError("integrate: non-finite twist");
  }
  if (!std::isfinite(dt) || dt < 0.0) {
    throw InvalidInputError("integrate: dt must be finite and non-negative");
  }

  const double phi = twist.omega * dt;
  double dx, dy;
  if (std::abs(phi) < kStraightLineThreshold) {
    // Second-order expansion of the arc displacement, continuous at phi = 0.
    dx = dt * (twist.vx * (1.0 - phi * phi / 6.0) - twist.vy * (phi / 2.0));
    dy = dt * (twist.vx * (phi / 2.0) + twist.vy * (1.0 - phi * phi / 6.0));
  } else {
    const double sin_phi = std::sin(phi);
    const double one_minus_cos = 1.0 - std::cos(phi);
    dx = (twist.vx * sin_phi - twist.vy * one_minus_cos) / twist.omega;
    dy = (twist.vx * one_minus_cos + twist.vy * sin_phi) / twist.omega;
  }
  return compose(pose, Pose2D{dx, dy, phi});
}

}  // namespace skidkin
