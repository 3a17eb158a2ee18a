#pragma once

namespace skidkin {

// Planar rigid-body pose. theta is kept in (-pi, pi] by every operation
// that produces a pose.
struct Pose2D {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

// Body-frame velocity: longitudinal, lateral, yaw rate.
struct Twist2D {
  double vx = 0.0;     // m/s
  double vy = 0.0;     // m/s
  double omega = 0.0;  // rad/s

  friend bool operator==(const Twist2D&, const Twist2D&) = default;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

// Shortest signed arc from `from` to `to`, in (-pi, pi].
double angle_difference(double to, double from);

// Rigid-motion composition a * b: pose b expressed in a's frame.
Pose2D compose(const Pose2D& a, const Pose2D& b);

// Relative pose a^-1 * b, so that compose(a, between(a, b)) == b.
Pose2D between(const Pose2D& a, const Pose2D& b);

// Inverse pose, compose(p, inverse(p)) == identity.
Pose2D inverse(const Pose2D& p);

// Propagates `pose` by holding `twist` constant for dt seconds. Uses the
// closed-form circular-arc solution; below |omega * dt| < 1e-9 the
// second-order series keeps the straight-line limit continuous.
// Throws InvalidInputError on non-finite twist or dt, or dt < 0.
Pose2D integrate(const Pose2D& pose, const Twist2D& twist, double dt);

}  // namespace skidkin
