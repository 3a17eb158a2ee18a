#include "skidkin/models.hpp"

#include <cmath>
#include <random>
#include <string>

#include <doctest.h>

#include "skidkin/errors.hpp"
#include "test_support.hpp"

using namespace skidkin;
using namespace skidkin::testing;

namespace {
const ChassisGeometry kWarthog{0.3, 1.2};
}

TEST_CASE("ideal differential drive twist") {
  const KinematicModel m = IdealDiffDrive{kWarthog};
  const Twist2D forward = predict_twist(m, {0, 2, 2});
  CHECK(forward.vx == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(forward.vy == 0.0);
  CHECK(forward.omega == doctest::Approx(0.0).epsilon(1e-12));

  const Twist2D spin = predict_twist(m, {0, -1, 1});
  CHECK(spin.vx == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(spin.omega == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("symmetric extended model twist, trained fixtures") {
  // snow fit
  const KinematicModel snow = ExtendedDiffDriveSymmetric{kWarthog, 0.86, 3.08};
  const Twist2D t = predict_twist(snow, {0, 0, 2});
  CHECK(t.vx == doctest::Approx(0.3 * 0.86 * (0 + 2) / 2).epsilon(1e-12));
  CHECK(t.vx == doctest::Approx(0.258).epsilon(1e-12));
  CHECK(t.vy == 0.0);
  CHECK(t.omega == doctest::Approx(0.3 * 0.86 * 2 / 3.08).epsilon(1e-12));
  CHECK(t.omega == doctest::Approx(0.16753246753246753).epsilon(1e-12));

  // concrete fit
  const KinematicModel concrete = ExtendedDiffDriveSymmetric{kWarthog, 0.94, 4.46};
  const Twist2D u = predict_twist(concrete, {0, 1.5, -0.5});
  CHECK(u.vx == doctest::Approx(0.141).epsilon(1e-12));
  CHECK(u.omega == doctest::Approx(-0.126457399103139).epsilon(1e-12));
}

TEST_CASE("asymmetric extended model twist, trained fixtures") {
  const KinematicModel snow =
      ExtendedDiffDriveAsymmetric{kWarthog, 0.81, 0.84, -2.71, 3.00, -3.85};
  const Twist2D t = predict_twist(snow, {0, 2, 2});
  CHECK(t.vx == doctest::Approx(0.4938832116788322).epsilon(1e-12));
  CHECK(t.vy == doctest::Approx(0.007121167883211653).epsilon(1e-12));
  CHECK(t.omega == doctest::Approx(0.002627737226277365).epsilon(1e-12));

  const KinematicModel concrete =
      ExtendedDiffDriveAsymmetric{kWarthog, 0.90, 0.92, -2.57, 4.66, -5.00};
  const Twist2D u = predict_twist(concrete, {0, -1, 2});
  CHECK(u.vx == doctest::Approx(0.12653416149068325).epsilon(1e-12));
  CHECK(u.vy == doctest::Approx(0.2186894409937888).epsilon(1e-12));
  CHECK(u.omega == doctest::Approx(0.08509316770186336).epsilon(1e-12));
}

TEST_CASE("ROC-based model twist, trained fixtures") {
  const KinematicModel snow = RocBased{kWarthog, 0.80, 1.36, -0.18};
  const Twist2D t = predict_twist(snow, {0, 1, 3});
  // lambda = 2, y0 = 0.6 * (1 + 1.36 / (1 - 0.18 * sqrt(2)))
  const double y0 = 0.6 * (1.0 + 1.36 / (1.0 - 0.18 * std::sqrt(2.0)));
  CHECK(y0 == doctest::Approx(1.6946532164685204).epsilon(1e-12));
  CHECK(t.vx == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(t.vy == 0.0);
  CHECK(t.omega == doctest::Approx(0.3 * 0.80 * 2.0 / (2.0 * y0)).epsilon(1e-12));
  CHECK(t.omega == doctest::Approx(0.1416218950683815).epsilon(1e-12));

  const KinematicModel concrete = RocBased{kWarthog, 0.91, 42.73, 11.09};
  const Twist2D u = predict_twist(concrete, {0, 1, 3});
  CHECK(u.vx == doctest::Approx(0.546).epsilon(1e-12));
  CHECK(u.omega == doctest::Approx(0.12776615616019563).epsilon(1e-12));
}

TEST_CASE("full linear model twist, trained fixture") {
  const KinematicModel snow = FullLinear{kWarthog, {0.46, 0.36, -0.31, 0.34, -0.13, 0.12}};
  const Twist2D t = predict_twist(snow, {0, 1, 1});
  CHECK(t.vx == doctest::Approx(0.82).epsilon(1e-12));
  CHECK(t.vy == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(t.omega == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("non-finite commands are rejected") {
  const KinematicModel m = IdealDiffDrive{kWarthog};
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(predict_twist(m, {0, inf, 0}), InvalidInputError);
  CHECK_THROWS_AS(predict_twist(m, {0, 0, std::nan("")}), InvalidInputError);
}

TEST_CASE("ROC-based straight line bypasses the curvature relation") {
  const KinematicModel m = RocBased{kWarthog, 0.8, 1.36, -0.18};
  PredictStats stats;
  const Twist2D t = predict_twist(m, {0, 1.7, 1.7}, &stats);
  CHECK(t.vx == doctest::Approx(0.3 * 0.8 * 1.7).epsilon(1e-15));
  CHECK(t.vy == 0.0);
  CHECK(t.omega == 0.0);
  CHECK(stats.y0_clamps.load() == 0);
}

TEST_CASE("ROC-based half-width clamps on both sides of the singular curvature") {
  // snow parameters: the denominator 1 + beta2*sqrt(lambda) crosses zero
  // near lambda ~ 30.86
  const KinematicModel m = RocBased{kWarthog, 0.80, 1.36, -0.18};
  PredictStats stats;

  // just below the singularity: huge positive y0, clamped to 100*b
  const Twist2D wide = predict_twist(m, {0, 1.0, 1.0674}, &stats);
  CHECK(stats.y0_clamps.load() == 1);
  CHECK(wide.omega == doctest::Approx(0.3 * 0.80 * 0.0674 / (2.0 * 120.0)).epsilon(1e-9));

  // just above: negative y0, clamped to b/2
  const Twist2D tight = predict_twist(m, {0, 1.0, 1.0662}, &stats);
  CHECK(stats.y0_clamps.load() == 2);
  CHECK(tight.omega == doctest::Approx(0.3 * 0.80 * 0.0662 / (2.0 * 0.6)).epsilon(1e-9));
}

TEST_CASE("reduction: symmetric with alpha=1, b_hat=b equals ideal") {
  const KinematicModel sym = ExtendedDiffDriveSymmetric{kWarthog, 1.0, kWarthog.b};
  const KinematicModel ideal = IdealDiffDrive{kWarthog};
  std::mt19937_64 rng(101);
  for (const auto& cmd : random_commands(rng, 1000)) {
    CHECK(twist_distance(predict_twist(sym, cmd), predict_twist(ideal, cmd)) < 1e-12);
  }
}

TEST_CASE("reduction: asymmetric collapses to symmetric") {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> alpha_dist(0.1, 1.0);
  std::uniform_real_distribution<double> width_dist(0.5, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = alpha_dist(rng);
    const double b_hat = width_dist(rng);
    const KinematicModel asym =
        ExtendedDiffDriveAsymmetric{kWarthog, alpha, alpha, 0.0, b_hat / 2, -b_hat / 2};
    const KinematicModel sym = ExtendedDiffDriveSymmetric{kWarthog, alpha, b_hat};
    for (const auto& cmd : random_commands(rng, 100)) {
      CHECK(twist_distance(predict_twist(asym, cmd), predict_twist(sym, cmd)) < 1e-12);
    }
  }
}

TEST_CASE("reduction: ROC-based with beta1=0 collapses to symmetric with b_hat=b") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> alpha_dist(0.1, 1.0);
  std::uniform_real_distribution<double> beta2_dist(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = alpha_dist(rng);
    const KinematicModel roc = RocBased{kWarthog, alpha, 0.0, beta2_dist(rng)};
    const KinematicModel sym = ExtendedDiffDriveSymmetric{kWarthog, alpha, kWarthog.b};
    for (const auto& cmd : random_commands(rng, 100)) {
      if (cmd.omega_l == cmd.omega_r) continue;
      PredictStats stats;
      const Twist2D got = predict_twist(roc, cmd, &stats);
      if (stats.y0_clamps.load() > 0) continue;
      CHECK(twist_distance(got, predict_twist(sym, cmd)) < 1e-12);
    }
  }
}

TEST_CASE("embedding: every asymmetric model has an exact full-linear twin") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> alpha_dist(0.1, 1.0);
  std::uniform_real_distribution<double> xv_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> y_dist(0.3, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ExtendedDiffDriveAsymmetric asym{kWarthog,       alpha_dist(rng), alpha_dist(rng),
                                           xv_dist(rng),   y_dist(rng),     -y_dist(rng)};
    const KinematicModel linear = full_linear_embedding(asym);
    const KinematicModel original = asym;
    for (const auto& cmd : random_commands(rng, 100)) {
      CHECK(twist_distance(predict_twist(original, cmd), predict_twist(linear, cmd)) < 1e-12);
    }
  }
}

TEST_CASE("linearity and positive homogeneity in the commands") {
  std::mt19937_64 rng(105);
  const std::vector<KinematicModel> linear_models = {
      IdealDiffDrive{kWarthog},
      ExtendedDiffDriveSymmetric{kWarthog, 0.86, 3.08},
      ExtendedDiffDriveAsymmetric{kWarthog, 0.81, 0.84, -2.71, 3.0, -3.85},
      FullLinear{kWarthog, {0.46, 0.36, -0.31, 0.34, -0.13, 0.12}},
  };
  std::uniform_real_distribution<double> scale_dist(0.1, 4.0);
  for (const auto& model : linear_models) {
    for (const auto& a : random_commands(rng, 50)) {
      const auto b = random_commands(rng, 1)[0];
      const Twist2D ta = predict_twist(model, a);
      const Twist2D tb = predict_twist(model, b);
      const Twist2D tsum =
          predict_twist(model, {0, a.omega_l + b.omega_l, a.omega_r + b.omega_r});
      CHECK(std::abs(tsum.vx - (ta.vx + tb.vx)) < 1e-12);
      CHECK(std::abs(tsum.vy - (ta.vy + tb.vy)) < 1e-12);
      CHECK(std::abs(tsum.omega - (ta.omega + tb.omega)) < 1e-12);
    }
  }

  const KinematicModel roc = RocBased{kWarthog, 0.8, 1.36, -0.18};
  for (const auto& cmd : random_commands(rng, 200)) {
    const double s = scale_dist(rng);
    const Twist2D one = predict_twist(roc, cmd);
    const Twist2D scaled = predict_twist(roc, {0, s * cmd.omega_l, s * cmd.omega_r});
    CHECK(std::abs(scaled.vx - s * one.vx) < 1e-9);
    CHECK(std::abs(scaled.vy - s * one.vy) < 1e-9);
    CHECK(std::abs(scaled.omega - s * one.omega) < 1e-9);
  }
}

TEST_CASE("zero command produces zero twist for every variant") {
  const std::vector<KinematicModel> models = {
      IdealDiffDrive{kWarthog},
      ExtendedDiffDriveSymmetric{kWarthog, 0.86, 3.08},
      ExtendedDiffDriveAsymmetric{kWarthog, 0.81, 0.84, -2.71, 3.0, -3.85},
      RocBased{kWarthog, 0.8, 1.36, -0.18},
      FullLinear{kWarthog, {0.46, 0.36, -0.31, 0.34, -0.13, 0.12}},
  };
  for (const auto& model : models) {
    const Twist2D t = predict_twist(model, {0, 0, 0});
    CHECK(t.vx == 0.0);
    CHECK(t.vy == 0.0);
    CHECK(t.omega == 0.0);
  }
}

TEST_CASE("ICR positions from twist and command") {
  SUBCASE("body ICR on the turn circle, left wheel at its own center") {
    const Twist2D twist{1.0, 0.0, 0.5};
    const WheelCommand cmd{0, 1.0 / 0.3, 2.0};
    const IcrEstimate icr = icr_positions(twist, cmd, 1.0, 1.0, 0.3);
    CHECK(icr.x_v == doctest::Approx(0.0));
    CHECK(icr.y_v == doctest::Approx(2.0));
    CHECK(icr.y_l == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("zero-radius turn") {
    const Twist2D twist{0.0, 0.0, 1.0};
    const WheelCommand cmd{0, -2.0, 2.0};
    const IcrEstimate icr = icr_positions(twist, cmd, 1.0, 1.0, 0.3);
    CHECK(icr.x_v == doctest::Approx(0.0));
    CHECK(icr.y_v == doctest::Approx(0.0));
    CHECK(icr.y_l == doctest::Approx(-0.6));
    CHECK(icr.y_r == doctest::Approx(0.6));
  }

  SUBCASE("near-straight motion is degenerate") {
    CHECK_THROWS_AS(icr_positions(Twist2D{1.0, 0.0, 1e-12}, WheelCommand{}, 1, 1, 0.3),
                    DegenerateMotionError);
  }
}

TEST_CASE("parameter vector round trip and arity") {
  const std::vector<KinematicModel> models = {
      IdealDiffDrive{kWarthog},
      ExtendedDiffDriveSymmetric{kWarthog, 0.86, 3.08},
      ExtendedDiffDriveAsymmetric{kWarthog, 0.81, 0.84, -2.71, 3.0, -3.85},
      RocBased{kWarthog, 0.8, 1.36, -0.18},
      FullLinear{kWarthog, {0.46, 0.36, -0.31, 0.34, -0.13, 0.12}},
  };
  const std::vector<std::size_t> arity = {0, 2, 5, 3, 6};
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto params = param_vector(models[i]);
    REQUIRE(params.size() == arity[i]);
    REQUIRE(param_names(models[i]).size() == arity[i]);
    if (arity[i] == 0) continue;
    const KinematicModel rebuilt = with_params(models[i], params);
    CHECK(param_vector(rebuilt) == params);
    std::mt19937_64 rng(106);
    for (const auto& cmd : random_commands(rng, 20)) {
      CHECK(twist_distance(predict_twist(rebuilt, cmd), predict_twist(models[i], cmd)) == 0.0);
    }
  }
}

TEST_CASE("with_params validates arity and bounds") {
  const KinematicModel sym = ExtendedDiffDriveSymmetric{kWarthog, 0.86, 3.08};
  CHECK_THROWS_AS(with_params(sym, std::vector<double>{0.5}), InvalidParameterError);

  try {
    with_params(sym, std::vector<double>{1.2, 3.0});
    FAIL("expected InvalidParameterError");
  } catch (const InvalidParameterError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }

  CHECK_THROWS_AS(with_params(sym, std::vector<double>{0.9, -0.1}), InvalidParameterError);
  const KinematicModel linear = make_model("full-linear", kWarthog);
  CHECK_THROWS_AS(with_params(linear, std::vector<double>{0, 0, 0, 0, 0.1, 0}),
                  InvalidParameterError);
  CHECK_THROWS_AS(
      with_params(sym, std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 1.0}),
      InvalidParameterError);
}

TEST_CASE("make_model names and geometry checks") {
  for (const auto* name : {"ideal-dd", "ext-dd-sym", "ext-dd-asym", "roc", "full-linear"}) {
    CHECK(variant_name(make_model(name, kWarthog)) == name);
  }
  CHECK_THROWS_AS(make_model("warp-drive", kWarthog), InvalidParameterError);
  CHECK_THROWS_AS(make_model("ideal-dd", ChassisGeometry{0.0, 1.2}), InvalidParameterError);
  CHECK_THROWS_AS(make_model("ideal-dd", ChassisGeometry{0.3, -1.0}), InvalidParameterError);

  // the default full-linear is the ideal differential drive in disguise
  const KinematicModel ideal = IdealDiffDrive{kWarthog};
  const KinematicModel linear = make_model("full-linear", kWarthog);
  std::mt19937_64 rng(107);
  for (const auto& cmd : random_commands(rng, 100)) {
    CHECK(twist_distance(predict_twist(ideal, cmd), predict_twist(linear, cmd)) < 1e-12);
  }
}
