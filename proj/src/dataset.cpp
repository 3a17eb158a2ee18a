#include "skidkin/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "internal/text_io.hpp"
#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

using detail::format_double;
using detail::parse_double;
using detail::split;
using detail::trim;

constexpr double kCommandRateHz = 20.0;
constexpr int kPoseDownsample = 2;  // 20 Hz commands -> 10 Hz ground truth
constexpr double kMinOverlapSeconds = 1.0;

struct CsvTable {
  std::vector<std::vector<double>> rows;
};

CsvTable load_csv(const std::filesystem::path& path, const std::string& expected_header) {
  const std::string content = detail::read_file(path);
  std::istringstream in(content);
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) {
    throw EmptyLogError("'" + path.string() + "': empty log");
  }
  ++line_no;
  if (std::string(trim(line)) != expected_header) {
    throw ParseError("'" + path.string() + "' line 1: expected header '" + expected_header +
                     "', got '" + std::string(trim(line)) + "'");
  }
  const std::size_t columns = split(expected_header, ',').size();

  CsvTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    const std::string context = "'" + path.string() + "' line " + std::to_string(line_no);
    if (fields.size() != columns) {
      throw ParseError(context + ": expected " + std::to_string(columns) + " fields, got " +
                       std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(columns);
    for (const auto& field : fields) {
      const double v = parse_double(field, context);
      if (!std::isfinite(v)) {
        throw ParseError(context + ": non-finite value");
      }
      row.push_back(v);
    }
    if (!table.rows.empty() && row[0] <= table.rows.back()[0]) {
      throw ParseError(context + ": timestamp " + format_double(row[0]) +
                       " not strictly increasing");
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) {
    throw EmptyLogError("'" + path.string() + "': empty log");
  }
  return table;
}

Pose2D lerp_pose(const PoseLog::Sample& a, const PoseLog::Sample& b, double t) {
  if (b.t == a.t) return a.pose;
  const double u = (t - a.t) / (b.t - a.t);
  return Pose2D{a.pose.x + u * (b.pose.x - a.pose.x), a.pose.y + u * (b.pose.y - a.pose.y),
                normalize_angle(a.pose.theta +
                                u * angle_difference(b.pose.theta, a.pose.theta))};
}

// Reshapes the twist's rotation-per-meter response: pass-through below the
// threshold, slope `gain` beyond it.
Twist2D apply_saturation(Twist2D twist, const AngularSaturation& sat) {
  const double speed = std::hypot(twist.vx, twist.vy);
  if (speed < 1e-6) return twist;  // spin in place, no distance to scale by
  const double rho = twist.omega / speed;
  if (std::abs(rho) <= sat.threshold) return twist;
  const double shaped =
      std::copysign(sat.threshold + sat.gain * (std::abs(rho) - sat.threshold), rho);
  twist.omega = shaped * speed;
  return twist;
}

}  // namespace

CommandLog load_command_log(const std::filesystem::path& path) {
  const CsvTable table = load_csv(path, "t,omega_l,omega_r");
  CommandLog log;
  log.commands.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    log.commands.push_back(WheelCommand{row[0], row[1], row[2]});
  }
  return log;
}

void save_command_log(const std::filesystem::path& path, const CommandLog& log) {
  std::string out = "t,omega_l,omega_r\n";
  for (const auto& c : log.commands) {
    out += format_double(c.t) + "," + format_double(c.omega_l) + "," +
           format_double(c.omega_r) + "\n";
  }
  detail::write_file_atomic(path, out);
}

PoseLog load_pose_log(const std::filesystem::path& path) {
  const CsvTable table = load_csv(path, "t,x,y,theta");
  PoseLog log;
  log.samples.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    log.samples.push_back(
        PoseLog::Sample{row[0], Pose2D{row[1], row[2], normalize_angle(row[3])}});
  }
  return log;
}

void save_pose_log(const std::filesystem::path& path, const PoseLog& log) {
  std::string out = "t,x,y,theta\n";
  for (const auto& s : log.samples) {
    out += format_double(s.t) + "," + format_double(s.pose.x) + "," + format_double(s.pose.y) +
           "," + format_double(s.pose.theta) + "\n";
  }
  detail::write_file_atomic(path, out);
}

SyncedTrajectory synchronize(const CommandLog& cmds, const PoseLog& poses) {
  if (cmds.commands.empty() || poses.samples.empty()) {
    throw AlignmentError("synchronize: empty log");
  }
  const double t_lo = std::max(cmds.commands.front().t, poses.samples.front().t);
  const double t_hi = std::min(cmds.commands.back().t, poses.samples.back().t);
  if (t_hi - t_lo < kMinOverlapSeconds) {
    throw AlignmentError("synchronize: command/pose overlap is " +
                         format_double(std::max(0.0, t_hi - t_lo)) + " s, need at least " +
                         format_double(kMinOverlapSeconds) + " s");
  }

  SyncedTrajectory traj;
  std::size_t k = 0;  // pose interval cursor
  for (const auto& cmd : cmds.commands) {
    if (cmd.t < t_lo || cmd.t > t_hi) continue;
    while (k + 2 < poses.samples.size() && poses.samples[k + 1].t < cmd.t) ++k;
    const auto& before = poses.samples[k];
    const auto& after = poses.samples[std::min(k + 1, poses.samples.size() - 1)];
    const Pose2D pose = lerp_pose(before, after, cmd.t);
    SyncedTrajectory::Sample sample{cmd.t, cmd.omega_l, cmd.omega_r, pose, 0.0};
    if (!traj.samples.empty()) {
      const auto& prev = traj.samples.back();
      sample.cum_length =
          prev.cum_length + std::hypot(pose.x - prev.pose.x, pose.y - prev.pose.y);
    }
    traj.samples.push_back(sample);
  }
  return traj;
}

std::pair<CommandLog, PoseLog> simulate(const SimScenario& scenario) {
  if (scenario.twist_noise_vx < 0.0 || scenario.twist_noise_vy < 0.0 ||
      scenario.twist_noise_omega < 0.0) {
    throw InvalidInputError("simulate: noise standard deviations must be >= 0");
  }
  const auto& profile = scenario.command_profile;
  if (profile.size() < 2) {
    throw InvalidInputError("simulate: command profile needs at least 2 samples");
  }

  std::mt19937_64 rng(scenario.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  PoseLog pose_log;
  Pose2D pose{};
  pose_log.samples.push_back({profile.front().t, pose});
  for (std::size_t i = 1; i < profile.size(); ++i) {
    const double dt = profile[i].t - profile[i - 1].t;
    if (!(dt > 0.0)) {
      throw InvalidInputError("simulate: profile timestamps must be strictly increasing");
    }
    Twist2D twist = predict_twist(scenario.true_model, profile[i - 1]);
    if (scenario.angular_saturation) {
      twist = apply_saturation(twist, *scenario.angular_saturation);
    }
    twist.vx += scenario.twist_noise_vx * gauss(rng);
    twist.vy += scenario.twist_noise_vy * gauss(rng);
    twist.omega += scenario.twist_noise_omega * gauss(rng);
    pose = integrate(pose, twist, dt);
    pose_log.samples.push_back({profile[i].t, pose});
  }

  PoseLog downsampled;
  for (std::size_t i = 0; i < pose_log.samples.size(); i += kPoseDownsample) {
    downsampled.samples.push_back(pose_log.samples[i]);
  }
  return {CommandLog{profile}, std::move(downsampled)};
}

CommandLog excitation_profile(double duration, double speed_limit, std::uint64_t seed) {
  if (duration <= 0.0) {
    throw EmptyLogError("excitation_profile: duration must be positive");
  }
  if (speed_limit <= 0.0) {
    throw InvalidInputError("excitation_profile: speed_limit must be positive");
  }

  constexpr int kGrid = 10;
  const double dt = 1.0 / kCommandRateHz;
  const double cell = 2.0 * speed_limit / kGrid;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hold_time(0.6, 1.8);
  std::uniform_real_distribution<double> jitter(-0.45 * cell, 0.45 * cell);

  // Visit every cell of the command box once per pass, in seeded order, so
  // long profiles are guaranteed to cover the box; interleave straight
  // lines and zero-radius turns so those motions appear even in short runs.
  std::vector<std::pair<int, int>> cells;
  cells.reserve(kGrid * kGrid);
  const auto refill = [&] {
    cells.clear();
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) cells.emplace_back(i, j);
    }
    std::shuffle(cells.begin(), cells.end(), rng);
  };
  refill();

  const std::array<std::pair<double, double>, 4> motifs = {{
      {speed_limit * 0.9, speed_limit * 0.9},    // straight ahead
      {-speed_limit * 0.9, speed_limit * 0.9},   // zero-radius left
      {-speed_limit * 0.6, -speed_limit * 0.6},  // straight back
      {speed_limit * 0.9, -speed_limit * 0.9},   // zero-radius right
  }};

  CommandLog log;
  const auto total_samples = static_cast<std::size_t>(std::llround(duration / dt)) + 1;
  std::size_t chunk = 0;
  std::size_t emitted = 0;
  while (emitted < total_samples) {
    double omega_l, omega_r;
    if (chunk % 8 == 7) {
      const auto& m = motifs[(chunk / 8) % motifs.size()];
      omega_l = m.first;
      omega_r = m.second;
    } else {
      if (cells.empty()) refill();
      const auto [i, j] = cells.back();
      cells.pop_back();
      omega_l = -speed_limit + (i + 0.5) * cell + jitter(rng);
      omega_r = -speed_limit + (j + 0.5) * cell + jitter(rng);
    }
    const auto hold_samples =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hold_time(rng) / dt)));
    for (std::size_t k = 0; k < hold_samples && emitted < total_samples; ++k, ++emitted) {
      log.commands.push_back(WheelCommand{emitted * dt, omega_l, omega_r});
    }
    ++chunk;
  }
  return log;
}

SimScenario load_scenario(const std::filesystem::path& path) {
  const std::string content = detail::read_file(path);
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  std::map<std::string, std::pair<std::string, long>> kv;  // key -> (value, line)
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key{trim(t.substr(0, eq))};
    const std::string value{trim(t.substr(eq + 1))};
    if (kv.count(key)) {
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) +
                       ": duplicate key '" + key + "'");
    }
    kv[key] = {value, line_no};
  }

  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string value = it->second.first;
    kv.erase(it);
    return value;
  };
  const auto take_double = [&](const std::string& key) -> std::optional<double> {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(*v, "'" + path.string() + "' key " + key);
  };

  const auto variant = take("variant");
  if (!variant) {
    throw ParseError("'" + path.string() + "': missing required key 'variant'");
  }
  ChassisGeometry geom;
  geom.r = take_double("r").value_or(geom.r);
  geom.b = take_double("b").value_or(geom.b);

  SimScenario scenario;
  KinematicModel model = make_model(*variant, geom);
  const auto names = param_names(model);
  std::vector<double> params;
  std::size_t given = 0;
  for (const auto& name : names) {
    if (auto v = take_double(name)) {
      params.push_back(*v);
      ++given;
    } else {
      params.push_back(0.0);
    }
  }
  if (given != 0 && given != names.size()) {
    throw ParseError("'" + path.string() + "': variant " + *variant + " needs all of its " +
                     std::to_string(names.size()) + " parameters, got " +
                     std::to_string(given));
  }
  scenario.true_model = (given == names.size() && given > 0) ? with_params(model, params)
                                                             : model;

  scenario.rng_seed = static_cast<std::uint64_t>(take_double("seed").value_or(0.0));
  scenario.twist_noise_vx = take_double("noise_vx").value_or(0.0);
  scenario.twist_noise_vy = take_double("noise_vy").value_or(0.0);
  scenario.twist_noise_omega = take_double("noise_omega").value_or(0.0);

  const auto sat_threshold = take_double("sat_threshold");
  const auto sat_gain = take_double("sat_gain");
  if (sat_threshold.has_value() != sat_gain.has_value()) {
    throw ParseError("'" + path.string() +
                     "': sat_threshold and sat_gain must be given together");
  }
  if (sat_threshold) {
    scenario.angular_saturation = AngularSaturation{*sat_threshold, *sat_gain};
  }

  if (auto csv = take("commands_csv")) {
    std::filesystem::path cmd_path(*csv);
    if (cmd_path.is_relative()) {
      cmd_path = path.parent_path() / cmd_path;
    }
    scenario.command_profile = load_command_log(cmd_path).commands;
    take_double("duration");
    take_double("speed_limit");
  } else {
    const auto duration = take_double("duration");
    if (!duration) {
      throw ParseError("'" + path.string() + "': need 'duration' or 'commands_csv'");
    }
    const double speed_limit = take_double("speed_limit").value_or(3.0);
    scenario.command_profile =
        excitation_profile(*duration, speed_limit, scenario.rng_seed).commands;
  }

  if (!kv.empty()) {
    const auto& [key, entry] = *kv.begin();
    throw ParseError("'" + path.string() + "' line " + std::to_string(entry.second) +
                     ": unknown key '" + key + "'");
  }
  return scenario;
}

}  // namespace skidkin
