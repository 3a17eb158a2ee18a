#include "skidkin/model_io.hpp"

#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "internal/text_io.hpp"
#include "skidkin/errors.hpp"

namespace skidkin {

namespace {

using detail::format_double;
using detail::parse_double;
using detail::trim;

constexpr const char* kFormatTag = "skidkin-model-v1";

}  // namespace

void save_model(const std::filesystem::path& path, const KinematicModel& model) {
  const auto names = param_names(model);
  const auto values = param_vector(model);
  const auto bounds = param_bounds(model);
  const ChassisGeometry geom = std::visit([](const auto& m) { return m.geom; }, model);

  std::string out;
  out += "format = " + std::string(kFormatTag) + "\n";
  out += "variant = " + variant_name(model) + "\n";
  out += "r = " + format_double(geom.r) + "\n";
  out += "b = " + format_double(geom.b) + "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i] + " = " + format_double(values[i]) + "\n";
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += "bounds_" + names[i] + " = " + format_double(bounds.lower[i]) + " " +
           format_double(bounds.upper[i]) + "\n";
  }
  detail::write_file_atomic(path, out);
}

KinematicModel load_model(const std::filesystem::path& path) {
  const std::string content = detail::read_file(path);
  std::istringstream in(content);
  std::string line;
  long line_no = 0;
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    kv[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
  }

  const auto require = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError("'" + path.string() + "': missing key '" + key + "'");
    }
    return it->second;
  };

  if (require("format") != kFormatTag) {
    throw ParseError("'" + path.string() + "': unsupported format '" + kv["format"] + "'");
  }
  ChassisGeometry geom;
  geom.r = parse_double(require("r"), "'" + path.string() + "' key r");
  geom.b = parse_double(require("b"), "'" + path.string() + "' key b");
  KinematicModel model = make_model(require("variant"), geom);

  const auto names = param_names(model);
  std::vector<double> params;
  params.reserve(names.size());
  for (const auto& name : names) {
    params.push_back(parse_double(require(name), "'" + path.string() + "' key " + name));
  }
  return names.empty() ? model : with_params(model, params);
}

void save_calibration_report(const std::filesystem::path& path,
                             const CalibrationReport& report) {
  save_model(path, report.model);
  nlohmann::ordered_json j;
  j["variant"] = variant_name(report.model);
  j["final_loss"] = report.final_loss;
  j["iterations"] = report.iterations;
  j["restarts_used"] = report.restarts_used;
  j["converged"] = report.converged;
  j["seed"] = report.seed;
  detail::write_file_atomic(path.string() + ".meta.json", j.dump(2) + "\n");
}

}  // namespace skidkin
