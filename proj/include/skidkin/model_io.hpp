#pragma once

#include <filesystem>

#include "skidkin/calibration.hpp"
#include "skidkin/models.hpp"

namespace skidkin {

// Flat key-value model document: variant, geometry, named parameters, and
// their bounds. Doubles are written with 17 significant digits, so a
// save/load round trip reproduces the model bit-exactly.
void save_model(const std::filesystem::path& path, const KinematicModel& model);
KinematicModel load_model(const std::filesystem::path& path);

// Writes the fitted model document plus a JSON metadata sidecar
// ("<path>.meta.json") carrying loss, iteration, and seed bookkeeping.
void save_calibration_report(const std::filesystem::path& path, const CalibrationReport& report);

}  // namespace skidkin
