#pragma once

#include <string>
#include <vector>

#include "stemgrow/sim.hpp"

namespace stemgrow {

// Builds the resampled seed state for a curve spec: tangents sampled at
// uniform arc-length parameters (spacing ds, length truncated to a whole
// multiple of ds), positions rebuilt from them.
StemState build_initial_state(const CurveSpec& curve, double ds, const ElongationLaw& law,
                              const Vec3& up);

// Reads and validates a JSON config file; errors name the offending key.
SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text);

// Serializes a config back to the canonical JSON document.
std::string serialize_config(const SimConfig& cfg);

// Golden scenario presets.
std::vector<std::string> preset_names();
SimConfig make_preset(const std::string& name);

}  // namespace stemgrow
