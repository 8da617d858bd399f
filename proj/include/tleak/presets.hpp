#pragma once

#include <string>
#include <vector>

#include "tleak/experiment.hpp"

namespace tleak {

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
// Throws ConfigInvalid if no preset has this name.
const Preset& find_preset(const std::string& name);

}  // namespace tleak
