#pragma once

#include <string_view>
#include <vector>

// Shifts {0, 1, -1} for the eisenstein kinds, none otherwise.
inline std::vector<double> shifts_for(std::string_view name) {
  if (name == "eisenstein" || name == "rs_eisenstein") return {0.0, 1.0, -1.0};
  return {};
}
