#pragma once

#include <string>

#include "deltanls/grid.hpp"

namespace deltanls {

// Field interchange format: {"n": ..., "half_width": ..., "values": [[re, im], ...]}.
void save_field(const std::string& path, const WaveField& f);
WaveField load_field(const std::string& path);

std::string field_to_json(const WaveField& f);
WaveField field_from_json(const std::string& text);

}  // namespace deltanls
