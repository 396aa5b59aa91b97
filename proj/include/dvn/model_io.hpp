#pragma once

#include <string>

#include "dvn/model.hpp"

namespace dvn {

inline constexpr int kModelSchemaVersion = 1;

// JSON model file. Doubles round-trip exactly (shortest-representation
// serialization), so load(save(m)) renders bit-identically to m.
void save_model(const std::string& path, const DvnModel& model);
DvnModel load_model(const std::string& path);

}  // namespace dvn
