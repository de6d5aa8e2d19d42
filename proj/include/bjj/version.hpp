#pragma once

#include <json.hpp>

namespace bjj {

/// Toolkit, compiler and numeric library versions, for run manifests.
nlohmann::json build_info();

}  // namespace bjj
