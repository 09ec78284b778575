// Copyright 2026 The RQU Model Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <string>

#include "json.hpp"
#include "rqu/core_model.hpp"

namespace rqu {

/// Builds a validated device from a JSON document with the sections
/// constants, lf, mw, jj and coupling. Unknown keys are rejected.
///
/// "constants" may be the string "si" or "natural", or an object with
/// hbar/k_B/Phi0. "coupling" holds either flux_bias (Wb; g0 then follows from
/// the junction model and L_a is calibrated against omega_a0) or an explicit
/// g0 for dimensionless studies.
DeviceParams device_from_json(const nlohmann::json& doc);
DeviceParams load_device(const std::string& path);
nlohmann::json device_to_json(const DeviceParams& device);

/// Throws ConfigError naming the first key of obj not in allowed.
void reject_unknown_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& section);

}  // namespace rqu
