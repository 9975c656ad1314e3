/*
   Copyright 2026 The ehgsc Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ehgsc/config.hpp"

namespace ehgsc {

struct ParsedConfig {
    NetworkConfig config;
    /// "key = value" for every optional key the file left out.
    std::vector<std::string> applied_defaults;
};

/// Keys that must appear in every config file. The harvest rate is also
/// mandatory, given as either lambda1 or harvest_mean_db.
std::vector<std::string> mandatory_keys();

/// Parses `key = value` lines ('#' starts a comment). Numbers accept a
/// fraction form such as 1/6, positions are written [x, y]. Throws
/// ConfigError naming the line for unknown keys, duplicates, bad values and
/// range violations; a file missing mandatory keys lists all of them.
ParsedConfig parse_config(std::string_view text);

ParsedConfig load_config(const std::filesystem::path& path);

/// Sets one key from its textual value, as in a config file. Derived
/// quantities (gamma_th from r0) are not touched.
void apply_setting(NetworkConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Every field as `key = value` lines; parse_config(format_config(c)) == c.
std::string format_config(const NetworkConfig& cfg);

}  // namespace ehgsc
