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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ehgsc/config.hpp"
#include "ehgsc/performance.hpp"
#include "ehgsc/simulator.hpp"

namespace ehgsc {

enum class Mode { kTheory, kSimulate, kCompare, kSweep };

Mode parse_mode(std::string_view s);
RelayPolicy parse_policy(std::string_view s);

struct ExperimentSpec {
    Mode mode = Mode::kTheory;
    std::filesystem::path config_path;
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    std::uint64_t slots = 1000000;
    std::uint64_t reps = 1;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    std::optional<RelayPolicy> policy;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitConfig = 2,
    kExitInstability = 3,
    kExitNonConvergence = 4,
};

/// Splits "key=v1,v2,..." into spec.sweep_key / sweep_values.
/// Throws ConfigError when the grid is empty or malformed.
void parse_sweep(std::string_view arg, ExperimentSpec& spec);

/// One cell of the policy-discrimination matrix: simulation under
/// `sim_policy` against the closed form built for `formula_policy`.
struct PolicyCell {
    RelayPolicy sim_policy;
    RelayPolicy formula_policy;
    double fp_theory = 0.0;
    double fr_sim = 0.0;
    double rel_error = 0.0;
    bool matched() const { return sim_policy == formula_policy; }
};

std::vector<PolicyCell> policy_matrix(const NetworkConfig& cfg, const SimOptions& opt);

/// Buffer-CDF KS distance of a simulation (needs keep_buffer_trace) against
/// the closed-form buffer law of a theory report.
double buffer_ks(const TheoryReport& theory, const SimReport& sim);

/// Runs one experiment and writes its CSV files into spec.out_dir. Files are
/// written to temporaries and renamed only after the whole mode succeeded.
/// Returns an ExitCode; diagnostics go to `log`.
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

}  // namespace ehgsc
