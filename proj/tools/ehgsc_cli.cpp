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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ehgsc/errors.hpp"
#include "ehgsc/experiment.hpp"

int main(int argc, char** argv) {
    using namespace ehgsc;
    CLI::App app{"ehgsc: energy-harvesting relay with GSC, analysis and simulation"};
    std::string mode = "theory";
    std::string config;
    std::string sweep;
    std::string policy;
    ExperimentSpec spec;
    std::string out = ".";

    app.add_option("--mode", mode, "theory | simulate | compare | sweep")
        ->check(CLI::IsMember({"theory", "simulate", "compare", "sweep"}));
    app.add_option("--config", config, "config file (key = value)")->required();
    app.add_option("--slots", spec.slots, "slots per replication")->check(CLI::PositiveNumber);
    app.add_option("--reps", spec.reps, "replications")->check(CLI::PositiveNumber);
    app.add_option("--seed", spec.seed, "base seed (u64)");
    app.add_option("--sweep", sweep, "key=v1,v2,... (sweep mode)");
    app.add_option("--out", out, "output directory");
    app.add_option("--policy", policy, "transmit-always | transmit-when-successful")
        ->check(CLI::IsMember({"transmit-always", "transmit-when-successful"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        spec.mode = parse_mode(mode);
        spec.config_path = config;
        spec.out_dir = out;
        if (!policy.empty()) spec.policy = parse_policy(policy);
        if (!sweep.empty()) parse_sweep(sweep, spec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return run_experiment(spec, std::cerr);
}
