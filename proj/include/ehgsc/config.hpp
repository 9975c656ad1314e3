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

#include <cstddef>
#include <string>
#include <string_view>

namespace ehgsc {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

enum class RelayPolicy {
    kTransmitAlways,         // R spends M_R whenever S fails and B1 >= M_R
    kTransmitWhenSuccessful  // R spends M_R only if its copy completes the packet
};

/// When R's attempt happens relative to S's failed attempt in state s2.
/// Only the simulator honours kNextSlot.
enum class RelayTiming { kSameSlot, kNextSlot };

/// How the analytical engine obtains the discharge probability b1 that drives
/// the buffer model. kHeldQuantum conditions the transmitter/accumulator state
/// on the relay holding a quantum; kStationary uses the unconditional
/// stationary probabilities.
enum class DischargeModel { kHeldQuantum, kStationary };

std::string_view to_string(RelayPolicy p);
std::string_view to_string(RelayTiming t);
std::string_view to_string(DischargeModel m);

/// Network geometry, radio and energy parameters shared by both engines.
/// Energies are in mJ, powers in W, SNRs linear, lambda1 in mJ^-1.
struct NetworkConfig {
    Point pos_s{0.0, 0.0};
    Point pos_r{45.0, 20.0};
    Point pos_d{100.0, 0.0};
    double alpha = 3.0;
    double p_s_w = 0.1;
    double m_r_mj = 10.0;
    double n0_w = 1e-8;
    double r0 = 2.0;
    double gamma_th = 3.0;
    double z = 1.0 / 6.0;
    std::size_t n_bins = 50;
    double lambda1 = 12.589254117941675;  // 1/lambda1 = -11 dB re 1 mJ
    double slot_duration_s = 1.0;
    RelayPolicy relay_policy = RelayPolicy::kTransmitAlways;
    RelayTiming relay_timing = RelayTiming::kSameSlot;
    DischargeModel discharge_model = DischargeModel::kHeldQuantum;

    bool operator==(const NetworkConfig&) const = default;

    /// Relay transmit power implied by spending M_R over one slot.
    double relay_power_w() const { return m_r_mj * 1e-3 / slot_duration_s; }
    double selection_threshold() const { return z * gamma_th; }
};

/// Throws ConfigError naming the first violated invariant.
void validate(const NetworkConfig& cfg);

}  // namespace ehgsc
