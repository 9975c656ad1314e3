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

#include "ehgsc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ehgsc/errors.hpp"

namespace ehgsc {

std::string_view to_string(RelayPolicy p) {
    return p == RelayPolicy::kTransmitAlways ? "transmit-always" : "transmit-when-successful";
}

std::string_view to_string(RelayTiming t) {
    return t == RelayTiming::kSameSlot ? "same-slot" : "next-slot";
}

std::string_view to_string(DischargeModel m) {
    return m == DischargeModel::kHeldQuantum ? "held-quantum" : "stationary";
}

void validate(const NetworkConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(cfg.alpha > 0.0, "alpha must be positive");
    require(cfg.p_s_w > 0.0, "p_s_w must be positive");
    require(cfg.m_r_mj > 0.0, "m_r_mj must be positive");
    require(cfg.n0_w > 0.0, "n0 must be positive");
    require(cfg.r0 > 0.0, "r0 must be positive");
    require(cfg.gamma_th > 0.0, "gamma_th must be positive");
    require(cfg.z >= 0.0 && cfg.z < 1.0, "z must lie in [0,1)");
    require(cfg.n_bins >= 2, "n_bins must be at least 2");
    require(cfg.lambda1 > 0.0 && std::isfinite(cfg.lambda1), "lambda1 must be positive and finite");
    require(cfg.slot_duration_s > 0.0, "slot_duration_s must be positive");
    require(distance(cfg.pos_s, cfg.pos_d) > 0.0, "pos_s and pos_d coincide");
    require(distance(cfg.pos_s, cfg.pos_r) > 0.0, "pos_s and pos_r coincide");
    require(distance(cfg.pos_r, cfg.pos_d) > 0.0, "pos_r and pos_d coincide");
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double exponential_rate(double d, double alpha, double n0_w, double power_w) {
    if (!(d > 0.0)) throw std::invalid_argument("exponential_rate: coincident node positions");
    if (!(power_w > 0.0)) throw std::invalid_argument("exponential_rate: power must be positive");
    return std::pow(d, alpha) * n0_w / power_w;
}

LinkParams link_params(const NetworkConfig& cfg) {
    LinkParams links;
    links.w_sd = exponential_rate(distance(cfg.pos_s, cfg.pos_d), cfg.alpha, cfg.n0_w, cfg.p_s_w);
    links.w_sr = exponential_rate(distance(cfg.pos_s, cfg.pos_r), cfg.alpha, cfg.n0_w, cfg.p_s_w);
    links.w_rd = exponential_rate(distance(cfg.pos_r, cfg.pos_d), cfg.alpha, cfg.n0_w,
                                  cfg.relay_power_w());
    return links;
}

double snr_outage_cdf(double w, double x) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-w * x);
}

}  // namespace ehgsc
