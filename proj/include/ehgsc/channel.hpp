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

#include "ehgsc/config.hpp"
#include "ehgsc/numerics.hpp"

namespace ehgsc {

/// Rate parameters of the exponential link SNRs: f(x) = W e^{-W x}.
struct LinkParams {
    double w_sd = 0.0;
    double w_sr = 0.0;
    double w_rd = 0.0;
    bool operator==(const LinkParams&) const = default;
};

double distance(const Point& a, const Point& b);

/// d^alpha * N0 / P. Throws std::invalid_argument for d <= 0 or P <= 0.
double exponential_rate(double d, double alpha, double n0_w, double power_w);

LinkParams link_params(const NetworkConfig& cfg);

/// Pr{gamma < x} for an exponential SNR with rate w.
double snr_outage_cdf(double w, double x);

/// One quasi-static fading draw of a link SNR.
inline double sample_link_snr(double w, RandomStream& rng) { return sample_exponential(w, rng); }

}  // namespace ehgsc
