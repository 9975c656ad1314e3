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

#include "ehgsc/channel.hpp"
#include "ehgsc/config.hpp"
#include "ehgsc/energy_analysis.hpp"
#include "ehgsc/stm_analysis.hpp"

namespace ehgsc {

/// FP = p_S (1 - e^{-W_SD Gamma_th}) + p_SR e (g pu1 + 1 - pu1)
double failure_probability(double p_s, double p_sr, double e, double g, double pu1,
                           double w_sd, double gamma_th);

/// Every analytical quantity for one configuration.
struct TheoryReport {
    NetworkConfig config;
    LinkParams links;
    GscSolution gsc;
    double a1 = 0.0;
    double b1 = 0.0;
    double psi = 0.0;
    double q1 = 0.0;
    double k1 = 0.0;
    double pu1 = 0.0;
    double fp = 0.0;
    /// b1 from the unconditional stationary probabilities, for comparison.
    double b1_stationary = 0.0;
};

/// solve_joint -> coefficients_a1_b1 -> buffer_pdf -> failure_probability.
/// InstabilityError, DegeneracyError and ConvergenceError propagate with the
/// failing stage prepended to the message.
TheoryReport theory_report(const NetworkConfig& cfg);

}  // namespace ehgsc
