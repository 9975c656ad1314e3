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

#include "ehgsc/performance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ehgsc/errors.hpp"

namespace ehgsc {

double failure_probability(double p_s, double p_sr, double e, double g, double pu1,
                           double w_sd, double gamma_th) {
    for (double p : {p_s, p_sr, e, g, pu1}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("failure_probability: probabilities must lie in [0,1]");
        }
    }
    const double a = snr_outage_cdf(w_sd, gamma_th);
    const double fp = p_s * a + p_sr * e * (g * pu1 + 1.0 - pu1);
    return std::clamp(fp, 0.0, 1.0);
}

namespace {

std::string stage_prefix(const char* stage) { return std::string(stage) + ": "; }

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InstabilityError& ex) {
        throw InstabilityError(stage_prefix(stage) + ex.what(), ex.psi());
    } catch (const DegeneracyError& ex) {
        throw DegeneracyError(stage_prefix(stage) + ex.what());
    } catch (const ConvergenceError& ex) {
        throw ConvergenceError(stage_prefix(stage) + ex.what());
    }
}

}  // namespace

TheoryReport theory_report(const NetworkConfig& cfg) {
    TheoryReport r;
    r.config = cfg;
    r.links = link_params(cfg);
    r.gsc = in_stage("solve_joint", [&] { return solve_joint(cfg); });

    const auto& d = r.gsc.discharge_state;
    const auto coeff = coefficients_a1_b1(d.p_s, d.p_sr, r.gsc.discharge_e, r.gsc.discharge_g,
                                          cfg.relay_policy);
    r.a1 = coeff.a1;
    r.b1 = coeff.b1;
    r.b1_stationary = coefficients_a1_b1(r.gsc.state_probs.p_s, r.gsc.state_probs.p_sr,
                                         r.gsc.e, r.gsc.g, cfg.relay_policy)
                          .b1;
    r.psi = stability_psi(cfg.lambda1, cfg.m_r_mj, r.b1);

    const BufferPdf pdf =
        in_stage("buffer_pdf", [&] { return buffer_pdf(r.b1, cfg.lambda1, cfg.m_r_mj); });
    r.q1 = pdf.q1();
    r.k1 = pdf.k1();
    r.pu1 = prob_energy_sufficient(r.b1, cfg.lambda1, cfg.m_r_mj);
    r.fp = failure_probability(r.gsc.state_probs.p_s, r.gsc.state_probs.p_sr, r.gsc.e, r.gsc.g,
                               r.pu1, r.links.w_sd, cfg.gamma_th);
    return r;
}

}  // namespace ehgsc
