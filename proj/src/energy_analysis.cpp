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

#include "ehgsc/energy_analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ehgsc/errors.hpp"
#include "ehgsc/numerics.hpp"

namespace ehgsc {

namespace {

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
    }
}

[[noreturn]] void throw_unstable(double psi) {
    std::ostringstream msg;
    msg << "relay buffer unstable: psi_R = " << psi << " <= 1";
    throw InstabilityError(msg.str(), psi);
}

}  // namespace

BufferCoefficients coefficients_a1_b1(double p_s, double p_sr, double e, double g,
                                      RelayPolicy policy) {
    require_probability(p_s, "p_s");
    require_probability(p_sr, "p_sr");
    require_probability(e, "e");
    require_probability(g, "g");
    BufferCoefficients c;
    c.b1 = policy == RelayPolicy::kTransmitAlways ? p_sr * e : p_sr * e * (1.0 - g);
    c.a1 = 1.0 - c.b1;
    return c;
}

double stability_psi(double lambda1, double m_r, double b1) {
    if (!(lambda1 > 0.0) || !(m_r > 0.0) || !(b1 >= 0.0)) {
        throw std::invalid_argument("stability_psi: lambda1, M_R must be positive and b1 >= 0");
    }
    return lambda1 * m_r * b1;
}

double solve_q1(double b1, double lambda1, double m_r) {
    const double y = stability_psi(lambda1, m_r, b1);
    if (!(y > 1.0)) throw_unstable(y);
    if (y - 1.0 < kBranchPointGuard) {
        throw DegeneracyError("solve_q1: psi_R too close to 1 to separate Q1 from the trivial root");
    }
    const double w = lambert_w0(-y * std::exp(-y));
    const double q1 = -w / m_r - b1 * lambda1;
    if (!(q1 < 0.0)) throw DegeneracyError("solve_q1: non-negative exponent");
    return q1;
}

BufferPdf::BufferPdf(double b1, double lambda1, double m_r)
    : b1_(b1), lambda1_(lambda1), m_r_(m_r), q1_(solve_q1(b1, lambda1, m_r)) {
    k1_ = -q1_ / (m_r_ * (b1_ * lambda1_ + q1_));
}

double BufferPdf::density(double x) const {
    if (x < 0.0) return 0.0;
    if (x < m_r_) return -std::expm1(q1_ * x) / m_r_;
    return k1_ * std::exp(q1_ * x);
}

double BufferPdf::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x < m_r_) return (x - std::expm1(q1_ * x) / q1_) / m_r_;
    const double at_m = (m_r_ - std::expm1(q1_ * m_r_) / q1_) / m_r_;
    return at_m + k1_ * (std::exp(q1_ * x) - std::exp(q1_ * m_r_)) / q1_;
}

double BufferPdf::side_condition_residual() const {
    const double bl = b1_ * lambda1_;
    return std::abs(bl * std::exp(q1_ * m_r_) - bl - q1_);
}

double prob_energy_sufficient(double b1, double lambda1, double m_r) {
    const double y = stability_psi(lambda1, m_r, b1);
    if (!(y > 1.0)) throw_unstable(y);
    return 1.0 / y;
}

}  // namespace ehgsc
