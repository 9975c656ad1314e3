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

namespace ehgsc {

/// Buffer-update coefficients: a1 = Pr{no discharge}, b1 = Pr{discharge}
/// per slot while the relay holds at least one quantum.
struct BufferCoefficients {
    double a1 = 1.0;
    double b1 = 0.0;
};

/// transmit-always:          b1 = p_SR * e
/// transmit-when-successful: b1 = p_SR * e * (1 - g)
/// a1 = 1 - b1 in both cases.
BufferCoefficients coefficients_a1_b1(double p_s, double p_sr, double e, double g,
                                      RelayPolicy policy);

/// psi_R = lambda1 * M_R * b1; the buffer is positive recurrent iff psi_R > 1.
double stability_psi(double lambda1, double m_r, double b1);

inline constexpr double kBranchPointGuard = 1e-9;

/// Negative root of b1*lambda1*e^{Q M_R} = b1*lambda1 + Q via the principal
/// Lambert branch. Throws InstabilityError for psi_R <= 1 and
/// DegeneracyError when psi_R is within kBranchPointGuard of 1.
double solve_q1(double b1, double lambda1, double m_r);

/// Limiting density of the relay buffer:
///   g1(x) = (1 - e^{Q1 x}) / M_R       0 <= x < M_R
///   g1(x) = k1 e^{Q1 x}                x >= M_R
class BufferPdf {
public:
    BufferPdf(double b1, double lambda1, double m_r);

    double b1() const { return b1_; }
    double lambda1() const { return lambda1_; }
    double m_r() const { return m_r_; }
    double q1() const { return q1_; }
    double k1() const { return k1_; }
    double psi() const { return b1_ * lambda1_ * m_r_; }

    double density(double x) const;
    double cdf(double x) const;

    /// Mass above M_R, 1/(b1 lambda1 M_R).
    double tail_mass() const { return 1.0 / psi(); }

    /// |b1 lambda1 e^{Q1 M_R} - b1 lambda1 - Q1|
    double side_condition_residual() const;

private:
    double b1_;
    double lambda1_;
    double m_r_;
    double q1_;
    double k1_;
};

inline BufferPdf buffer_pdf(double b1, double lambda1, double m_r) {
    return BufferPdf(b1, lambda1, m_r);
}

/// PU1 = Pr{B1 >= M_R} = 1/(b1 lambda1 M_R). Throws InstabilityError when
/// psi_R <= 1.
double prob_energy_sufficient(double b1, double lambda1, double m_r);

}  // namespace ehgsc
