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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "ehgsc/energy_analysis.hpp"
#include "ehgsc/errors.hpp"
#include "ehgsc/simulator.hpp"
#include "ehgsc/stm_analysis.hpp"
#include "oracles.hpp"

using namespace ehgsc;

TEST_CASE("build_bins edges") {
    const BinGrid g = build_bins(1.0 / 6.0, 3.0, 4);
    const double a1[] = {0, 0.5, 4.0 / 3.0, 13.0 / 6.0};
    const double a2[] = {0.5, 4.0 / 3.0, 13.0 / 6.0, 3.0};
    for (int j = 0; j < 4; ++j) {
        CHECK(g.a1[j] == doctest::Approx(a1[j]).epsilon(1e-12));
        CHECK(g.a2[j] == doctest::Approx(a2[j]).epsilon(1e-12));
    }
    CHECK(g.a2[3] == 3.0);
    for (int j = 1; j < 4; ++j) CHECK(g.a1[j] == g.a2[j - 1]);

    const BinGrid z0 = build_bins(0.0, 3.0, 4);
    CHECK(z0.a1[0] == 0.0);
    CHECK(z0.a2[0] == 0.0);
    CHECK(z0.a1[1] == 0.0);
    CHECK(z0.a2[3] == 3.0);

    for (double z : {0.0, 1.0 / 12, 0.5, 0.9}) {
        const BinGrid b = build_bins(z, 3.0, 17);
        double width = 0.0;
        for (std::size_t j = 0; j < b.n_bins; ++j) width += b.a2[j] - b.a1[j];
        CHECK(width == doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_bins(0.1, 3.0, 1), std::invalid_argument);
}

TEST_CASE("bin_of is consistent with the edges") {
    const BinGrid g = build_bins(1.0 / 6.0, 3.0, 50);
    CHECK(g.bin_of(0.0) == 0);
    CHECK(g.bin_of(0.49) == 0);
    CHECK(g.bin_of(3.0) == 50);
    CHECK(g.bin_of(10.0) == 50);
    for (std::size_t j = 1; j < 50; ++j) {
        const double mid = 0.5 * (g.a1[j] + g.a2[j]);
        CHECK(g.bin_of(mid) == j);
    }
}

TEST_CASE("marginal_bin_probs") {
    const BinGrid g = build_bins(std::log(2.0) / 3.0, 3.0, 5);
    CHECK(marginal_bin_probs(g, 1.0)[0] == doctest::Approx(0.5).epsilon(1e-12));

    const BinGrid h = build_bins(1.0 / 6.0, 3.0, 4);
    const ProbVector p = marginal_bin_probs(h, 0.5);
    REQUIRE(p.size() == 5);
    double s = 0.0;
    for (double x : p) s += x;
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(std::abs(p[0] - 0.2212) < 5e-5);
    const double quad = oracle::integrate([](double x) { return 0.5 * std::exp(-0.5 * x); }, 0.0, 0.5);
    CHECK(std::abs(p[0] - quad) < 1e-10);
    for (std::size_t j = 1; j < 4; ++j) {
        const double q = oracle::integrate([](double x) { return 0.5 * std::exp(-0.5 * x); },
                                           h.a1[j], h.a2[j]);
        CHECK(std::abs(p[j] - q) < 1e-10);
    }
}

TEST_CASE("Stm helpers") {
    Stm t(2);
    t(0, 0) = 2;
    t(0, 1) = 2;
    t(1, 1) = 5;
    t.normalize_rows();
    CHECK(t.max_row_error() < 1e-15);
    CHECK(t.left_multiply(ProbVector{0.5, 0.5}) == ProbVector{0.25, 0.75});
    Stm z(2);
    z(0, 0) = 1;
    CHECK_THROWS_AS(z.normalize_rows(), std::domain_error);
}

namespace {
AccumulatorModel model_for(const NetworkConfig& cfg) {
    const BinGrid g = build_bins(cfg.z, cfg.gamma_th, cfg.n_bins);
    return build_accumulator_model(cfg, link_params(cfg), make_lattice(g));
}
}  // namespace

TEST_CASE("build_t1 is row-stochastic and ignores the RD link without energy") {
    NetworkConfig cfg;
    cfg.n_bins = 20;
    const AccumulatorModel m = model_for(cfg);
    CHECK(is_distribution(m.entry));
    for (const auto& row : m.fail_sd) CHECK(is_distribution(row));
    for (const auto& row : m.fail_sdrd) CHECK(is_distribution(row));
    for (RelayPolicy pol : {RelayPolicy::kTransmitAlways, RelayPolicy::kTransmitWhenSuccessful}) {
        for (double pu1 : {0.0, 0.3, 1.0}) CHECK(build_t1(m, pu1, pol).max_row_error() < 1e-9);
    }
    CHECK_THROWS_AS(build_t1(m, 1.5, RelayPolicy::kTransmitAlways), std::invalid_argument);

    NetworkConfig weak = cfg;
    weak.m_r_mj = 1.0;  // much weaker RD link
    const AccumulatorModel m2 = model_for(weak);
    const Stm a = build_t1(m, 0.0, RelayPolicy::kTransmitAlways);
    const Stm b = build_t1(m2, 0.0, RelayPolicy::kTransmitAlways);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a(i, j) - b(i, j)));
    CHECK(diff == 0.0);
}

TEST_CASE("compute_e_g boundary cases") {
    const SnrLattice lat{3.0, 100};
    const double w_sd = 0.3, w_rd = 0.8;
    const ProbVector p_sd = lattice_bin_probs(lat, w_sd);
    const ProbVector p_rd = lattice_bin_probs(lat, w_rd);
    CHECK(is_distribution(p_sd, 1e-12));

    ProbVector at_zero(lat.size(), 0.0);
    at_zero[0] = 1.0;
    const EgPair eg = compute_e_g(at_zero, p_sd, p_rd, lat);
    CHECK(eg.e == doctest::Approx(snr_outage_cdf(w_sd, 3.0)).epsilon(1e-12));
    CHECK(eg.g == doctest::Approx(snr_outage_cdf(w_rd, 3.0)).epsilon(1e-12));

    ProbVector above(lat.size(), 0.0);
    above.back() = 1.0;
    CHECK(compute_e_g(at_zero, above, p_rd, lat).e == 0.0);
    CHECK(compute_e_g(above, p_sd, p_rd, lat).e == 0.0);

    CHECK_THROWS_AS(compute_e_g(ProbVector(5, 0.2), p_sd, p_rd, lat), std::invalid_argument);
}

TEST_CASE("compute_e_g is monotone in the threshold") {
    // Same lattice shape, larger threshold.
    double prev_e = -1.0, prev_g = -1.0;
    for (double gth : {1.0, 2.0, 3.0, 5.0, 8.0}) {
        const SnrLattice lat{gth, 60};
        ProbVector acc(lat.size(), 0.0);
        acc[0] = 0.5;
        acc[10] = 0.3;
        acc[30] = 0.2;
        const EgPair eg = compute_e_g(acc, lattice_bin_probs(lat, 0.4), lattice_bin_probs(lat, 0.7), lat);
        CHECK(eg.e >= prev_e);
        CHECK(eg.g >= prev_g - 1e-12);
        prev_e = eg.e;
        prev_g = eg.g;
    }
}

TEST_CASE("two-copy MRC sum matches the hypoexponential CDF") {
    const double r1 = 0.5, r2 = 0.9, gth = 3.0;
    const SnrLattice lat{gth, 2000};
    // Unconditioned first copy, no selection threshold.
    const ProbVector first = lattice_copy_pmf(lat, r1, 1e300, 0.0);
    const EgPair eg = compute_e_g(first, lattice_bin_probs(lat, r2), lattice_bin_probs(lat, r2), lat);
    CHECK(std::abs(eg.e - oracle::hypoexponential_cdf(r1, r2, gth)) < 0.01);
}

TEST_CASE("lattice_copy_pmf discards weak copies") {
    const SnrLattice lat{3.0, 12};
    const ProbVector p = lattice_copy_pmf(lat, 0.5, 3.0, 1.0);
    CHECK(is_distribution(p, 1e-12));
    const double expect0 = snr_outage_cdf(0.5, 1.0) / snr_outage_cdf(0.5, 3.0);
    CHECK(p[0] == doctest::Approx(expect0).epsilon(1e-12));
    CHECK(p[1] == 0.0);
    CHECK(p[2] == 0.0);  // [0.75, 1.25) minus the discarded part lands on 1.0
    CHECK(p[4] > 0.0);
}

TEST_CASE("build_t") {
    const double gth = 3.0;
    LinkParams l{std::log(2.0) / gth, std::log(2.0) / gth, 1.0};
    const Stm t = build_t(0.5, 0.2, 0.5, l, gth);
    CHECK(t(0, 0) == doctest::Approx(0.75));
    CHECK(t(0, 1) == doctest::Approx(0.25));
    CHECK(t(1, 0) == doctest::Approx(0.7));
    CHECK(t(0, 0) + t(0, 1) == 1.0);
    CHECK(t(1, 0) + t(1, 1) == 1.0);
}

TEST_CASE("held-quantum wait and b1 are consistent") {
    const NetworkConfig cfg;
    const AccumulatorModel m = model_for(cfg);
    for (RelayPolicy pol : {RelayPolicy::kTransmitAlways, RelayPolicy::kTransmitWhenSuccessful}) {
        const HeldQuantumProbs h = held_quantum_probs(m, pol);
        CHECK(h.state.p_s + h.state.p_sr == doctest::Approx(1.0));
        const double b1 = coefficients_a1_b1(h.state.p_s, h.state.p_sr, h.e, h.g, pol).b1;
        CHECK(b1 * h.mean_wait_slots == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("solve_joint at the default config") {
    const NetworkConfig cfg;
    const GscSolution s = solve_joint(cfg);
    const LinkParams l = link_params(cfg);
    CHECK(s.a == doctest::Approx(1.0 - std::exp(-l.w_sd * cfg.gamma_th)));
    CHECK(s.state_probs.p_s + s.state_probs.p_sr == doctest::Approx(1.0).epsilon(1e-9));
    for (double p : {s.e, s.g, s.a, s.pu1}) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    const Stm t = build_t(s.e, s.g, s.pu1, l, cfg.gamma_th);
    const ProbVector p{s.state_probs.p_s, s.state_probs.p_sr};
    CHECK(max_abs_diff(t.left_multiply(p), p) < 1e-6);
    CHECK(s.stationarity_residual < 1e-6);
    CHECK(is_distribution(s.overall_dist));
    CHECK(is_distribution(s.bin_occupancy));

    const GscSolution again = solve_joint(cfg);
    CHECK(again.e == s.e);
    CHECK(again.g == s.g);
    CHECK(again.pu1 == s.pu1);
    CHECK(again.overall_dist == s.overall_dist);
}

TEST_CASE("solve_joint agrees with the simulator") {
    for (RelayPolicy pol : {RelayPolicy::kTransmitAlways, RelayPolicy::kTransmitWhenSuccessful}) {
        NetworkConfig cfg;
        cfg.relay_policy = pol;
        const GscSolution s = solve_joint(cfg);
        SimOptions o;
        o.seed = 2024;
        o.n_slots = 1000000;
        const SimReport r = run_simulation(cfg, o);
        CHECK(std::abs(s.state_probs.p_s - r.p_s_hat) < 0.02);
        CHECK(std::abs(s.e - r.e_hat) < 0.02);
        CHECK(std::abs(s.g - r.g_hat) < 0.02);
        double tv = 0.0;
        for (std::size_t k = 0; k < s.bin_occupancy.size(); ++k) {
            tv += std::abs(s.bin_occupancy[k] - r.accumulator_bins[k]);
        }
        CHECK(0.5 * tv < 0.05);
    }
}

TEST_CASE("solve_joint reports instability") {
    NetworkConfig cfg;
    cfg.p_s_w = 1.0;
    CHECK_THROWS_AS(solve_joint(cfg), InstabilityError);
    cfg.discharge_model = DischargeModel::kStationary;
    CHECK_THROWS_AS(solve_joint(cfg), InstabilityError);
}
