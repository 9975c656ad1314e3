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
#include <string>

#include "doctest.h"
#include "ehgsc/errors.hpp"
#include "ehgsc/performance.hpp"
#include "ehgsc/simulator.hpp"

using namespace ehgsc;

TEST_CASE("failure_probability examples") {
    const double w = 0.1, gth = 3.0;
    const double a = 1.0 - std::exp(-w * gth);
    CHECK(failure_probability(1.0, 0.0, 0.4, 0.3, 0.7, w, gth) == doctest::Approx(a));
    CHECK(failure_probability(0.6, 0.4, 0.0, 0.3, 0.7, w, gth) == doctest::Approx(0.6 * a));
    CHECK(failure_probability(0.6, 0.4, 0.5, 0.2, 0.5, std::log(2.0) / gth, gth) ==
          doctest::Approx(0.42));
    CHECK_THROWS_AS(failure_probability(0.6, 0.4, 1.5, 0.2, 0.5, w, gth), std::invalid_argument);
}

TEST_CASE("failure_probability monotone in pu1 and bounded") {
    const double w = 0.1, gth = 3.0;
    const double a = 1.0 - std::exp(-w * gth);
    const double ps = 0.7, psr = 0.3, e = 0.4, g = 0.35;
    double prev = 2.0;
    for (int i = 0; i <= 100; ++i) {
        const double pu1 = i / 100.0;
        const double fp = failure_probability(ps, psr, e, g, pu1, w, gth);
        CHECK(fp <= prev);
        CHECK(fp <= ps * a + psr * e + 1e-15);
        prev = fp;
    }
    CHECK(failure_probability(ps, psr, e, g, 0.0, w, gth) == doctest::Approx(ps * a + psr * e));
}

TEST_CASE("theory_report echoes the config and is deterministic") {
    NetworkConfig cfg;
    cfg.z = 1.0 / 12.0;
    cfg.relay_policy = RelayPolicy::kTransmitWhenSuccessful;
    const TheoryReport a = theory_report(cfg);
    const TheoryReport b = theory_report(cfg);
    CHECK(a.config == cfg);
    CHECK(a.fp == b.fp);
    CHECK(a.q1 == b.q1);
    CHECK(a.gsc.overall_dist == b.gsc.overall_dist);
    CHECK(a.fp >= 0.0);
    CHECK(a.fp <= 1.0);
    CHECK(a.psi > 1.0);
    CHECK(a.a1 + a.b1 == 1.0);
    CHECK(a.pu1 == doctest::Approx(1.0 / a.psi));
}

TEST_CASE("theory_report names the failing stage") {
    NetworkConfig cfg;
    cfg.p_s_w = 1.0;
    try {
        theory_report(cfg);
        FAIL("expected instability");
    } catch (const InstabilityError& e) {
        CHECK(std::string(e.what()).find("solve_joint") != std::string::npos);
        CHECK(e.psi() < 1.0);
    }
}

TEST_CASE("theory FP agrees with the simulated failure rate") {
    const NetworkConfig cfg;
    const TheoryReport t = theory_report(cfg);
    SimOptions o;
    o.seed = 99;
    o.n_slots = 1000000;
    const SimReport s = run_simulation(cfg, o);
    CHECK(std::abs(s.failure_rate - t.fp) / t.fp < 0.10);
}
