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
#include "ehgsc/config_io.hpp"
#include "ehgsc/errors.hpp"

using namespace ehgsc;

namespace {
const char* kBaseline = R"(# baseline
pos_s = [0, 0]
pos_r = [45, 20]
pos_d = [100, 0]
m_r_mj = 10          # mJ
z = 1/6
noise_dbm = -50
harvest_mean_db = -11
)";

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}
}  // namespace

TEST_CASE("baseline config file") {
    const ParsedConfig pc = parse_config(kBaseline);
    const NetworkConfig& c = pc.config;
    CHECK(c.pos_s == Point{0, 0});
    CHECK(c.pos_r == Point{45, 20});
    CHECK(c.pos_d == Point{100, 0});
    CHECK(c.m_r_mj == 10.0);
    CHECK(c.z == 1.0 / 6.0);
    CHECK(c.n0_w == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(c.lambda1 == doctest::Approx(12.589254117941675).epsilon(1e-12));
    CHECK(c.gamma_th == 3.0);
    CHECK_FALSE(pc.applied_defaults.empty());
    bool saw_gamma = false;
    for (const auto& d : pc.applied_defaults) saw_gamma |= d == "gamma_th = 3";
    CHECK(saw_gamma);
}

TEST_CASE("empty file lists every mandatory key") {
    try {
        parse_config("");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const auto& k : mandatory_keys()) CHECK(msg.find(k) != std::string::npos);
        CHECK(msg.find("lambda1") != std::string::npos);
    }
}

TEST_CASE("errors carry the line number") {
    std::string bad_z = kBaseline;
    bad_z.replace(bad_z.find("z = 1/6"), 7, "z = 1.5");
    CHECK(error_line(bad_z) == 6);
    CHECK_THROWS_WITH_AS(parse_config(bad_z), doctest::Contains("line 6"), ConfigError);

    CHECK(error_line(std::string(kBaseline) + "colour = blue\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "z = 0.2\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "lambda1 = 3\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "n_bins = 1\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "alpha = abc\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "no equals sign\n") == 9);
    CHECK(error_line(std::string(kBaseline) + "relay_policy = sometimes\n") == 9);
}

TEST_CASE("whole-config checks") {
    std::string same = kBaseline;
    same.replace(same.find("[45, 20]"), 8, "[0, 0]");
    CHECK_THROWS_AS(parse_config(same), ConfigError);
}

TEST_CASE("format_config round-trips") {
    NetworkConfig c;
    c.z = 1.0 / 12.0;
    c.lambda1 = 1.0 / 0.0794;
    c.n0_w = 1.2345678901234567e-9;
    c.relay_policy = RelayPolicy::kTransmitWhenSuccessful;
    c.relay_timing = RelayTiming::kNextSlot;
    c.discharge_model = DischargeModel::kStationary;
    c.pos_r = {45.125, -20.5};
    const ParsedConfig back = parse_config(format_config(c));
    CHECK(back.config == c);
    CHECK(back.applied_defaults.empty());
}

TEST_CASE("format_double is shortest round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 12.589254117941675, 1e-300, -0.0, 5e7}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("apply_setting") {
    NetworkConfig c;
    apply_setting(c, "harvest_mean_db", "-10");
    CHECK(c.lambda1 == doctest::Approx(10.0));
    apply_setting(c, "z", "1/12");
    CHECK(c.z == 1.0 / 12.0);
    CHECK_THROWS_AS(apply_setting(c, "z", "1/0"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "nope", "1"), ConfigError);
}
