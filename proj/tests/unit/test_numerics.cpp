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
#include "ehgsc/numerics.hpp"
#include "oracles.hpp"

using namespace ehgsc;

TEST_CASE("lambert_w0 fixed points") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-12));
    const double ref = oracle::bisect([](double w) { return w * std::exp(w) - 1.0; }, 0.0, 1.0);
    CHECK(std::abs(lambert_w0(1.0) - ref) < 1e-12);
    CHECK(std::abs(lambert_w0(1.0) - 0.5671432904) < 1e-10);
}

TEST_CASE("lambert_w0 rejects arguments below -1/e") {
    CHECK_THROWS_AS(lambert_w0(-0.37), std::domain_error);
    CHECK_THROWS_AS(lambert_w0(-1.0), std::domain_error);
}

TEST_CASE("lambert_w0 round trip over a log grid") {
    const double lo = -std::exp(-1.0) + 1e-6;
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        // negative side: distance from the branch point on a log scale
        const double d = std::pow(10.0, -6.0 + 6.0 * i / 400.0);
        const double x = std::min(-std::exp(-1.0) + d, 0.0);
        if (x < lo) continue;
        const double w = lambert_w0(x);
        CHECK(w >= -1.0);
        worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    }
    for (int i = 0; i <= 600; ++i) {
        const double x = std::pow(10.0, -8.0 + 14.0 * i / 600.0);
        const double w = lambert_w0(x);
        worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("lambert_w0 stays on the principal branch near -1/e") {
    // The other real branch at the same argument is < -1.
    for (double y : {1.01, 1.5, 2.0, 5.0, 20.0}) {
        const double w = lambert_w0(-y * std::exp(-y));
        CHECK(w > -1.0);
        CHECK(w != doctest::Approx(-y));
    }
}

TEST_CASE("discrete_conv examples") {
    const ProbVector a{1, 0}, b{0.5, 0.5};
    const auto c = discrete_conv(a, b);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 0.5);
    CHECK(c[1] == 0.5);
    CHECK(c[2] == 0.0);
    const auto d = discrete_conv(b, b);
    CHECK(d == ProbVector{0.25, 0.5, 0.25});
    CHECK_THROWS_AS(discrete_conv(ProbVector{}, b), std::invalid_argument);
}

TEST_CASE("discrete_conv preserves mass, commutes and associates") {
    RandomStream rng(42, 0, 0);
    auto random_dist = [&](std::size_t n) {
        ProbVector v(n);
        for (auto& x : v) x = rng.uniform_open();
        normalize(v);
        return v;
    };
    for (int t = 0; t < 20; ++t) {
        const auto a = random_dist(1 + t % 7);
        const auto b = random_dist(3 + t % 5);
        const auto c = random_dist(2 + t % 4);
        const auto ab = discrete_conv(a, b);
        double s = 0;
        for (double x : ab) s += x;
        CHECK(std::abs(s - 1.0) < 1e-12);
        CHECK(ab.size() == a.size() + b.size() - 1);
        CHECK(max_abs_diff(ab, discrete_conv(b, a)) < 1e-12);
        CHECK(max_abs_diff(discrete_conv(ab, c), discrete_conv(a, discrete_conv(b, c))) < 1e-12);
    }
}

TEST_CASE("fixed_point examples") {
    SUBCASE("identity converges in one step") {
        auto r = fixed_point([](const ProbVector& v) { return v; }, {0.5, 0.5});
        CHECK(r.converged);
        CHECK(r.iterations == 1);
        CHECK(r.vector == ProbVector{0.5, 0.5});
    }
    SUBCASE("period-2 chain never converges") {
        auto r = fixed_point([](const ProbVector& v) { return ProbVector{v[1], v[0]}; }, {0.6, 0.4},
                             1e-7, 1000);
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 1000);
    }
    SUBCASE("two-state chain") {
        auto update = [](const ProbVector& v) {
            return ProbVector{0.9 * v[0] + 0.5 * v[1], 0.1 * v[0] + 0.5 * v[1]};
        };
        auto r = fixed_point(update, {0.5, 0.5});
        REQUIRE(r.converged);
        // pi T = pi with pi = (5/6, 1/6)
        CHECK(std::abs(r.vector[0] - 5.0 / 6.0) < 1e-6);
        CHECK(std::abs(r.vector[1] - 1.0 / 6.0) < 1e-6);
        CHECK(r.residual <= 1e-7);
        CHECK(max_abs_diff(update(r.vector), r.vector) <= 1e-7);
        CHECK(is_distribution(r.vector));
    }
}

TEST_CASE("exponential sampling") {
    CHECK(exponential_from_uniform(1.0, std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(exponential_from_uniform(0.0, 0.5), std::invalid_argument);
    RandomStream bad(1);
    CHECK_THROWS_AS(sample_exponential(-1.0, bad), std::invalid_argument);

    RandomStream rng(7, 0, 0);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += sample_exponential(2.0, rng);
    CHECK(std::abs(sum / n - 0.5) / 0.5 < 0.01);
}

TEST_CASE("random streams are reproducible and keyed") {
    RandomStream a(11, 3, 2), b(11, 3, 2), c(11, 4, 2), d(11, 3, 1);
    bool differs_rep = false, differs_lane = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a(), y = b(), u = c(), v = d();
        CHECK(x == y);
        differs_rep |= x != u;
        differs_lane |= x != v;
    }
    CHECK(differs_rep);
    CHECK(differs_lane);
    RandomStream e(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = e.uniform_open();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normalize and is_distribution") {
    ProbVector v{1, 3};
    normalize(v);
    CHECK(v == ProbVector{0.25, 0.75});
    CHECK(is_distribution(v));
    CHECK_FALSE(is_distribution(ProbVector{0.5, 0.6}));
    ProbVector z{0, 0};
    CHECK_THROWS(normalize(z));
}
