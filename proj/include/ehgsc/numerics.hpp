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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ehgsc {

/// Probability entries; a distribution when they sum to one.
using ProbVector = std::vector<double>;

bool is_distribution(std::span<const double> v, double tol = 1e-9);

/// Scales v in place to unit mass. Throws if the mass is not positive.
void normalize(ProbVector& v);

double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Principal branch of the Lambert W function (w >= -1, w*e^w = x).
/// Halley iteration; series start near the branch point -1/e.
/// Throws std::domain_error for x < -1/e.
double lambert_w0(double x);

/// Full linear convolution, length |a|+|b|-1. Throws on empty input.
ProbVector discrete_conv(std::span<const double> a, std::span<const double> b);

struct FixedPointResult {
    ProbVector vector;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = 0.0;  // max-abs change of the last step
};

inline constexpr double kFixedPointTol = 1e-7;
inline constexpr std::size_t kFixedPointMaxIter = 100000;

using ProbUpdate = std::function<ProbVector(const ProbVector&)>;

/// Iterates v <- update(v), renormalizing every step, until the max-abs
/// change is <= tol or max_iter updates have been applied.
FixedPointResult fixed_point(const ProbUpdate& update, ProbVector init,
                             double tol = kFixedPointTol,
                             std::size_t max_iter = kFixedPointMaxIter);

// ---------------------------------------------------------------------------
// Random streams

/// SplitMix64 mixing function (Steele, Lea, Flood 2014).
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

/// Counter-based 64-bit stream: output k is splitmix64_mix(key + (k+1)*gamma).
/// Streams are keyed by (seed, replication, lane), so every replication and
/// every random quantity inside it gets its own reproducible sequence.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key) noexcept : state_(key) {}
    RandomStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t lane) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    /// Uniform in the open interval (0,1), 53-bit resolution.
    double uniform_open() noexcept;

private:
    std::uint64_t state_;
};

/// Inverse-CDF exponential variate -ln(u)/rate. Throws for rate <= 0 or u
/// outside (0,1].
double exponential_from_uniform(double rate, double u);

double sample_exponential(double rate, RandomStream& rng);

}  // namespace ehgsc
