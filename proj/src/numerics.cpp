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

#include "ehgsc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ehgsc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

bool is_distribution(std::span<const double> v, double tol) {
    if (v.empty()) return false;
    double sum = 0.0;
    for (double p : v) {
        if (!(p >= -tol && p <= 1.0 + tol)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

void normalize(ProbVector& v) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw std::domain_error("normalize: vector mass must be positive and finite");
    }
    for (double& p : v) p /= sum;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double lambert_w0(double x) {
    const double branch = -std::exp(-1.0);
    if (std::isnan(x) || x < branch) {
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == branch) return -1.0;
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return x;

    double w;
    if (x < -0.32) {
        // Puiseux series around the branch point in p = sqrt(2(ex+1)).
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int iter = 0; iter < 64; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0 || !std::isfinite(denom)) break;
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
            break;
        }
    }
    return std::max(w, -1.0);
}

ProbVector discrete_conv(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("discrete_conv: empty operand");
    ProbVector out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

FixedPointResult fixed_point(const ProbUpdate& update, ProbVector init, double tol,
                             std::size_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("fixed_point: tol must be positive");
    if (!is_distribution(init, 1e-6)) {
        throw std::invalid_argument("fixed_point: initial vector is not a distribution");
    }
    FixedPointResult result;
    result.vector = std::move(init);
    normalize(result.vector);
    result.residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= max_iter; ++it) {
        ProbVector next = update(result.vector);
        if (next.size() != result.vector.size()) {
            throw std::logic_error("fixed_point: update changed the vector length");
        }
        normalize(next);
        result.residual = max_abs_diff(next, result.vector);
        result.vector = std::move(next);
        result.iterations = it;
        if (result.residual <= tol) {
            result.converged = true;
            return result;
        }
    }
    return result;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t replication,
                           std::uint64_t lane) noexcept {
    std::uint64_t k = splitmix64_mix(seed + kGolden);
    k = splitmix64_mix(k ^ (replication * 0xD1B54A32D192ED03ULL + 1));
    k = splitmix64_mix(k ^ (lane * 0xAEF17502108EF2D9ULL + 1));
    state_ = k;
}

RandomStream::result_type RandomStream::operator()() noexcept {
    state_ += kGolden;
    return splitmix64_mix(state_);
}

double RandomStream::uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential_from_uniform(double rate, double u) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
    if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("exponential: u must lie in (0,1]");
    return -std::log(u) / rate;
}

double sample_exponential(double rate, RandomStream& rng) {
    if (!(rate > 0.0)) throw std::invalid_argument("sample_exponential: rate must be positive");
    return -std::log(rng.uniform_open()) / rate;
}

}  // namespace ehgsc
