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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ehgsc/channel.hpp"
#include "ehgsc/config.hpp"
#include "ehgsc/numerics.hpp"

namespace ehgsc {

/// HSU dual buffer at the relay. Harvest lands in the SEB and moves to the
/// PEB at slot end; only the PEB funds transmissions.
struct EnergyBuffer {
    double peb = 0.0;  // mJ
    double seb = 0.0;  // mJ
    double level() const { return peb; }
};

enum class TxState { kS1, kS2 };

struct EpisodeState {
    TxState tx = TxState::kS1;
    double gsc_accumulated = 0.0;
    std::uint64_t slots_elapsed = 0;  // slots spent on the in-flight packet
    bool relay_turn = false;          // next-slot timing only
};

/// Random inputs of one slot.
struct SlotDraws {
    double snr_sd = 0.0;
    double snr_sr = 0.0;
    double snr_rd = 0.0;
    double harvest = 0.0;  // mJ
};

struct SlotOutcome {
    TxState state = TxState::kS1;  // state at slot start
    bool delivered = false;
    bool source_failed = false;    // s2: accumulated + fresh SD copy below Gamma_th
    bool relay_would_fail = false; // s2 with source_failed: accumulated + RD copy below Gamma_th
    bool relay_transmitted = false;
    double discharged = 0.0;       // mJ
    double harvested = 0.0;        // mJ
    double accumulated_before = 0.0;
    std::uint64_t packet_slots = 0;  // on delivery: slots the packet took
};

/// Stream lanes of one replication.
enum Lane : std::uint64_t { kLaneSd = 0, kLaneSr = 1, kLaneRd = 2, kLaneHarvest = 3 };

/// Per-replication random streams, one per link plus the harvest process.
struct SlotStreams {
    RandomStream sd;
    RandomStream sr;
    RandomStream rd;
    RandomStream harvest;

    SlotStreams(std::uint64_t seed, std::uint64_t replication)
        : sd(seed, replication, kLaneSd),
          sr(seed, replication, kLaneSr),
          rd(seed, replication, kLaneRd),
          harvest(seed, replication, kLaneHarvest) {}

    /// All four quantities are drawn every slot so streams stay aligned
    /// across engines and parameter changes.
    SlotDraws draw(const LinkParams& links, double lambda1);
};

/// One slot of the protocol with pre-drawn randomness.
SlotOutcome step_slot(EpisodeState& state, EnergyBuffer& buffer, const NetworkConfig& cfg,
                      const SlotDraws& draws);

inline SlotOutcome step_slot(EpisodeState& state, EnergyBuffer& buffer, const NetworkConfig& cfg,
                             const LinkParams& links, SlotStreams& rng) {
    return step_slot(state, buffer, cfg, rng.draw(links, cfg.lambda1));
}

struct BufferHistogram {
    double bin_width = 0.0;          // mJ
    std::vector<std::uint64_t> counts;
    std::uint64_t overflow = 0;      // samples >= counts.size() * bin_width
    std::uint64_t total() const;
};

struct SimOptions {
    std::uint64_t seed = 1;
    std::uint64_t n_slots = 1000000;        // per replication
    std::uint64_t n_replications = 1;
    double histogram_bin_width = 0.0;       // 0: M_R / 20
    std::size_t histogram_bins = 400;
    bool keep_buffer_trace = false;         // post-burn-in PEB levels, all replications
    bool keep_delivery_trace = false;       // delivered slot indices, per replication
    unsigned threads = 0;                   // 0: hardware concurrency
    EpisodeState initial_state{};
    EnergyBuffer initial_buffer{};
};

std::uint64_t burn_in_slots(std::uint64_t n_slots);

struct SimReport {
    std::uint64_t seed = 0;
    std::uint64_t n_replications = 0;
    std::uint64_t n_slots = 0;          // all replications
    std::uint64_t burn_in = 0;          // per replication
    std::uint64_t n_packets_delivered = 0;
    std::uint64_t n_failed_slots = 0;
    double failure_rate = 0.0;          // failed slots / slots
    double failure_ci_low = 0.0;        // 95% normal-approximation binomial interval
    double failure_ci_high = 0.0;
    double failure_rate_rep_variance = 0.0;  // sample variance across replications
    std::vector<double> rep_failure_rates;
    double throughput = 0.0;            // delivered / slots * R0
    double mean_slots_per_packet = 0.0;
    double packet_outage = 0.0;         // packets not delivered in their first slot
    double p_s_hat = 0.0;
    double p_sr_hat = 0.0;
    double s1_failure_rate = 0.0;
    double e_hat = 0.0;                 // s2 slots with source failure / s2 slots
    double g_hat = 0.0;                 // of those, relay copy also short
    double pr_energy_sufficient = 0.0;  // post-burn-in Pr{PEB >= M_R}
    double mean_buffer = 0.0;           // post-burn-in mean PEB
    double discharge_rate = 0.0;        // discharges / slots
    std::uint64_t relay_transmissions = 0;
    std::uint64_t wasted_discharges = 0;  // relay transmissions without delivery
    double max_energy_error = 0.0;      // largest per-slot conservation defect, mJ
    std::array<double, 10> decile_means{};  // post-burn-in PEB, averaged over replications
    BufferHistogram histogram;
    ProbVector accumulator_bins;        // s2-slot accumulator, GSC bins + tail
    std::vector<double> buffer_trace;
    std::vector<std::vector<std::uint64_t>> delivered_slots;
};

/// Independent replications, run in parallel and merged in replication order.
/// Throws std::invalid_argument for n_slots or n_replications of 0.
SimReport run_simulation(const NetworkConfig& cfg, const SimOptions& opt);

/// Independent MRC engine (every copy combined) on replication 0's streams.
/// Requires z == 0; keeps the delivery trace.
SimReport mrc_reference_run(const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t n_slots);

/// Kolmogorov-Smirnov distance between the empirical CDF of samples and cdf.
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f),
                      std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

}  // namespace ehgsc
