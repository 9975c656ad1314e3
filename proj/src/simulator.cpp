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

#include "ehgsc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ehgsc/stm_analysis.hpp"

namespace ehgsc {

SlotDraws SlotStreams::draw(const LinkParams& links, double lambda1) {
    SlotDraws d;
    d.snr_sd = sample_link_snr(links.w_sd, sd);
    d.snr_sr = sample_link_snr(links.w_sr, sr);
    d.snr_rd = sample_link_snr(links.w_rd, rd);
    d.harvest = sample_exponential(lambda1, harvest);
    return d;
}

namespace {

void deliver(EpisodeState& st, SlotOutcome& out) {
    out.delivered = true;
    out.packet_slots = st.slots_elapsed;
    st.tx = TxState::kS1;
    st.gsc_accumulated = 0.0;
    st.slots_elapsed = 0;
    st.relay_turn = false;
}

bool relay_allowed(const NetworkConfig& cfg, const EnergyBuffer& buf, double acc, double y) {
    if (buf.peb < cfg.m_r_mj) return false;
    return cfg.relay_policy == RelayPolicy::kTransmitAlways || acc + y >= cfg.gamma_th;
}

}  // namespace

SlotOutcome step_slot(EpisodeState& st, EnergyBuffer& buf, const NetworkConfig& cfg,
                      const SlotDraws& d) {
    SlotOutcome out;
    out.state = st.tx;
    out.accumulated_before = st.gsc_accumulated;
    ++st.slots_elapsed;

    const double gth = cfg.gamma_th;
    const double sel = cfg.selection_threshold();
    auto combine = [&](double copy) {
        if (copy >= sel) st.gsc_accumulated += copy;
    };

    if (st.tx == TxState::kS1) {
        if (d.snr_sd >= gth) {
            deliver(st, out);
        } else {
            combine(d.snr_sd);
            if (d.snr_sr >= gth) st.tx = TxState::kS2;
        }
    } else if (st.relay_turn) {
        // Next-slot timing: R takes this slot if it still can, otherwise S.
        st.relay_turn = false;
        const double acc = st.gsc_accumulated;
        if (relay_allowed(cfg, buf, acc, d.snr_rd)) {
            out.relay_transmitted = true;
            out.discharged = cfg.m_r_mj;
            if (acc + d.snr_rd >= gth) {
                deliver(st, out);
            } else {
                combine(d.snr_rd);
            }
        } else if (acc + d.snr_sd >= gth) {
            deliver(st, out);
        } else {
            out.source_failed = true;
            out.relay_would_fail = acc + d.snr_rd < gth;
            combine(d.snr_sd);
            st.relay_turn = true;
        }
    } else {
        const double acc = st.gsc_accumulated;
        if (acc + d.snr_sd >= gth) {
            deliver(st, out);
        } else {
            out.source_failed = true;
            out.relay_would_fail = acc + d.snr_rd < gth;
            if (cfg.relay_timing == RelayTiming::kNextSlot) {
                combine(d.snr_sd);
                st.relay_turn = true;
            } else if (relay_allowed(cfg, buf, acc, d.snr_rd)) {
                out.relay_transmitted = true;
                out.discharged = cfg.m_r_mj;
                if (acc + d.snr_rd >= gth) {
                    deliver(st, out);
                } else {
                    combine(d.snr_sd);
                    combine(d.snr_rd);
                }
            } else {
                combine(d.snr_sd);
            }
        }
    }

    // HSU: spend from the PEB, harvest into the SEB, transfer at slot end.
    buf.peb -= out.discharged;
    buf.seb += d.harvest;
    out.harvested = d.harvest;
    buf.peb += buf.seb;
    buf.seb = 0.0;
    return out;
}

std::uint64_t BufferHistogram::total() const {
    std::uint64_t t = overflow;
    for (auto c : counts) t += c;
    return t;
}

std::uint64_t burn_in_slots(std::uint64_t n_slots) {
    return std::min<std::uint64_t>(10000, n_slots / 10);
}

namespace {

struct RepStats {
    std::uint64_t slots = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t s1 = 0;
    std::uint64_t s1_failed = 0;
    std::uint64_t s2 = 0;
    std::uint64_t e = 0;
    std::uint64_t eg = 0;
    std::uint64_t packet_slots = 0;
    std::uint64_t first_slot_failures = 0;
    std::uint64_t relay_tx = 0;
    std::uint64_t wasted = 0;
    std::uint64_t measured = 0;  // post-burn-in slots
    std::uint64_t sufficient = 0;
    double buffer_sum = 0.0;
    double max_energy_error = 0.0;
    std::array<double, 10> decile_means{};
    std::vector<std::uint64_t> hist;
    std::uint64_t hist_overflow = 0;
    std::vector<double> acc_bins;
    std::vector<double> trace;
    std::vector<std::uint64_t> delivered_slots;
};

RepStats run_replication(const NetworkConfig& cfg, const LinkParams& links, const BinGrid& grid,
                         const SimOptions& opt, double bin_width, std::uint64_t rep) {
    RepStats s;
    s.hist.assign(opt.histogram_bins, 0);
    s.acc_bins.assign(grid.n_bins + 1, 0.0);
    const std::uint64_t burn = burn_in_slots(opt.n_slots);
    const std::uint64_t measured = opt.n_slots - burn;
    std::array<double, 10> decile_sum{};
    std::array<std::uint64_t, 10> decile_n{};
    if (opt.keep_buffer_trace) s.trace.reserve(measured);

    SlotStreams rng(opt.seed, rep);
    EpisodeState st = opt.initial_state;
    EnergyBuffer buf = opt.initial_buffer;
    for (std::uint64_t i = 0; i < opt.n_slots; ++i) {
        const double level = buf.level();
        if (i >= burn) {
            const std::uint64_t k = i - burn;
            ++s.measured;
            s.buffer_sum += level;
            if (level >= cfg.m_r_mj) ++s.sufficient;
            const auto dec = static_cast<std::size_t>(std::min<std::uint64_t>(9, k * 10 / measured));
            decile_sum[dec] += level;
            ++decile_n[dec];
            const double pos = level / bin_width;
            if (pos < static_cast<double>(s.hist.size())) {
                ++s.hist[static_cast<std::size_t>(pos)];
            } else {
                ++s.hist_overflow;
            }
            if (opt.keep_buffer_trace) s.trace.push_back(level);
        }
        if (st.tx == TxState::kS2 && !st.relay_turn) {
            s.acc_bins[grid.bin_of(st.gsc_accumulated)] += 1.0;
        }

        const double before = buf.peb + buf.seb;
        const SlotDraws d = rng.draw(links, cfg.lambda1);
        const SlotOutcome o = step_slot(st, buf, cfg, d);
        const double err = std::abs(buf.peb + buf.seb + o.discharged - before - o.harvested);
        s.max_energy_error = std::max(s.max_energy_error, err);

        ++s.slots;
        if (o.state == TxState::kS1) {
            ++s.s1;
            if (!o.delivered) ++s.s1_failed;
        } else {
            ++s.s2;
            if (o.source_failed) {
                ++s.e;
                if (o.relay_would_fail) ++s.eg;
            }
        }
        if (o.relay_transmitted) {
            ++s.relay_tx;
            if (!o.delivered) ++s.wasted;
        }
        if (o.delivered) {
            ++s.delivered;
            s.packet_slots += o.packet_slots;
            if (o.packet_slots > 1) ++s.first_slot_failures;
            if (opt.keep_delivery_trace) s.delivered_slots.push_back(i);
        } else {
            ++s.failed;
        }
    }
    for (std::size_t k = 0; k < 10; ++k) {
        s.decile_means[k] = decile_n[k] ? decile_sum[k] / static_cast<double>(decile_n[k]) : 0.0;
    }
    return s;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

SimReport run_simulation(const NetworkConfig& cfg, const SimOptions& opt) {
    if (opt.n_slots == 0) throw std::invalid_argument("run_simulation: n_slots must be >= 1");
    if (opt.n_replications == 0) {
        throw std::invalid_argument("run_simulation: n_replications must be >= 1");
    }
    if (opt.histogram_bins == 0) throw std::invalid_argument("run_simulation: histogram_bins == 0");
    validate(cfg);
    const LinkParams links = link_params(cfg);
    const BinGrid grid = build_bins(cfg.z, cfg.gamma_th, cfg.n_bins);
    const double bin_width = opt.histogram_bin_width > 0.0 ? opt.histogram_bin_width
                                                            : cfg.m_r_mj / 20.0;

    const std::size_t reps = opt.n_replications;
    std::vector<RepStats> results(reps);
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < reps; r += threads) {
                    results[r] = run_replication(cfg, links, grid, opt, bin_width, r);
                }
            });
        }
    }

    SimReport rep;
    rep.seed = opt.seed;
    rep.n_replications = reps;
    rep.burn_in = burn_in_slots(opt.n_slots);
    rep.histogram.bin_width = bin_width;
    rep.histogram.counts.assign(opt.histogram_bins, 0);
    rep.accumulator_bins.assign(grid.n_bins + 1, 0.0);

    RepStats tot;
    for (const RepStats& s : results) {
        tot.slots += s.slots;
        tot.delivered += s.delivered;
        tot.failed += s.failed;
        tot.s1 += s.s1;
        tot.s1_failed += s.s1_failed;
        tot.s2 += s.s2;
        tot.e += s.e;
        tot.eg += s.eg;
        tot.packet_slots += s.packet_slots;
        tot.first_slot_failures += s.first_slot_failures;
        tot.relay_tx += s.relay_tx;
        tot.wasted += s.wasted;
        tot.measured += s.measured;
        tot.sufficient += s.sufficient;
        tot.buffer_sum += s.buffer_sum;
        tot.max_energy_error = std::max(tot.max_energy_error, s.max_energy_error);
        for (std::size_t k = 0; k < 10; ++k) {
            rep.decile_means[k] += s.decile_means[k] / static_cast<double>(reps);
        }
        for (std::size_t k = 0; k < s.hist.size(); ++k) rep.histogram.counts[k] += s.hist[k];
        rep.histogram.overflow += s.hist_overflow;
        for (std::size_t k = 0; k < s.acc_bins.size(); ++k) rep.accumulator_bins[k] += s.acc_bins[k];
        rep.rep_failure_rates.push_back(ratio(static_cast<double>(s.failed), static_cast<double>(s.slots)));
        if (opt.keep_buffer_trace) {
            rep.buffer_trace.insert(rep.buffer_trace.end(), s.trace.begin(), s.trace.end());
        }
        if (opt.keep_delivery_trace) rep.delivered_slots.push_back(s.delivered_slots);
    }

    const auto n = static_cast<double>(tot.slots);
    rep.n_slots = tot.slots;
    rep.n_packets_delivered = tot.delivered;
    rep.n_failed_slots = tot.failed;
    rep.failure_rate = ratio(static_cast<double>(tot.failed), n);
    const double half = 1.959963984540054 * std::sqrt(rep.failure_rate * (1.0 - rep.failure_rate) / n);
    rep.failure_ci_low = std::max(0.0, rep.failure_rate - half);
    rep.failure_ci_high = std::min(1.0, rep.failure_rate + half);
    if (reps > 1) {
        double mean = 0.0;
        for (double f : rep.rep_failure_rates) mean += f;
        mean /= static_cast<double>(reps);
        double ss = 0.0;
        for (double f : rep.rep_failure_rates) ss += (f - mean) * (f - mean);
        rep.failure_rate_rep_variance = ss / static_cast<double>(reps - 1);
    }
    rep.throughput = ratio(static_cast<double>(tot.delivered), n) * cfg.r0;
    rep.mean_slots_per_packet = ratio(static_cast<double>(tot.packet_slots), static_cast<double>(tot.delivered));
    rep.packet_outage = ratio(static_cast<double>(tot.first_slot_failures), static_cast<double>(tot.delivered));
    rep.p_s_hat = ratio(static_cast<double>(tot.s1), n);
    rep.p_sr_hat = ratio(static_cast<double>(tot.s2), n);
    rep.s1_failure_rate = ratio(static_cast<double>(tot.s1_failed), static_cast<double>(tot.s1));
    rep.e_hat = ratio(static_cast<double>(tot.e), static_cast<double>(tot.s2));
    rep.g_hat = ratio(static_cast<double>(tot.eg), static_cast<double>(tot.e));
    rep.pr_energy_sufficient = ratio(static_cast<double>(tot.sufficient), static_cast<double>(tot.measured));
    rep.mean_buffer = ratio(tot.buffer_sum, static_cast<double>(tot.measured));
    rep.discharge_rate = ratio(static_cast<double>(tot.relay_tx), n);
    rep.relay_transmissions = tot.relay_tx;
    rep.wasted_discharges = tot.wasted;
    rep.max_energy_error = tot.max_energy_error;
    double acc_total = 0.0;
    for (double v : rep.accumulator_bins) acc_total += v;
    if (acc_total > 0.0) {
        for (double& v : rep.accumulator_bins) v /= acc_total;
    }
    return rep;
}

SimReport mrc_reference_run(const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t n_slots) {
    if (cfg.z != 0.0) throw std::invalid_argument("mrc_reference_run: requires z = 0");
    if (cfg.relay_timing != RelayTiming::kSameSlot) {
        throw std::invalid_argument("mrc_reference_run: only same-slot relay timing");
    }
    if (n_slots == 0) throw std::invalid_argument("mrc_reference_run: n_slots must be >= 1");
    validate(cfg);
    const LinkParams links = link_params(cfg);
    SlotStreams rng(seed, 0);

    // Plain MRC: every copy adds to the combined SNR.
    bool relay_state = false;
    double combined = 0.0;
    double peb = 0.0;
    std::uint64_t delivered = 0;
    std::uint64_t since_last = 0;
    std::uint64_t packet_slots = 0;
    std::uint64_t s1_slots = 0;
    std::vector<std::uint64_t> trace;
    for (std::uint64_t i = 0; i < n_slots; ++i) {
        const SlotDraws d = rng.draw(links, cfg.lambda1);
        ++since_last;
        bool ok = false;
        double spent = 0.0;
        if (!relay_state) {
            ++s1_slots;
            ok = d.snr_sd >= cfg.gamma_th;
            if (!ok) {
                combined += d.snr_sd;
                relay_state = d.snr_sr >= cfg.gamma_th;
            }
        } else if (combined + d.snr_sd >= cfg.gamma_th) {
            ok = true;
        } else {
            const bool relay_ok = combined + d.snr_rd >= cfg.gamma_th;
            const bool go = peb >= cfg.m_r_mj &&
                            (cfg.relay_policy == RelayPolicy::kTransmitAlways || relay_ok);
            if (go) {
                spent = cfg.m_r_mj;
                ok = relay_ok;
                if (!ok) combined += d.snr_sd + d.snr_rd;
            } else {
                combined += d.snr_sd;
            }
        }
        peb = peb - spent + d.harvest;
        if (ok) {
            ++delivered;
            packet_slots += since_last;
            since_last = 0;
            combined = 0.0;
            relay_state = false;
            trace.push_back(i);
        }
    }

    SimReport rep;
    rep.seed = seed;
    rep.n_replications = 1;
    rep.n_slots = n_slots;
    rep.burn_in = burn_in_slots(n_slots);
    rep.n_packets_delivered = delivered;
    rep.n_failed_slots = n_slots - delivered;
    rep.failure_rate = static_cast<double>(rep.n_failed_slots) / static_cast<double>(n_slots);
    rep.rep_failure_rates = {rep.failure_rate};
    rep.throughput = static_cast<double>(delivered) / static_cast<double>(n_slots) * cfg.r0;
    rep.mean_slots_per_packet = delivered ? static_cast<double>(packet_slots) / static_cast<double>(delivered) : 0.0;
    rep.p_s_hat = static_cast<double>(s1_slots) / static_cast<double>(n_slots);
    rep.p_sr_hat = 1.0 - rep.p_s_hat;
    rep.delivered_slots.push_back(std::move(trace));
    return rep;
}

}  // namespace ehgsc
