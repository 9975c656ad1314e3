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

#include "ehgsc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "ehgsc/config_io.hpp"
#include "ehgsc/errors.hpp"

namespace ehgsc {

Mode parse_mode(std::string_view s) {
    if (s == "theory") return Mode::kTheory;
    if (s == "simulate") return Mode::kSimulate;
    if (s == "compare") return Mode::kCompare;
    if (s == "sweep") return Mode::kSweep;
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

RelayPolicy parse_policy(std::string_view s) {
    if (s == "transmit-always") return RelayPolicy::kTransmitAlways;
    if (s == "transmit-when-successful") return RelayPolicy::kTransmitWhenSuccessful;
    throw ConfigError("unknown relay policy '" + std::string(s) + "'");
}

void parse_sweep(std::string_view arg, ExperimentSpec& spec) {
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--sweep expects key=v1,v2,...");
    }
    spec.sweep_key = std::string(arg.substr(0, eq));
    spec.sweep_values.clear();
    std::string_view rest = arg.substr(eq + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view v = rest.substr(0, comma);
        if (!v.empty()) spec.sweep_values.emplace_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (spec.sweep_values.empty()) throw ConfigError("--sweep grid is empty");
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return std::isnan(v) ? "" : format_double(v); }

double rel_error(double sim, double theory) {
    if (std::isnan(theory) || theory == 0.0) return kNan;
    return std::abs(sim - theory) / std::abs(theory);
}

class Row {
public:
    Row& add(const std::string& v) {
        if (!first_) s_ << ',';
        first_ = false;
        s_ << v;
        return *this;
    }
    Row& add(double v) { return add(num(v)); }
    Row& add(std::uint64_t v) { return add(std::to_string(v)); }
    Row& add(std::string_view v) { return add(std::string(v)); }
    Row& add(const char* v) { return add(std::string(v)); }
    std::string str() const { return s_.str() + "\n"; }

private:
    std::ostringstream s_;
    bool first_ = true;
};

// Output files are staged in memory and renamed into place together.
class Staging {
public:
    explicit Staging(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) {
        files_.emplace_back(dir_ / name, std::move(content));
    }

    void commit() {
        std::filesystem::create_directories(dir_);
        std::vector<std::filesystem::path> temps;
        try {
            for (const auto& [path, content] : files_) {
                auto tmp = path;
                tmp += ".tmp";
                temps.push_back(tmp);
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << content;
                out.close();
                if (!out) throw std::runtime_error("cannot write " + tmp.string());
            }
            for (std::size_t i = 0; i < files_.size(); ++i) {
                std::filesystem::rename(temps[i], files_[i].first);
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& t : temps) std::filesystem::remove(t, ec);
            throw;
        }
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

std::string preamble(const char* what, const ExperimentSpec& spec, const ParsedConfig& pc,
                     const NetworkConfig& cfg) {
    std::ostringstream s;
    s << "# ehgsc " << what << "\n";
    s << "# config_file = " << spec.config_path.string() << "\n";
    s << "# seed = " << spec.seed << "\n";
    s << "# slots = " << spec.slots << "\n";
    s << "# reps = " << spec.reps << "\n";
    if (!spec.sweep_key.empty()) {
        s << "# sweep = " << spec.sweep_key << "=";
        for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
            s << (i ? "," : "") << spec.sweep_values[i];
        }
        s << "\n";
    }
    std::istringstream lines(format_config(cfg));
    for (std::string line; std::getline(lines, line);) s << "# " << line << "\n";
    for (const auto& d : pc.applied_defaults) s << "# default applied: " << d << "\n";
    return s.str();
}

const char* kTheoryHeader =
    "w_sd,w_sr,w_rd,a,p_s,p_sr,e,g,b1,a1,psi,q1,k1,pu1,fp,b1_stationary,"
    "held_p_sr,held_e,held_g,outer_iterations,t1_iterations,t_iterations,stationarity_residual\n";

std::string theory_row(const TheoryReport& r) {
    Row row;
    row.add(r.links.w_sd).add(r.links.w_sr).add(r.links.w_rd).add(r.gsc.a);
    row.add(r.gsc.state_probs.p_s).add(r.gsc.state_probs.p_sr).add(r.gsc.e).add(r.gsc.g);
    row.add(r.b1).add(r.a1).add(r.psi).add(r.q1).add(r.k1).add(r.pu1).add(r.fp);
    row.add(r.b1_stationary);
    row.add(r.gsc.discharge_state.p_sr).add(r.gsc.discharge_e).add(r.gsc.discharge_g);
    row.add(static_cast<std::uint64_t>(r.gsc.outer_iterations));
    row.add(static_cast<std::uint64_t>(r.gsc.t1_iterations));
    row.add(static_cast<std::uint64_t>(r.gsc.t_iterations));
    row.add(r.gsc.stationarity_residual);
    return row.str();
}

const char* kSimHeader =
    "seed,n_replications,slots_per_replication,burn_in,n_slots,n_delivered,n_failed_slots,"
    "failure_rate,failure_ci_low,failure_ci_high,failure_rate_rep_variance,throughput,"
    "mean_slots_per_packet,packet_outage,p_s_hat,p_sr_hat,s1_failure_rate,e_hat,g_hat,"
    "pu1_hat,mean_buffer_mj,discharge_rate,relay_transmissions,wasted_discharges,"
    "max_energy_error_mj\n";

std::string sim_row(const SimReport& s) {
    Row row;
    row.add(s.seed).add(s.n_replications).add(s.n_slots / std::max<std::uint64_t>(1, s.n_replications));
    row.add(s.burn_in).add(s.n_slots).add(s.n_packets_delivered).add(s.n_failed_slots);
    row.add(s.failure_rate).add(s.failure_ci_low).add(s.failure_ci_high);
    row.add(s.failure_rate_rep_variance).add(s.throughput).add(s.mean_slots_per_packet);
    row.add(s.packet_outage).add(s.p_s_hat).add(s.p_sr_hat).add(s.s1_failure_rate);
    row.add(s.e_hat).add(s.g_hat).add(s.pr_energy_sufficient).add(s.mean_buffer);
    row.add(s.discharge_rate).add(s.relay_transmissions).add(s.wasted_discharges);
    row.add(s.max_energy_error);
    return row.str();
}

std::string pdf_csv(const TheoryReport& r) {
    const BufferPdf pdf(r.b1, r.config.lambda1, r.config.m_r_mj);
    const double m = r.config.m_r_mj;
    const double x_max = std::min(50.0 * m, std::max(2.0 * m, m + std::log(1e-8) / pdf.q1()));
    constexpr int kPoints = 401;
    std::string out = "x_mj,density,cdf\n";
    for (int i = 0; i < kPoints; ++i) {
        const double x = x_max * i / (kPoints - 1);
        out += Row().add(x).add(pdf.density(x)).add(pdf.cdf(x)).str();
    }
    return out;
}

std::string histogram_csv(const SimReport& s, const TheoryReport* theory) {
    const auto& h = s.histogram;
    const double total = static_cast<double>(h.total());
    std::optional<BufferPdf> pdf;
    if (theory) pdf.emplace(theory->b1, theory->config.lambda1, theory->config.m_r_mj);
    std::string out = theory ? "bin_lo_mj,bin_hi_mj,count,density,cdf,theory_density,theory_cdf\n"
                             : "bin_lo_mj,bin_hi_mj,count,density,cdf\n";
    std::uint64_t cum = 0;
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        const double lo = h.bin_width * static_cast<double>(k);
        const double hi = lo + h.bin_width;
        cum += h.counts[k];
        Row row;
        row.add(lo).add(hi).add(h.counts[k]);
        row.add(total > 0 ? static_cast<double>(h.counts[k]) / (total * h.bin_width) : 0.0);
        row.add(total > 0 ? static_cast<double>(cum) / total : 0.0);
        if (pdf) row.add(pdf->density(0.5 * (lo + hi))).add(pdf->cdf(hi));
        out += row.str();
    }
    Row row;
    row.add(h.bin_width * static_cast<double>(h.counts.size())).add("inf").add(h.overflow);
    row.add(0.0).add(1.0);
    if (pdf) row.add(0.0).add(1.0);
    out += row.str();
    return out;
}

SimOptions sim_options(const ExperimentSpec& spec) {
    SimOptions o;
    o.seed = spec.seed;
    o.n_slots = spec.slots;
    o.n_replications = spec.reps;
    return o;
}

NetworkConfig with_policy(NetworkConfig c, RelayPolicy p) {
    c.relay_policy = p;
    return c;
}

std::string policies_csv(const std::vector<PolicyCell>& cells) {
    std::string out = "sim_policy,formula_policy,matched,fp_theory,failure_rate_sim,rel_error\n";
    for (const auto& c : cells) {
        out += Row()
                   .add(to_string(c.sim_policy))
                   .add(to_string(c.formula_policy))
                   .add(c.matched() ? "yes" : "no")
                   .add(c.fp_theory)
                   .add(c.fr_sim)
                   .add(c.rel_error)
                   .str();
    }
    return out;
}

struct SweepPoint {
    std::string value;
    std::string status = "ok";
    std::optional<TheoryReport> theory;
    SimReport sim;
};

NetworkConfig sweep_config(const NetworkConfig& base, const ParsedConfig& pc, const std::string& key,
                           const std::string& value) {
    NetworkConfig c = base;
    apply_setting(c, key, value);
    const bool derived_gamma =
        std::any_of(pc.applied_defaults.begin(), pc.applied_defaults.end(),
                    [](const std::string& d) { return d.rfind("gamma_th =", 0) == 0; });
    if (key == "r0" && derived_gamma) c.gamma_th = std::exp2(c.r0) - 1.0;
    validate(c);
    return c;
}

}  // namespace

std::vector<PolicyCell> policy_matrix(const NetworkConfig& cfg, const SimOptions& opt) {
    const RelayPolicy all[] = {RelayPolicy::kTransmitAlways, RelayPolicy::kTransmitWhenSuccessful};
    double fp[2] = {kNan, kNan};
    for (int f = 0; f < 2; ++f) {
        try {
            fp[f] = theory_report(with_policy(cfg, all[f])).fp;
        } catch (const InstabilityError&) {
        } catch (const DegeneracyError&) {
        }
    }
    SimOptions o = opt;
    o.keep_buffer_trace = false;
    o.keep_delivery_trace = false;
    std::vector<PolicyCell> cells;
    for (int s = 0; s < 2; ++s) {
        const SimReport sim = run_simulation(with_policy(cfg, all[s]), o);
        for (int f = 0; f < 2; ++f) {
            PolicyCell c{all[s], all[f]};
            c.fp_theory = fp[f];
            c.fr_sim = sim.failure_rate;
            c.rel_error = rel_error(sim.failure_rate, fp[f]);
            cells.push_back(c);
        }
    }
    return cells;
}

double buffer_ks(const TheoryReport& theory, const SimReport& sim) {
    const BufferPdf pdf(theory.b1, theory.config.lambda1, theory.config.m_r_mj);
    return ks_distance(sim.buffer_trace, [&pdf](double x) { return pdf.cdf(x); });
}

namespace {

int run_modes(const ExperimentSpec& spec, std::ostream& log) {
    if (spec.slots == 0) throw ConfigError("--slots must be >= 1");
    if (spec.reps == 0) throw ConfigError("--reps must be >= 1");
    const ParsedConfig pc = load_config(spec.config_path);
    NetworkConfig cfg = pc.config;
    if (spec.policy) cfg.relay_policy = *spec.policy;
    for (const auto& d : pc.applied_defaults) log << "default applied: " << d << "\n";

    Staging files(spec.out_dir);
    switch (spec.mode) {
        case Mode::kTheory: {
            const TheoryReport r = theory_report(cfg);
            const std::string pre = preamble("theory", spec, pc, cfg);
            files.add("theory.csv", pre + kTheoryHeader + theory_row(r));
            files.add("pdf.csv", pre + pdf_csv(r));
            log << "fp = " << format_double(r.fp) << ", psi = " << format_double(r.psi)
                << ", pu1 = " << format_double(r.pu1) << "\n";
            break;
        }
        case Mode::kSimulate: {
            const SimReport s = run_simulation(cfg, sim_options(spec));
            const std::string pre = preamble("simulate", spec, pc, cfg);
            files.add("sim.csv", pre + kSimHeader + sim_row(s));
            files.add("histogram.csv", pre + histogram_csv(s, nullptr));
            log << "failure_rate = " << format_double(s.failure_rate) << "\n";
            break;
        }
        case Mode::kCompare: {
            const TheoryReport r = theory_report(cfg);
            SimOptions o = sim_options(spec);
            o.keep_buffer_trace = true;
            const SimReport s = run_simulation(cfg, o);
            const double ks = buffer_ks(r, s);
            const std::string pre = preamble("compare", spec, pc, cfg);

            std::string cmp = "quantity,theory,sim,abs_error,rel_error,ks_distance\n";
            auto line = [&](const char* q, double th, double sm, double ksv) {
                cmp += Row().add(q).add(th).add(sm).add(std::abs(sm - th)).add(rel_error(sm, th)).add(ksv).str();
            };
            line("p_s", r.gsc.state_probs.p_s, s.p_s_hat, kNan);
            line("p_sr", r.gsc.state_probs.p_sr, s.p_sr_hat, kNan);
            line("e", r.gsc.e, s.e_hat, kNan);
            line("g", r.gsc.g, s.g_hat, kNan);
            line("s1_failure", r.gsc.a, s.s1_failure_rate, kNan);
            line("pu1", r.pu1, s.pr_energy_sufficient, kNan);
            line("fp", r.fp, s.failure_rate, kNan);
            line("buffer_cdf", kNan, kNan, ks);

            files.add("compare.csv", pre + cmp);
            files.add("theory.csv", pre + kTheoryHeader + theory_row(r));
            files.add("sim.csv", pre + kSimHeader + sim_row(s));
            files.add("pdf.csv", pre + pdf_csv(r));
            files.add("histogram.csv", pre + histogram_csv(s, &r));
            files.add("policies.csv", pre + policies_csv(policy_matrix(cfg, sim_options(spec))));
            log << "fp theory = " << format_double(r.fp) << ", sim = " << format_double(s.failure_rate)
                << ", buffer KS = " << format_double(ks) << "\n";
            break;
        }
        case Mode::kSweep: {
            if (spec.sweep_key.empty() || spec.sweep_values.empty()) {
                throw ConfigError("sweep mode needs --sweep key=v1,v2,...");
            }
            std::vector<NetworkConfig> cfgs;
            for (const auto& v : spec.sweep_values) cfgs.push_back(sweep_config(cfg, pc, spec.sweep_key, v));

            const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
            SimOptions o = sim_options(spec);
            o.threads = std::max<unsigned>(1, hw / static_cast<unsigned>(cfgs.size()));
            std::vector<std::future<SweepPoint>> jobs;
            for (std::size_t i = 0; i < cfgs.size(); ++i) {
                jobs.push_back(std::async(std::launch::async, [&, i] {
                    SweepPoint p;
                    p.value = spec.sweep_values[i];
                    try {
                        p.theory = theory_report(cfgs[i]);
                    } catch (const InstabilityError&) {
                        p.status = "unstable";
                    } catch (const DegeneracyError&) {
                        p.status = "unstable";
                    } catch (const ConvergenceError&) {
                        p.status = "nonconvergent";
                    }
                    p.sim = run_simulation(cfgs[i], o);
                    return p;
                }));
            }
            std::string body =
                "key,value,status,p_s,p_sr,e,g,b1,psi,pu1_theory,fp_theory,failure_rate_sim,"
                "failure_ci_low,failure_ci_high,rel_error,pu1_sim,p_s_hat,throughput,"
                "mean_slots_per_packet\n";
            for (auto& j : jobs) {
                const SweepPoint p = j.get();
                const TheoryReport* t = p.theory ? &*p.theory : nullptr;
                Row row;
                row.add(spec.sweep_key).add(p.value).add(p.status);
                row.add(t ? t->gsc.state_probs.p_s : kNan).add(t ? t->gsc.state_probs.p_sr : kNan);
                row.add(t ? t->gsc.e : kNan).add(t ? t->gsc.g : kNan).add(t ? t->b1 : kNan);
                row.add(t ? t->psi : kNan).add(t ? t->pu1 : kNan).add(t ? t->fp : kNan);
                row.add(p.sim.failure_rate).add(p.sim.failure_ci_low).add(p.sim.failure_ci_high);
                row.add(rel_error(p.sim.failure_rate, t ? t->fp : kNan));
                row.add(p.sim.pr_energy_sufficient).add(p.sim.p_s_hat).add(p.sim.throughput);
                row.add(p.sim.mean_slots_per_packet);
                body += row.str();
                log << spec.sweep_key << " = " << p.value << ": " << p.status << "\n";
            }
            files.add("sweep.csv", preamble("sweep", spec, pc, cfg) + body);
            break;
        }
    }
    files.commit();
    return kExitOk;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec, std::ostream& log) {
    try {
        return run_modes(spec, log);
    } catch (const ConfigError& ex) {
        log << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const InstabilityError& ex) {
        log << "instability: " << ex.what() << "\n";
        return kExitInstability;
    } catch (const DegeneracyError& ex) {
        log << "instability: " << ex.what() << "\n";
        return kExitInstability;
    } catch (const ConvergenceError& ex) {
        log << "non-convergence: " << ex.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& ex) {
        log << "error: " << ex.what() << "\n";
        return kExitOther;
    }
}

}  // namespace ehgsc
