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

#include "ehgsc/stm_analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ehgsc/energy_analysis.hpp"
#include "ehgsc/errors.hpp"

namespace ehgsc {

namespace {

// Folds entries past `len - 1` into the last slot.
ProbVector clip_to(ProbVector v, std::size_t len) {
    if (v.size() <= len) {
        v.resize(len, 0.0);
        return v;
    }
    double over = 0.0;
    for (std::size_t i = len; i < v.size(); ++i) over += v[i];
    v.resize(len);
    v[len - 1] += over;
    return v;
}

// Level i plus an increment distribution, overflow folded into index `cap`.
ProbVector shift_into(const ProbVector& incr, std::size_t i, std::size_t len, std::size_t cap) {
    ProbVector out(len, 0.0);
    for (std::size_t j = 0; j < incr.size(); ++j) {
        const std::size_t k = std::min(i + j, cap);
        out[k] += incr[j];
    }
    return out;
}

ProbVector stationary_of(const Stm& t, std::size_t* iterations, double* residual) {
    const std::size_t n = t.size();
    ProbVector init(n, 1.0 / static_cast<double>(n));
    auto res = fixed_point([&t](const ProbVector& p) { return t.left_multiply(p); },
                           std::move(init));
    if (!res.converged) {
        std::ostringstream msg;
        msg << "stationary iteration did not converge after " << res.iterations
            << " steps (last change " << res.residual << ")";
        throw ConvergenceError(msg.str());
    }
    if (iterations) *iterations = res.iterations;
    if (residual) {
        *residual = max_abs_diff(t.left_multiply(res.vector), res.vector);
    }
    return res.vector;
}

void require_lattice_size(std::span<const double> v, const SnrLattice& lat, const char* name) {
    if (v.size() != lat.size()) {
        throw std::invalid_argument(std::string("compute_e_g: ") + name + " has " +
                                    std::to_string(v.size()) + " entries, lattice needs " +
                                    std::to_string(lat.size()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Bins

std::size_t BinGrid::bin_of(double v) const {
    if (v >= gamma_th) return n_bins;
    if (v <= a2[0]) return 0;
    const double width = (gamma_th - z * gamma_th) / static_cast<double>(n_bins - 1);
    auto k = static_cast<std::size_t>((v - a1[1]) / width) + 1;
    return std::min(k, n_bins - 1);
}

BinGrid build_bins(double z, double gamma_th, std::size_t n_bins) {
    if (n_bins < 2) throw std::invalid_argument("build_bins: need at least 2 bins");
    if (!(gamma_th > 0.0)) throw std::invalid_argument("build_bins: gamma_th must be positive");
    if (!(z >= 0.0 && z < 1.0)) throw std::invalid_argument("build_bins: z must lie in [0,1)");
    BinGrid g;
    g.z = z;
    g.gamma_th = gamma_th;
    g.n_bins = n_bins;
    g.a1.resize(n_bins);
    g.a2.resize(n_bins);
    const double lo = z * gamma_th;
    const double width = (gamma_th - lo) / static_cast<double>(n_bins - 1);
    g.a1[0] = 0.0;
    g.a2[0] = lo;
    for (std::size_t k = 1; k < n_bins; ++k) {
        g.a1[k] = lo + static_cast<double>(k - 1) * width;
        g.a2[k] = k + 1 == n_bins ? gamma_th : lo + static_cast<double>(k) * width;
    }
    return g;
}

ProbVector marginal_bin_probs(const BinGrid& grid, double w) {
    ProbVector p(grid.n_bins + 1);
    for (std::size_t k = 0; k < grid.n_bins; ++k) {
        p[k] = snr_outage_cdf(w, grid.a2[k]) - snr_outage_cdf(w, grid.a1[k]);
    }
    p[grid.n_bins] = std::exp(-w * grid.gamma_th);
    return p;
}

// ---------------------------------------------------------------------------
// Stm

ProbVector Stm::left_multiply(std::span<const double> p) const {
    if (p.size() != n_) throw std::invalid_argument("Stm::left_multiply: size mismatch");
    ProbVector out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double pi = p[i];
        if (pi == 0.0) continue;
        const double* r = data_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) out[j] += pi * r[j];
    }
    return out;
}

double Stm::max_row_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (double v : row(i)) s += v;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

void Stm::normalize_rows() {
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (double v : row(i)) s += v;
        if (!(s > 0.0)) {
            throw std::domain_error("Stm: row " + std::to_string(i) + " has no mass");
        }
        for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) /= s;
    }
}

// ---------------------------------------------------------------------------
// Lattice

SnrLattice make_lattice(const BinGrid& grid) { return SnrLattice{grid.gamma_th, 2 * grid.n_bins}; }

ProbVector lattice_bin_probs(const SnrLattice& lat, double w) {
    const double h = lat.step();
    ProbVector p(lat.size());
    for (std::size_t j = 0; j < lat.cells; ++j) {
        p[j] = snr_outage_cdf(w, static_cast<double>(j + 1) * h) -
               snr_outage_cdf(w, static_cast<double>(j) * h);
    }
    p[lat.cells] = std::exp(-w * lat.gamma_th);
    return p;
}

ProbVector lattice_copy_pmf(const SnrLattice& lat, double w, double limit,
                            double select_threshold) {
    ProbVector p(lat.size(), 0.0);
    const double total = snr_outage_cdf(w, limit);
    if (!(total > 0.0)) {
        p[0] = 1.0;
        return p;
    }
    const double h = lat.step();
    auto cdf_at = [&](double x) { return snr_outage_cdf(w, std::min(x, limit)); };
    // Discarded copies contribute nothing.
    p[0] = cdf_at(select_threshold);
    double prev = p[0];
    // Copies below gamma_th round to the nearest point under the tail.
    for (std::size_t k = 0; k < lat.cells; ++k) {
        const double upper = k + 1 == lat.cells
                                 ? lat.gamma_th
                                 : std::max((static_cast<double>(k) + 0.5) * h, select_threshold);
        const double c = std::max(prev, cdf_at(upper));
        p[k] += c - prev;
        prev = c;
    }
    p[lat.cells] += total - prev;
    for (double& v : p) v /= total;
    return p;
}

ProbVector aggregate_to_bins(std::span<const double> lattice_dist, const SnrLattice& lat,
                             const BinGrid& grid) {
    if (lattice_dist.size() != lat.size()) {
        throw std::invalid_argument("aggregate_to_bins: size mismatch");
    }
    // Point 0 is an exact zero; every other point stands for its rounding
    // cell, spread uniformly over the bins it overlaps.
    ProbVector out(grid.n_bins + 1, 0.0);
    out[0] += lattice_dist[0];
    const double h = lat.step();
    for (std::size_t k = 1; k < lat.cells; ++k) {
        const double mass = lattice_dist[k];
        if (mass == 0.0) continue;
        // A non-zero accumulator holds at least one selected copy.
        const double lo = std::max((static_cast<double>(k) - 0.5) * h, grid.a2[0]);
        const double hi = k + 1 == lat.cells ? lat.gamma_th : (static_cast<double>(k) + 0.5) * h;
        if (!(hi > lo)) {
            out[grid.bin_of(lo)] += mass;
            continue;
        }
        for (std::size_t b = grid.bin_of(lo); b < grid.n_bins; ++b) {
            const double overlap = std::min(hi, grid.a2[b]) - std::max(lo, grid.a1[b]);
            if (overlap > 0.0) out[b] += mass * overlap / (hi - lo);
            if (grid.a2[b] >= hi) break;
        }
    }
    out[grid.n_bins] += lattice_dist[lat.cells];
    return out;
}

// ---------------------------------------------------------------------------
// Accumulator model

AccumulatorModel build_accumulator_model(const NetworkConfig& cfg, const LinkParams& links,
                                         const SnrLattice& lat) {
    const std::size_t len = lat.size();
    const double gth = lat.gamma_th;
    const double thr = cfg.selection_threshold();

    AccumulatorModel m;
    m.lattice = lat;
    m.a = snr_outage_cdf(links.w_sd, gth);
    m.f_sr = snr_outage_cdf(links.w_sr, gth);
    m.q = m.a * (1.0 - m.f_sr);
    m.p_sd = lattice_bin_probs(lat, links.w_sd);
    m.p_rd = lattice_bin_probs(lat, links.w_rd);

    // Accumulated copies over the s1 run that ends with the move to s2:
    // k failed S slots with probability proportional to rho^{k-1}.
    const ProbVector c1 = lattice_copy_pmf(lat, links.w_sd, gth, thr);
    const double rho = m.a * m.f_sr;
    m.entry.assign(len, 0.0);
    ProbVector cur = c1;
    double weight = 1.0;
    double total = 0.0;
    for (int k = 1; k < 10000 && weight > 1e-18; ++k) {
        for (std::size_t i = 0; i < len; ++i) m.entry[i] += weight * cur[i];
        total += weight;
        weight *= rho;
        cur = clip_to(discrete_conv(cur, c1), len);
    }
    for (double& v : m.entry) v /= total;

    m.e_level.assign(len, 0.0);
    m.g_level.assign(len, 0.0);
    m.fail_sd.assign(len, ProbVector(len, 0.0));
    m.fail_sdrd.assign(len, ProbVector(len, 0.0));
    for (std::size_t i = 0; i < len; ++i) {
        if (i == lat.cells) {
            m.fail_sd[i][i] = 1.0;
            m.fail_sdrd[i][i] = 1.0;
            continue;
        }
        const double room = gth - lat.value(i);
        m.e_level[i] = snr_outage_cdf(links.w_sd, room);
        m.g_level[i] = snr_outage_cdf(links.w_rd, room);
        const ProbVector px = lattice_copy_pmf(lat, links.w_sd, room, thr);
        const ProbVector py = lattice_copy_pmf(lat, links.w_rd, room, thr);
        // A failed slot with S alone leaves acc + x < Gamma_th; with both
        // copies the sum may still cross it.
        m.fail_sd[i] = shift_into(px, i, len, lat.cells - 1);
        m.fail_sdrd[i] = shift_into(clip_to(discrete_conv(px, py), len), i, len, lat.cells);
    }
    return m;
}

Stm build_t1(const AccumulatorModel& model, double pu1, RelayPolicy policy) {
    if (!(pu1 >= 0.0 && pu1 <= 1.0)) throw std::invalid_argument("build_t1: pu1 outside [0,1]");
    const std::size_t len = model.lattice.size();
    Stm t(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double e = model.e_level[i];
        const double g = model.g_level[i];
        const double deliver = (1.0 - e) + pu1 * e * (1.0 - g);
        double m_sd = 0.0;
        double m_sdrd = 0.0;
        if (policy == RelayPolicy::kTransmitAlways) {
            m_sd = (1.0 - pu1) * e;
            m_sdrd = pu1 * e * g;
        } else {
            m_sd = e - pu1 * e * (1.0 - g);
        }
        for (std::size_t j = 0; j < len; ++j) {
            t(i, j) = deliver * model.entry[j] + m_sd * model.fail_sd[i][j] +
                      m_sdrd * model.fail_sdrd[i][j];
        }
    }
    t.normalize_rows();
    return t;
}

EgPair compute_e_g(std::span<const double> overall, std::span<const double> p_sd,
                   std::span<const double> p_rd, const SnrLattice& lat) {
    require_lattice_size(overall, lat, "accumulator distribution");
    require_lattice_size(p_sd, lat, "SD masses");
    require_lattice_size(p_rd, lat, "RD masses");
    const std::size_t cells = lat.cells;

    const ProbVector conv_sd = discrete_conv(overall, p_sd);
    EgPair r;
    for (std::size_t m = 0; m < cells; ++m) r.e += conv_sd[m];

    // Weight of level k inside E, read off the same convolution per level.
    ProbVector w(lat.size(), 0.0);
    double wsum = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
        double fk = 0.0;
        for (std::size_t j = 0; j + k < cells; ++j) fk += p_sd[j];
        w[k] = overall[k] * fk;
        wsum += w[k];
    }
    if (wsum > 0.0) {
        const ProbVector conv_rd = discrete_conv(w, p_rd);
        double num = 0.0;
        for (std::size_t m = 0; m < cells; ++m) num += conv_rd[m];
        r.g = num / wsum;
    }
    r.e = std::clamp(r.e, 0.0, 1.0);
    r.g = std::clamp(r.g, 0.0, 1.0);
    return r;
}

Stm build_t(double e, double g, double pu1, const LinkParams& links, double gamma_th) {
    const double a = snr_outage_cdf(links.w_sd, gamma_th);
    const double f_sr = snr_outage_cdf(links.w_sr, gamma_th);
    Stm t(2);
    t(0, 0) = a * f_sr + (1.0 - a);
    t(0, 1) = a * (1.0 - f_sr);
    const double p21 = (1.0 - e) + pu1 * e * (1.0 - g);
    t(1, 0) = p21;
    t(1, 1) = 1.0 - p21;
    t.normalize_rows();
    return t;
}

// ---------------------------------------------------------------------------
// Held-quantum statistics

HeldQuantumProbs held_quantum_probs(const AccumulatorModel& model, RelayPolicy policy) {
    const std::size_t len = model.lattice.size();
    const Eigen::Index n = static_cast<Eigen::Index>(len + 1);  // 0 = s1, 1+k = s2 level k

    // Chain with the relay silent.
    Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(n, n);
    // Energy-available chain restricted to transitions without a discharge.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    p0(0, 0) = 1.0 - model.q;
    q(0, 0) = 1.0 - model.q;
    for (std::size_t k = 0; k < len; ++k) {
        const auto c = static_cast<Eigen::Index>(k + 1);
        p0(0, c) = model.q * model.entry[k];
        q(0, c) = model.q * model.entry[k];
    }
    for (std::size_t k = 0; k < len; ++k) {
        const auto r = static_cast<Eigen::Index>(k + 1);
        const double e = model.e_level[k];
        const double g = model.g_level[k];
        p0(r, 0) = 1.0 - e;
        q(r, 0) = 1.0 - e;
        for (std::size_t j = 0; j < len; ++j) {
            const auto c = static_cast<Eigen::Index>(j + 1);
            p0(r, c) += e * model.fail_sd[k][j];
            if (policy == RelayPolicy::kTransmitWhenSuccessful) {
                q(r, c) += e * g * model.fail_sd[k][j];
            }
        }
    }

    // pi0 (I - P0) = 0 with sum(pi0) = 1.
    Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(n, n) - p0).transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd pi0 = a.partialPivLu().solve(rhs);

    // Occupation measure before the first discharge: nu (I - Q) = pi0.
    const Eigen::MatrixXd b = (Eigen::MatrixXd::Identity(n, n) - q).transpose();
    const Eigen::VectorXd nu = b.partialPivLu().solve(pi0);

    double total = 0.0;
    double s2 = 0.0;
    double ne = 0.0;
    double neg = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += nu(i);
    for (std::size_t k = 0; k < len; ++k) {
        const double v = nu(static_cast<Eigen::Index>(k + 1));
        s2 += v;
        ne += v * model.e_level[k];
        neg += v * model.e_level[k] * model.g_level[k];
    }
    if (!(total > 0.0) || !std::isfinite(total) || !(s2 > 0.0) || !(ne > 0.0)) {
        throw std::domain_error("held_quantum_probs: relay never gets to transmit");
    }
    HeldQuantumProbs h;
    h.state.p_sr = std::clamp(s2 / total, 0.0, 1.0);
    h.state.p_s = 1.0 - h.state.p_sr;
    h.e = std::clamp(ne / s2, 0.0, 1.0);
    h.g = std::clamp(neg / ne, 0.0, 1.0);
    h.mean_wait_slots = total;
    return h;
}

// ---------------------------------------------------------------------------
// Joint solve

GscSolution solve_joint(const NetworkConfig& cfg) {
    validate(cfg);
    const LinkParams links = link_params(cfg);
    const BinGrid grid = build_bins(cfg.z, cfg.gamma_th, cfg.n_bins);
    const SnrLattice lat = make_lattice(grid);
    const AccumulatorModel model = build_accumulator_model(cfg, links, lat);
    const bool held = cfg.discharge_model == DischargeModel::kHeldQuantum;

    GscSolution sol;
    sol.a = model.a;

    HeldQuantumProbs hq;
    double held_b1 = 0.0;
    if (held) {
        hq = held_quantum_probs(model, cfg.relay_policy);
        held_b1 = coefficients_a1_b1(hq.state.p_s, hq.state.p_sr, hq.e, hq.g, cfg.relay_policy).b1;
    }

    const double lm = cfg.lambda1 * cfg.m_r_mj;
    double pu1 = held && held_b1 * lm > 0.0 ? std::min(1.0, 1.0 / (held_b1 * lm)) : 1.0;

    for (std::size_t outer = 1; outer <= kMaxOuterIterations; ++outer) {
        const Stm t1 = build_t1(model, pu1, cfg.relay_policy);
        std::size_t it1 = 0;
        double res1 = 0.0;
        ProbVector overall = stationary_of(t1, &it1, &res1);
        const EgPair eg = compute_e_g(overall, model.p_sd, model.p_rd, lat);

        const Stm t = build_t(eg.e, eg.g, pu1, links, cfg.gamma_th);
        std::size_t it2 = 0;
        const ProbVector st = stationary_of(t, &it2, nullptr);

        StateProbs sp{st[0], st[1]};
        StateProbs dstate = held ? hq.state : sp;
        const double de = held ? hq.e : eg.e;
        const double dg = held ? hq.g : eg.g;
        const double b1 = held ? held_b1
                               : coefficients_a1_b1(sp.p_s, sp.p_sr, eg.e, eg.g, cfg.relay_policy).b1;
        const double psi = b1 * lm;
        const double target = psi > 0.0 ? std::min(1.0, 1.0 / psi) : 1.0;

        sol.state_probs = sp;
        sol.overall_dist = std::move(overall);
        sol.e = eg.e;
        sol.g = eg.g;
        sol.pu1 = pu1;
        sol.b1 = b1;
        sol.psi = psi;
        sol.discharge_state = dstate;
        sol.discharge_e = de;
        sol.discharge_g = dg;
        sol.t1_iterations += it1;
        sol.t_iterations += it2;
        sol.outer_iterations = outer;
        sol.stationarity_residual = res1;

        if (std::abs(target - pu1) < kFixedPointTol) {
            if (!(psi > 1.0)) {
                std::ostringstream msg;
                msg << "relay buffer unstable: psi_R = " << psi << " <= 1";
                throw InstabilityError(msg.str(), psi);
            }
            sol.pu1 = target;
            sol.bin_occupancy = aggregate_to_bins(sol.overall_dist, lat, grid);
            return sol;
        }
        pu1 = 0.5 * pu1 + 0.5 * target;
    }
    throw ConvergenceError("solve_joint: energy availability did not settle after " +
                           std::to_string(kMaxOuterIterations) + " passes");
}

}  // namespace ehgsc
