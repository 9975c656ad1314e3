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
#include <span>
#include <vector>

#include "ehgsc/channel.hpp"
#include "ehgsc/config.hpp"
#include "ehgsc/numerics.hpp"

namespace ehgsc {

/// GSC quantization of the accumulated SNR. Bin 0 is [0, z*Gamma_th]; bins
/// 1..N-1 split [z*Gamma_th, Gamma_th] into equal slices.
struct BinGrid {
    double z = 0.0;
    double gamma_th = 0.0;
    std::size_t n_bins = 0;
    std::vector<double> a1;  // lower edges
    std::vector<double> a2;  // upper edges

    /// Bin index holding SNR v; n_bins for v >= gamma_th.
    std::size_t bin_of(double v) const;
};

BinGrid build_bins(double z, double gamma_th, std::size_t n_bins);

/// Per-bin probability of an exponential SNR with rate w, plus a trailing
/// entry for the mass above gamma_th (length n_bins + 1, sums to 1).
ProbVector marginal_bin_probs(const BinGrid& grid, double w);

/// Dense row-stochastic matrix.
class Stm {
public:
    explicit Stm(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

    /// p * T
    ProbVector left_multiply(std::span<const double> p) const;

    /// Largest |row sum - 1|.
    double max_row_error() const;

    /// Throws std::domain_error naming the first all-zero row.
    void normalize_rows();

private:
    std::size_t n_;
    std::vector<double> data_;
};

struct StateProbs {
    double p_s = 0.5;
    double p_sr = 0.5;
};

/// Uniform SNR lattice used for the accumulator arithmetic: points k*h for
/// k < cells with h = gamma_th / cells, and index `cells` standing for any
/// accumulated SNR >= gamma_th.
struct SnrLattice {
    double gamma_th = 0.0;
    std::size_t cells = 0;

    double step() const { return gamma_th / static_cast<double>(cells); }
    double value(std::size_t k) const { return static_cast<double>(k) * step(); }
    std::size_t size() const { return cells + 1; }
};

/// Lattice matched to a bin grid (2 points per bin).
SnrLattice make_lattice(const BinGrid& grid);

/// Floor-binned SNR masses: entry j is Pr{j h <= x < (j+1) h}, last entry the
/// mass above gamma_th.
ProbVector lattice_bin_probs(const SnrLattice& lat, double w);

/// Distribution of a GSC contribution from one copy with rate w, conditioned
/// on x < limit: copies below `select_threshold` are discarded (index 0), the
/// rest are rounded to the nearest lattice point.
ProbVector lattice_copy_pmf(const SnrLattice& lat, double w, double limit,
                            double select_threshold);

/// Sums lattice masses into grid bins (length n_bins + 1).
ProbVector aggregate_to_bins(std::span<const double> lattice_dist, const SnrLattice& lat,
                             const BinGrid& grid);

/// Per-level ingredients of the accumulator chain in transmitter state s2.
struct AccumulatorModel {
    SnrLattice lattice;
    double a = 0.0;       // Pr{gamma_SD < Gamma_th}
    double f_sr = 0.0;    // Pr{gamma_SR < Gamma_th}
    double q = 0.0;       // Pr{s1 -> s2}
    ProbVector p_sd;      // lattice_bin_probs for SD
    ProbVector p_rd;      // lattice_bin_probs for RD
    ProbVector e_level;   // Pr{acc + gamma_SD < Gamma_th | acc = level k}
    ProbVector g_level;   // Pr{acc + gamma_RD < Gamma_th | acc = level k}
    ProbVector entry;     // accumulator on the first s2 slot of an episode
    std::vector<ProbVector> fail_sd;    // next level after a failed slot, S copy only
    std::vector<ProbVector> fail_sdrd;  // next level after a failed slot with R's copy too
};

AccumulatorModel build_accumulator_model(const NetworkConfig& cfg, const LinkParams& links,
                                         const SnrLattice& lat);

/// Accumulator transition matrix over consecutive s2 slots at energy
/// availability pu1: a failed slot moves the level by the eligible fresh
/// copies, a delivery restarts from the entry distribution.
Stm build_t1(const AccumulatorModel& model, double pu1, RelayPolicy policy);

struct EgPair {
    double e = 0.0;
    double g = 0.0;
};

/// e = Pr{acc + gamma_SD < Gamma_th}, g = Pr{acc + gamma_RD < Gamma_th | E},
/// both read off the discrete convolution of the accumulator distribution
/// with the floor-binned link masses. Throws std::invalid_argument when the
/// vectors do not match the lattice.
EgPair compute_e_g(std::span<const double> overall, std::span<const double> p_sd,
                   std::span<const double> p_rd, const SnrLattice& lat);

/// 2x2 transmitter-state matrix over {s1 = {S}, s2 = {S,R}}.
Stm build_t(double e, double g, double pu1, const LinkParams& links, double gamma_th);

/// Transmitter/accumulator statistics while the relay holds a quantum,
/// obtained from the occupation measure of the energy-available chain started
/// in the no-energy stationary law and stopped at the first discharge.
struct HeldQuantumProbs {
    StateProbs state;
    double e = 0.0;
    double g = 0.0;
    double mean_wait_slots = 0.0;
};

HeldQuantumProbs held_quantum_probs(const AccumulatorModel& model, RelayPolicy policy);

struct GscSolution {
    StateProbs state_probs;
    ProbVector overall_dist;   // accumulator law over s2 slots, lattice points
    ProbVector bin_occupancy;  // same, summed into the bin grid
    double e = 0.0;
    double g = 0.0;
    double a = 0.0;
    double pu1 = 0.0;
    double b1 = 0.0;
    double psi = 0.0;
    /// State probabilities, e and g that produced b1 (held-quantum or stationary).
    StateProbs discharge_state;
    double discharge_e = 0.0;
    double discharge_g = 0.0;
    std::size_t t1_iterations = 0;
    std::size_t t_iterations = 0;
    std::size_t outer_iterations = 0;
    double stationarity_residual = 0.0;  // ||pT - p||_inf
};

inline constexpr std::size_t kMaxOuterIterations = 1000;

/// Nested fixed point: accumulator law under T1, transmitter state under T,
/// then pu1 = 1/(b1 lambda1 M_R) (clamped to [0,1], damped by 1/2) until pu1
/// moves less than 1e-7. Throws ConvergenceError or InstabilityError.
GscSolution solve_joint(const NetworkConfig& cfg);

}  // namespace ehgsc
