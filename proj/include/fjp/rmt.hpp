// Finite-N Monte Carlo approximant of the free model: Brownian motion on
// U(N) by the multiplicative scheme Y <- Y exp(i sqrt(dt) X) with GUE-type
// Hermitian increments normalized so E[X^2] = I, compressed by the diagonal
// projection P of rank round(N(1+kappa)/2).
//
//   u_n = (1/N) Re Tr (S Y S Y*)^n,  S = 2P - I
//   j_n = (1/r) Tr (Y11 Y11*)^n,     Y11 = top-left r x r block
//
// The expansion of (P Y P Y*)^n makes the binomial moment relation an exact
// algebraic identity between the two families at finite N; it is checked on
// the same samples.
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fjp/moments.hpp"

namespace fjp {

struct SimConfig {
    int matrix_size = 64;  // N >= 2
    double kappa = 0.0;
    double t = 1.0;
    double dt = 0.01;  // <= 0.05 (scheme accuracy guard)
    int trials = 8;
    std::uint64_t seed = 1;
    int n_max = 4;
    int max_threads = 0;  // 0 -> hardware concurrency

    int projection_rank() const;
    void validate() const;
};

struct rmt_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// one unitary per trial, evolved to time t; unitary to 1e-10 (polar
// correction every 50 steps)
std::vector<Eigen::MatrixXcd> sample_unitary_bm(const SimConfig& cfg);

struct EmpiricalMoments {
    MomentTable table;             // source = monte_carlo, stderr attached
    double max_binom_residual;     // finite-N binomial identity on the samples
    double max_imag_residue;       // |Im tr U^n|/N, should be O(1/N)
    double max_unitarity_defect;   // ||Y*Y - I||_max over trials
};

EmpiricalMoments empirical_moments_detailed(const SimConfig& cfg);
MomentTable empirical_moments(const SimConfig& cfg);

// empirical moments at several times along the same trajectories (time grid
// must be increasing; reuses the evolution, trials stay coupled across times)
std::vector<EmpiricalMoments> empirical_moments_sweep(const SimConfig& cfg,
                                                      const std::vector<double>& times);

}  // namespace fjp
