#pragma once

#include "lwebench/common.hpp"

namespace lwebench::estimate {

struct CostReport {
  std::string model;
  int beta = 0;
  int lattice_dim = 0;
  double log2_cycles = 0.0;
  double hours_at_2_1ghz = 0.0;
};

// Enumeration cost models for one BKZ loop on the Kannan embedding of an
// n-dimensional instance (d = m+n+1, m = 0.875 n): cycles =
// 64 * 2^E(beta) * 8d + d^3 log2(q)^2. The CheNgu fit carries a correction
// term calibrated on the published reference predictions; ABLR21 needs none.
CostReport chengu_cost(int beta, int n, double log2_q);
CostReport ablr21_cost(int beta, int n, double log2_q);

enum class ProbMode { exact, monte_carlo };

// Probability that a weight-h secret has at most h' nonzero coordinates
// inside a zeta-wide guessing region (hypergeometric tail or simulation).
double mitm_hit_prob(int n_total, int zeta, int h, int h_prime, ProbMode mode,
                     int trials = 10000, u64 seed = 1);

// Probability that a weight-h secret has a cyclic window (common shift across
// all k components, nu = num_cruel/k) holding at most x nonzeros. Simulated;
// the sliding-window minimum has no practical closed form.
double cruel_bit_prob(int n, int k, int num_cruel, int h, int x, int trials, u64 seed = 1);

struct IrwinHallReport {
  std::vector<double> empirical;  // histogram, bins over [0, n_terms*q]
  std::vector<double> analytic;   // density integrated per bin
  double max_deviation = 0.0;
  double p_between_q_2q_empirical = 0.0;
  double p_between_q_2q_exact = 0.0;
};

// Sums of n_terms uniform mod-q draws before any modular wrap, against the
// scaled Irwin-Hall density.
IrwinHallReport irwin_hall_check(int n_terms, i64 q, int samples, int bins = 60, u64 seed = 1);

struct SievingMemory {
  int sieve_dim = 0;
  double db_vectors = 0.0;
  double bytes = 0.0;
};

// G6K-style database memory at 416 bytes/vector; sieving dimensions follow
// the published reference points with linear interpolation between them.
SievingMemory sieving_memory_estimate(int n);

}  // namespace lwebench::estimate
