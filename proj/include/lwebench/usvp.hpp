#pragma once

#include "lwebench/cc.hpp"
#include "lwebench/sampling.hpp"

namespace lwebench::usvp {

struct KannanLattice {
  Mat basis;  // (m+n+1) x (m+n+1), layout [[0, qI_m, 0],[omega I_n, A^T, 0],[0, b, 1]]
  i64 omega = 1;
  int m = 0;
  int n = 0;
};

KannanLattice kannan_embed(const Mat& A, const std::vector<i64>& b, i64 q, i64 omega);

// omega balancing s against e in the planted vector: max(1, round(sigma_e/sigma_s)).
i64 balance_omega(const sampling::LweParams& params);

struct UsvpOptions {
  i64 omega = 0;      // 0 -> balance_omega
  int beta_start = 20;
  int beta_step = 5;
  int beta_max = 40;
  int loop_budget = 10;
  double max_seconds = 1e18;
  u64 node_cap = 50'000'000;
};

struct UsvpOutcome {
  std::optional<std::vector<i64>> secret;
  int loops = 0;
  double seconds = 0.0;
  std::vector<double> loop_seconds;
  i64 omega = 1;
};

// Lattice reduction on the embedding; after LLL and after every BKZ tour the
// basis is scanned for rows of the planted shape (omega*s, -e, +-1), and any
// candidate is accepted only if it verifies against the held-out samples.
UsvpOutcome usvp_attack(const sampling::SampleSet& samples, int m, const UsvpOptions& opt,
                        const sampling::SampleSet& verify_set);

}  // namespace lwebench::usvp
