#pragma once

#include <map>

#include "lwebench/sampling.hpp"

namespace lwebench::mitm {

struct MemoryCapExceeded : std::runtime_error {
  double estimate_bytes;
  explicit MemoryCapExceeded(double est)
      : std::runtime_error("mitm: table memory estimate exceeds cap"), estimate_bytes(est) {}
};

struct MitmParams {
  int zeta = 0;                 // guessing dimension
  int tau = 50;                 // short dual vectors / derived samples
  double c = 10.0;              // dual lattice scaling
  std::vector<i64> alphabet;    // nonzero secret values, e.g. {1} or {-1,1}
  i64 q = 0;
  int h_limit = 4;              // combined support weight accepted
  u64 mem_cap_bytes = 4ull << 30;
};

struct DualVector {
  std::vector<i64> y1;
  std::vector<i64> y2;            // stored integer vector c*v2
  std::vector<int> sample_rows;   // rows of the sample set this vector applies to
  double scaled_norm = 0.0;       // norm of the reduced row (c v1, c v2)
};

struct DualOptions {
  double c = 10.0;
  int tau = 8;
  int beta = 20;
  int bkz_loops = 2;
  u64 seed = 1;
  int workers = 1;
};

// Reduces scaled dual lattices of A1 and returns one short vector per
// reduction. Rows are partitioned into tau disjoint m-row blocks when the
// sample budget allows; otherwise blocks reuse rows under distinct random
// unimodular premixes.
std::vector<DualVector> scaled_dual_short_vectors(const Mat& A1, i64 q, int m,
                                                  const DualOptions& opt);

struct DerivedSamples {
  Mat a;                 // tau x zeta
  std::vector<i64> b;
  double bound = 0.0;    // B
  double mean_short_norm = 0.0;  // mean reduced-row norm in the scaled lattice
};

// Applies the short vectors to (A2, b); B follows the implementation rule
// (2 + 1/sqrt(2pi)) * alpha q * sqrt(m/(m+n)) * mean||y1|| / c with
// alpha = sqrt(2pi) sigma_e / q. Throws when B >= q/8.
DerivedSamples derive_samples_and_bound(const std::vector<DualVector>& vecs, const Mat& A2,
                                        const std::vector<i64>& b, double sigma_e, double c,
                                        i64 q, int n_total);

// tau-bit locality-sensitive hash: bit i set iff v_i < q/2.
u64 lsh_index(const std::vector<i64>& v, i64 q);
std::string lsh_index_string(const std::vector<i64>& v, i64 q);

// All subsets of hash positions whose entry sits within B of a wrap boundary.
// Aborts past 24 boundary positions.
std::vector<std::vector<int>> boundary_flips(const std::vector<i64>& r, double B, i64 q);

struct DecideResult {
  bool is_lwe = false;
  std::vector<int> support;     // combined nonzero index set of the accepted pair
  std::vector<i64> values;
  u64 table_entries = 0;
  u64 pairs_tested = 0;
  u64 blown_probes = 0;         // probes that hit the boundary blow-up guard
};

// Meet-in-the-middle decision: enumerate half-weight candidates, probe the
// hash table with boundary flips as it is built, accept a pair when the
// median |centered(b' - A's* - A's+)| stays within B.
DecideResult mitm_decide(const Mat& a_derived, const std::vector<i64>& b_derived, double B,
                         const MitmParams& params);

// Entries of weight w <= ceil(h'/2) cost 64 + 8w bytes each; non-binary
// alphabets multiply entries per support.
double table_memory_estimate(int zeta, int h_prime, int tau, int alphabet_size);

}  // namespace lwebench::mitm
