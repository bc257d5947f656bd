#pragma once

#include "lwebench/preprocess.hpp"

namespace lwebench::cc {

struct CruelCandidate {
  std::vector<int> support;  // indices into the full coordinate range
  std::vector<i64> values;
  double score = 0.0;        // sample std of centered residuals
};

struct BruteForceOptions {
  int h_limit = 3;
  double gamma = 0.7;        // accept when score < gamma * q / sqrt(12)
  size_t max_candidates = 4096;
};

// Enumerates cruel supports by increasing Hamming weight with all nonzero
// alphabet assignments; residual std below gamma*q/sqrt(12) clears detection.
// Best (smallest) score first; ties by lexicographic support.
std::vector<CruelCandidate> brute_force_cruel(const preprocess::ReducedDataset& ds,
                                              const BruteForceOptions& opt,
                                              const std::vector<i64>& nonzero_alphabet);

// Coordinate-wise descent over the cool indices; keeps the value minimizing
// the mean absolute centered residual. Binary/ternary scope.
std::optional<std::vector<i64>> greedy_cool_recovery(const preprocess::ReducedDataset& ds,
                                                     const std::vector<i64>& s_cruel,
                                                     const std::vector<i64>& alphabet,
                                                     int max_passes = 10);

// Least-squares estimate of the cool coordinates given the cruel assignment;
// coordinates round to the nearest allowed value. Fails on a singular Gram
// matrix.
std::optional<std::vector<i64>> linreg_cool_recovery(const preprocess::ReducedDataset& ds,
                                                     const std::vector<i64>& s_cruel,
                                                     const std::vector<i64>& round_to);

// Accepts iff every centered residual over the fresh samples is within
// 12 * sigma_e.
bool verify_secret(const sampling::SampleSet& fresh, const std::vector<i64>& s);

struct AttackOptions {
  BruteForceOptions bf;
  bool use_linreg = true;
  bool greedy_fallback = true;
  size_t try_top = 32;  // candidates attempted in score order
};

struct AttackOutcome {
  std::optional<std::vector<i64>> secret;
  int candidates_tried = 0;
  bool bf_found_truth = false;  // set by callers that know the plant
};

// Full pipeline: brute-force cruel bits, recover cool bits, verify.
AttackOutcome attack(const preprocess::ReducedDataset& ds, const sampling::SampleSet& fresh,
                     const AttackOptions& opt, const std::vector<i64>& nonzero_alphabet,
                     const std::vector<i64>& full_alphabet);

}  // namespace lwebench::cc
