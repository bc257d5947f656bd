#pragma once

#include <optional>

#include "lwebench/common.hpp"

namespace lwebench::reduction {

struct ReductionProfile {
  std::vector<double> per_column_std;
  double rho = 1.0;
  int loops = 0;
  double wall_time = 0.0;
  bool timed_out = false;
  std::vector<double> loop_seconds;
  std::vector<double> loop_rho;
};

// Floating-point Gram-Schmidt data over an exact integer row basis.
struct Gso {
  int n = 0;
  std::vector<double> mu;     // n x n, lower triangular
  std::vector<double> bstar;  // squared norms of the orthogonalized rows

  double& mu_at(int i, int j) { return mu[static_cast<size_t>(i) * n + j]; }
  double mu_at(int i, int j) const { return mu[static_cast<size_t>(i) * n + j]; }
  void compute(const Mat& basis);
};

// In-place LLL with Lovasz parameter delta in (0.25, 1). Throws
// std::invalid_argument on rank-deficient input.
void lll(Mat& basis, double delta = 0.99);

struct EnumResult {
  std::vector<i64> coeffs;  // with respect to the block rows
  double norm2 = 0.0;
  bool nodes_exceeded = false;
};

// Exact shortest-vector enumeration over the projected block
// [start, start+block_size) of the GSO; radius2 bounds the squared norm.
// Returns nullopt when no nonzero vector lies within the radius.
std::optional<EnumResult> svp_enumerate(const Gso& gso, int start, int block_size,
                                        double radius2, u64 node_cap = 50'000'000,
                                        bool linear_pruning = false);

struct BkzOptions {
  int beta = 20;
  int max_loops = 8;
  double delta = 0.99;
  double max_seconds = 1e18;
  bool linear_pruning = false;
  u64 node_cap = 50'000'000;
};

// BKZ with enumeration SVP oracle; basis reduced in place.
ReductionProfile bkz(Mat& basis, const BkzOptions& opt);

struct QaryOptions {
  i64 omega = 4;
  int beta = 20;
  double target_rho = 0.0;   // stop once rho <= target
  int max_loops = 6;         // BKZ tours after the initial LLL
  double max_seconds = 1e18;
  double delta = 0.99;
};

struct QaryResult {
  Mat R;        // transform rows with nonzero R only
  Mat RA;       // R*A mod q, canonical entries
  ReductionProfile profile;
};

// Builds [[0, q I_n],[omega I_m, A]], reduces, splits the transform back out.
QaryResult qary_embed_reduce(const Mat& A, i64 q, const QaryOptions& opt);

// Norm helpers used across attacks and tests.
double row_norm2(const Mat& m, int r);
double mean_row_std_centered(const Mat& m, i64 q);
std::vector<double> column_std_centered(const Mat& m, i64 q);

}  // namespace lwebench::reduction
