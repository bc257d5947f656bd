#pragma once

#include "lwebench/reduction.hpp"
#include "lwebench/sampling.hpp"

namespace lwebench::preprocess {

// Reduced (RA, Rb) rows plus the cruel/cool split. For ring/module instances
// each row keeps its combined reversed b-polynomial so the row can be rotated
// to any cliff position later without touching the secret.
struct RowTransform {
  std::vector<int> idx;     // source sample indices
  std::vector<i64> coeff;   // R coefficients over those samples
};

struct ReducedDataset {
  Mat ra;                // rows x (n k), canonical mod q
  std::vector<i64> rb;
  sampling::LweParams params;
  std::vector<uint8_t> cruel_mask;
  int num_cruel = 0;
  int shift = 0;         // net rotation applied, in [0, 2n)
  std::optional<std::vector<int>> split_permutation;
  std::optional<Mat> bpoly;  // rows x n
  std::vector<RowTransform> transform;  // provenance; enables re-applying b
  double rho = 1.0;
  std::vector<double> per_column_std;
  bool partial = false;
  std::vector<double> matrix_rho;
  std::vector<double> matrix_seconds;
};

struct BuildOptions {
  int m = 0;              // subsample size; 0 -> round(0.875 * n * k)
  i64 omega = 4;
  int beta = 18;
  double delta = 0.99;    // Lovasz parameter; lower it to cap reduction quality
  double target_rho = 0.0;
  int bkz_loops = 4;
  int num_matrices = 64;
  int target_count = 5000;
  double matrix_seconds_cap = 1e18;
  u64 seed = 1;
  int workers = 1;
};

// Subsample m rows, reduce through the q-ary embedding, apply the transform
// to (A, b), append nonzero rows; repeats until target_count rows.
ReducedDataset build_reduced_dataset(const sampling::SampleSet& samples,
                                     const BuildOptions& opt);

// Recompute rb (and b-polynomials) from the stored transforms against a
// sample set sharing the same A side. Same-A trials reuse one reduction.
void reapply_b(ReducedDataset& ds, const sampling::SampleSet& samples);

// mask[i] = per-column std of centered RA column i exceeds q/(2 sqrt(12)).
std::vector<uint8_t> cruel_mask(const Mat& ra, i64 q);

// Rotates one (ra, rb) pair by x^l; bpoly_row holds the row's reversed
// b-polynomial and is advanced alongside. Valid for ring/module rows.
void cliff_shift_row(std::vector<i64>& ra, i64& rb, std::vector<i64>& bpoly_row, int l, int n,
                     int k, i64 q);

// Whole-dataset rotation; recomputes the cruel mask.
ReducedDataset cliff_shift(const ReducedDataset& ds, int l);

struct SplitPermutation {
  std::vector<int> perm;  // permuted[j] = original[perm[j]]
  std::vector<int> inv;
  int nu = 0;
  bool adjusted = false;  // N_u was not divisible by k
};

// Moves each component's first nu = N_u/k coordinates to the front block,
// preserving component order.
SplitPermutation cliff_split_permutation(int k, int n, int N_u);

std::vector<i64> apply_permutation(const std::vector<i64>& v, const std::vector<int>& perm);

struct PartialHamming {
  int h_star = 0;
  int w_star = 0;
};

// Minimum over cyclic windows [w, w+nu) of the summed per-component nonzero
// count of the secret.
PartialHamming min_partial_hamming(const std::vector<i64>& secret, int nu, int k);

void save_dataset(const ReducedDataset& ds, const std::string& path);
ReducedDataset load_dataset(const std::string& path);

}  // namespace lwebench::preprocess
