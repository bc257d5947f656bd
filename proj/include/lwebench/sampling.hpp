#pragma once

#include <optional>
#include <string>

#include "lwebench/core.hpp"
#include "lwebench/rng.hpp"

namespace lwebench::sampling {

enum class Dist { binary, ternary, binomial, gaussian, uniform };

std::string dist_name(Dist d);
Dist dist_from_name(const std::string& s);

struct SecretSpec {
  Dist dist = Dist::binary;
  int eta = 2;           // binomial width
  double sigma = 3.19;   // gaussian std
  std::optional<int> fixed_h;
  int length = 0;
};

enum class Variant { plain, ring, module };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

struct LweParams {
  int n = 0;       // ring / vector dimension
  int k = 1;       // module rank (1 for plain and ring)
  i64 q = 0;
  Variant variant = Variant::plain;
  SecretSpec secret;
  Dist error = Dist::gaussian;
  int error_eta = 2;
  double sigma_e = 3.19;

  int dim() const { return n * k; }
  void validate() const;
};

// Samples (A, b = A s + e). For ring/module instances each drawn polynomial
// sample contributes one embedded row; bhat keeps the reversed b-polynomials
// so reduced rows can later be rotated without re-touching the secret.
struct SampleSet {
  Mat A;
  std::vector<i64> b;
  LweParams params;
  std::optional<std::vector<i64>> secret;
  std::optional<Mat> bhat;  // ring/module only: rows of reversed b coefficients
};

std::vector<i64> sample_secret(const SecretSpec& spec, rng::Generator& gen);
std::vector<i64> sample_error_vec(Dist dist, int eta, double sigma, int len, i64 q,
                                  rng::Generator& gen);

// Standard deviation of a single secret coordinate under the given law.
double secret_entry_std(const SecretSpec& spec);
double error_std(Dist dist, int eta, double sigma);

SampleSet gen_samples(const LweParams& params, int num, const std::vector<i64>& secret,
                      rng::Generator& gen);

// residual check: all centered entries of b - A s within bound
bool residuals_within(const SampleSet& s, const std::vector<i64>& secret, double bound);

// On-disk format: one JSON header line, then rows "a_0 ... a_{nk-1} b" in
// decimal. Secrets go to a separate sidecar.
void save_samples(const SampleSet& s, const std::string& path);
SampleSet load_samples(const std::string& path);

}  // namespace lwebench::sampling
