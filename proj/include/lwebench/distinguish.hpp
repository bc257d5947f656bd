#pragma once

#include <functional>
#include <memory>

#include "lwebench/sampling.hpp"

namespace lwebench::distinguish {

// Predictor contract: canonical input vector -> predicted scalar mod q.
// Test oracles are pure functions of (seed, input) so probing is replayable.
struct PredictorOracle {
  virtual ~PredictorOracle() = default;
  virtual i64 predict(const std::vector<i64>& a) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// f(a) = <a, s> mod q
class ExactOracle : public PredictorOracle {
 public:
  ExactOracle(std::vector<i64> secret, i64 q) : s_(std::move(secret)), q_(q) {}
  i64 predict(const std::vector<i64>& a) const override;

 private:
  std::vector<i64> s_;
  i64 q_;
};

// f(a) = <a, s> + round(N(0, sigma)) mod q, noise keyed by (seed, a)
class NoisyOracle : public PredictorOracle {
 public:
  NoisyOracle(std::vector<i64> secret, i64 q, double sigma, u64 seed)
      : s_(std::move(secret)), q_(q), sigma_(sigma), seed_(seed) {}
  i64 predict(const std::vector<i64>& a) const override;

 private:
  std::vector<i64> s_;
  i64 q_;
  double sigma_;
  u64 seed_;
};

// Adapter for an external model speaking a line protocol on stdio:
// one query per line ("a_0 a_1 ... a_{n-1}"), one integer reply per line.
class StreamOracle : public PredictorOracle {
 public:
  explicit StreamOracle(const std::string& command);
  ~StreamOracle() override;
  i64 predict(const std::vector<i64>& a) const override;
  bool concurrent_safe() const override { return false; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SlopeResult {
  i64 value = 0;
  bool known = false;
  int mode_count = 0;
};

// Secret coordinate from the mode of rounded difference quotients
// (f(a + delta e_i) - f(a)) / delta over in-distribution base points.
SlopeResult slope_distinguish(const PredictorOracle& oracle, i64 q, int i, i64 delta,
                              int num_probes, const Mat& base_points,
                              double mode_threshold = 0.25);

enum class Activity { active, inactive };

// Large-step probe: active iff the median |centered difference| under
// Delta = q/4 exceeds the noise floor q/8. Binary/ternary secrets.
Activity binary_distinguish(const PredictorOracle& oracle, i64 q, int i, int num_probes,
                            const Mat& base_points);

// Convenience: run slope_distinguish on every coordinate.
std::vector<SlopeResult> recover_secret(const PredictorOracle& oracle, i64 q, int dim,
                                        i64 delta, int num_probes, const Mat& base_points);

}  // namespace lwebench::distinguish
