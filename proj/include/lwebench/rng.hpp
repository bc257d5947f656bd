#pragma once

#include <array>
#include <optional>

#include "lwebench/common.hpp"

namespace lwebench::rng {

enum class Kind { cryptographic, lcg };

struct LcgParams {
  u64 a = 1103515245;  // glibc-style defaults
  u64 c = 12345;
  u64 m = 1u << 31;
};

struct GeneratorSpec {
  Kind kind = Kind::cryptographic;
  u64 seed = 0;
  LcgParams lcg;
};

// Deterministic generator. The cryptographic backend runs ChaCha20 keyed from
// the seed and reduces mod q by rejection sampling; the lcg backend emits the
// raw recurrence x_{i+1} = a x_i + c mod m and reduces by plain %, matching
// naive usage.
class Generator {
 public:
  explicit Generator(const GeneratorSpec& spec);

  u64 next_raw();
  i64 uniform_mod(i64 q);
  // uniform in [0, bound) without modulo bias
  u64 uniform_below(u64 bound);
  double uniform_real();  // [0, 1)
  double gaussian(double sigma);

  const GeneratorSpec& spec() const { return spec_; }

 private:
  void refill();

  GeneratorSpec spec_;
  // chacha state
  std::array<u64, 8> key_{};
  u64 counter_ = 0;
  std::array<u64, 8> buf_{};
  int buf_pos_ = 8;
  // lcg state
  u64 lcg_x_ = 0;
  // cached second gaussian from Box-Muller
  std::optional<double> gauss_spare_;
};

// Worker seed derivation: base seed + worker index, then mixed.
GeneratorSpec derive(const GeneratorSpec& base, u64 index);

// Fills row 1 left to right, then row 2, etc.; each draw reduced mod q.
Mat uniform_matrix(int rows, int cols, i64 q, Generator& gen);

// Column-step LCG parameters: a_col = a^n mod m, c_col = c * sum a^j mod m.
std::pair<u64, u64> lcg_column_params(u64 a, u64 c, u64 m, int n);

}  // namespace lwebench::rng
