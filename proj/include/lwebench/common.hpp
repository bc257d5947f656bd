#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lwebench {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

// Row-major integer matrix. Entries are plain int64; callers that need exact
// dot products over large moduli accumulate in i128 (see dot()).
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<i64> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

  i64& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  i64 at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  i64* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const i64* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }

  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

inline i128 dot(const i64* x, const i64* y, int n) {
  i128 s = 0;
  for (int i = 0; i < n; i++) s += static_cast<i128>(x[i]) * y[i];
  return s;
}

inline i64 mod_pos(i128 x, i64 q) {
  i64 r = static_cast<i64>(x % q);
  return r < 0 ? r + q : r;
}

// Mean and standard deviation of a sequence already mapped to doubles.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  double s = 0;
  for (double x : v) s += x;
  r.mean = s / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size())) : 0.0;
  return r;
}

}  // namespace lwebench
