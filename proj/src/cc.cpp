#include "lwebench/cc.hpp"

#include <algorithm>
#include <cmath>

#include "lwebench/core.hpp"

namespace lwebench::cc {

using core::centered_mod;

namespace {

double residual_std(const std::vector<i64>& r, i64 q) {
  double mean = 0;
  const size_t n = r.size();
  std::vector<double> c(n);
  for (size_t i = 0; i < n; i++) {
    i64 v = r[i];
    if (2 * v >= q) v -= q;
    c[i] = static_cast<double>(v);
    mean += c[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0;
  for (double v : c) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n));
}

double residual_mean_abs(const std::vector<i64>& r, i64 q) {
  double acc = 0;
  for (i64 v : r) {
    if (2 * v >= q) v -= q;
    acc += std::fabs(static_cast<double>(v));
  }
  return acc / static_cast<double>(r.size());
}

void sub_col(std::vector<i64>& r, const Mat& ra, int col, i64 val, i64 q) {
  for (size_t i = 0; i < r.size(); i++) {
    i64 v = r[i] - mod_pos(static_cast<i128>(val) * ra.at(static_cast<int>(i), col), q);
    if (v < 0) v += q;
    r[i] = v;
  }
}

struct BfSearch {
  const preprocess::ReducedDataset& ds;
  const BruteForceOptions& opt;
  const std::vector<i64>& alphabet;
  std::vector<int> cruel_idx;
  double threshold;
  std::vector<i64> residual;
  std::vector<int> support;
  std::vector<i64> values;
  std::vector<CruelCandidate> out;

  void consider() {
    double score = residual_std(residual, ds.params.q);
    if (score < threshold && out.size() < opt.max_candidates)
      out.push_back({support, values, score});
  }

  void rec(size_t from, int depth) {
    consider();
    if (depth == opt.h_limit) return;
    for (size_t t = from; t < cruel_idx.size(); t++) {
      int col = cruel_idx[t];
      support.push_back(col);
      for (i64 v : alphabet) {
        values.push_back(v);
        sub_col(residual, ds.ra, col, v, ds.params.q);
        rec(t + 1, depth + 1);
        sub_col(residual, ds.ra, col, -v, ds.params.q);
        values.pop_back();
      }
      support.pop_back();
    }
  }
};

}  // namespace

std::vector<CruelCandidate> brute_force_cruel(const preprocess::ReducedDataset& ds,
                                              const BruteForceOptions& opt,
                                              const std::vector<i64>& nonzero_alphabet) {
  if (ds.cruel_mask.empty()) throw std::invalid_argument("brute_force_cruel: no cruel mask");
  BfSearch s{ds, opt, nonzero_alphabet};
  for (int c = 0; c < ds.ra.cols; c++)
    if (ds.cruel_mask[c]) s.cruel_idx.push_back(c);
  s.threshold = opt.gamma * static_cast<double>(ds.params.q) / std::sqrt(12.0);
  s.residual = ds.rb;
  s.rec(0, 0);
  std::sort(s.out.begin(), s.out.end(), [](const CruelCandidate& a, const CruelCandidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.support != b.support) return a.support < b.support;
    return a.values < b.values;
  });
  return s.out;
}

std::optional<std::vector<i64>> greedy_cool_recovery(const preprocess::ReducedDataset& ds,
                                                     const std::vector<i64>& s_cruel,
                                                     const std::vector<i64>& alphabet,
                                                     int max_passes) {
  const i64 q = ds.params.q;
  std::vector<i64> s = s_cruel;
  std::vector<i64> residual = ds.rb;
  for (int c = 0; c < ds.ra.cols; c++)
    if (s[c] != 0) sub_col(residual, ds.ra, c, s[c], q);
  std::vector<int> cool_idx;
  for (int c = 0; c < ds.ra.cols; c++)
    if (!ds.cruel_mask[c]) cool_idx.push_back(c);

  for (int pass = 0; pass < max_passes; pass++) {
    bool changed = false;
    for (int c : cool_idx) {
      i64 best_v = s[c];
      double best = -1;
      for (i64 v : alphabet) {
        if (v != s[c]) sub_col(residual, ds.ra, c, v - s[c], q);
        double score = residual_mean_abs(residual, q);
        if (v != s[c]) sub_col(residual, ds.ra, c, s[c] - v, q);
        if (best < 0 || score < best) {
          best = score;
          best_v = v;
        }
      }
      if (best_v != s[c]) {
        sub_col(residual, ds.ra, c, best_v - s[c], q);
        s[c] = best_v;
        changed = true;
      }
    }
    if (!changed) return s;
  }
  return std::nullopt;  // oscillation past the pass limit
}

std::optional<std::vector<i64>> linreg_cool_recovery(const preprocess::ReducedDataset& ds,
                                                     const std::vector<i64>& s_cruel,
                                                     const std::vector<i64>& round_to) {
  const i64 q = ds.params.q;
  const int rows = ds.ra.rows;
  std::vector<int> cool_idx;
  for (int c = 0; c < ds.ra.cols; c++)
    if (!ds.cruel_mask[c]) cool_idx.push_back(c);
  const int nc = static_cast<int>(cool_idx.size());
  if (nc == 0) return s_cruel;
  if (rows <= nc) return std::nullopt;

  // y = centered(rb - RA_cruel * s_cruel)
  std::vector<i64> resid = ds.rb;
  for (int c = 0; c < ds.ra.cols; c++)
    if (ds.cruel_mask[c] && s_cruel[c] != 0) sub_col(resid, ds.ra, c, s_cruel[c], q);
  std::vector<double> y(rows);
  for (int r = 0; r < rows; r++) y[r] = static_cast<double>(centered_mod(resid[r], q));

  // X = centered cool columns; solve (X^T X) s = X^T y by Cholesky
  std::vector<double> x(static_cast<size_t>(rows) * nc);
  for (int r = 0; r < rows; r++)
    for (int j = 0; j < nc; j++)
      x[static_cast<size_t>(r) * nc + j] =
          static_cast<double>(centered_mod(ds.ra.at(r, cool_idx[j]), q));
  std::vector<double> g(static_cast<size_t>(nc) * nc, 0.0), rhs(nc, 0.0);
  for (int r = 0; r < rows; r++) {
    const double* xr = &x[static_cast<size_t>(r) * nc];
    for (int i = 0; i < nc; i++) {
      rhs[i] += xr[i] * y[r];
      for (int j = 0; j <= i; j++) g[static_cast<size_t>(i) * nc + j] += xr[i] * xr[j];
    }
  }
  // Cholesky G = L L^T
  std::vector<double> l(static_cast<size_t>(nc) * nc, 0.0);
  for (int i = 0; i < nc; i++) {
    for (int j = 0; j <= i; j++) {
      double s = g[static_cast<size_t>(i) * nc + j];
      for (int t = 0; t < j; t++)
        s -= l[static_cast<size_t>(i) * nc + t] * l[static_cast<size_t>(j) * nc + t];
      if (i == j) {
        if (s <= 1e-9) return std::nullopt;  // singular Gram matrix
        l[static_cast<size_t>(i) * nc + i] = std::sqrt(s);
      } else {
        l[static_cast<size_t>(i) * nc + j] = s / l[static_cast<size_t>(j) * nc + j];
      }
    }
  }
  std::vector<double> z(nc), est(nc);
  for (int i = 0; i < nc; i++) {
    double s = rhs[i];
    for (int t = 0; t < i; t++) s -= l[static_cast<size_t>(i) * nc + t] * z[t];
    z[i] = s / l[static_cast<size_t>(i) * nc + i];
  }
  for (int i = nc - 1; i >= 0; i--) {
    double s = z[i];
    for (int t = i + 1; t < nc; t++) s -= l[static_cast<size_t>(t) * nc + i] * est[t];
    est[i] = s / l[static_cast<size_t>(i) * nc + i];
  }

  std::vector<i64> out = s_cruel;
  for (int j = 0; j < nc; j++) {
    double v = est[j];
    i64 best = round_to.empty() ? static_cast<i64>(std::llround(v)) : round_to[0];
    double bd = std::fabs(v - static_cast<double>(best));
    for (i64 cand : round_to) {
      double d = std::fabs(v - static_cast<double>(cand));
      if (d < bd) {
        bd = d;
        best = cand;
      }
    }
    out[cool_idx[j]] = best;
  }
  return out;
}

bool verify_secret(const sampling::SampleSet& fresh, const std::vector<i64>& s) {
  if (fresh.A.rows < 32) throw std::invalid_argument("verify_secret: need >= 32 fresh samples");
  double bound = 12.0 * sampling::error_std(fresh.params.error, fresh.params.error_eta,
                                            fresh.params.sigma_e);
  bound = std::max(bound, 1.0);
  return sampling::residuals_within(fresh, s, bound);
}

AttackOutcome attack(const preprocess::ReducedDataset& ds, const sampling::SampleSet& fresh,
                     const AttackOptions& opt, const std::vector<i64>& nonzero_alphabet,
                     const std::vector<i64>& full_alphabet) {
  AttackOutcome res;
  auto candidates = brute_force_cruel(ds, opt.bf, nonzero_alphabet);
  for (const auto& cand : candidates) {
    if (res.candidates_tried >= static_cast<int>(opt.try_top)) break;
    res.candidates_tried++;
    std::vector<i64> s_cruel(ds.ra.cols, 0);
    for (size_t t = 0; t < cand.support.size(); t++) s_cruel[cand.support[t]] = cand.values[t];
    if (opt.use_linreg) {
      auto s = linreg_cool_recovery(ds, s_cruel, full_alphabet);
      if (s && verify_secret(fresh, *s)) {
        res.secret = s;
        return res;
      }
    }
    if (opt.greedy_fallback) {
      auto s = greedy_cool_recovery(ds, s_cruel, full_alphabet);
      if (s && verify_secret(fresh, *s)) {
        res.secret = s;
        return res;
      }
    }
  }
  return res;
}

}  // namespace lwebench::cc
