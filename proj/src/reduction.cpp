#include "lwebench/reduction.hpp"

#include <chrono>
#include <cmath>

#include "lwebench/core.hpp"

namespace lwebench::reduction {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// exact inner product, converted to long double for GSO headroom
long double ip(const Mat& b, int i, int j) {
  return static_cast<long double>(dot(b.row(i), b.row(j), b.cols));
}

bool row_is_zero(const Mat& b, int r) {
  for (int c = 0; c < b.cols; c++)
    if (b.at(r, c) != 0) return false;
  return true;
}

void sub_scaled_row(Mat& b, int dst, int src, i64 f) {
  if (f == 0) return;
  i64* d = b.row(dst);
  const i64* s = b.row(src);
  for (int c = 0; c < b.cols; c++) {
    i128 v = static_cast<i128>(d[c]) - static_cast<i128>(f) * s[c];
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("lll: entry overflow");
    d[c] = static_cast<i64>(v);
  }
}

}  // namespace

void Gso::compute(const Mat& basis) {
  n = basis.rows;
  mu.assign(static_cast<size_t>(n) * n, 0.0);
  bstar.assign(n, 0.0);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < i; j++) {
      double s = ip(basis, i, j);
      for (int t = 0; t < j; t++) s -= mu_at(i, t) * mu_at(j, t) * bstar[t];
      mu_at(i, j) = s / bstar[j];
    }
    double s = ip(basis, i, i);
    for (int t = 0; t < i; t++) s -= mu_at(i, t) * mu_at(i, t) * bstar[t];
    bstar[i] = s;
    mu_at(i, i) = 1.0;
  }
}

namespace {

// LLL working state: mu rows recomputed lazily from the exact integer rows so
// precision loss never accumulates across swaps.
struct LllState {
  Mat& b;
  int n;
  std::vector<long double> bstar;
  std::vector<long double> mu;  // row-major lower triangular, row k valid after visit

  explicit LllState(Mat& basis)
      : b(basis), n(basis.rows), bstar(basis.rows, 0.0),
        mu(static_cast<size_t>(basis.rows) * basis.rows, 0.0) {}

  long double& mu_at(int i, int j) { return mu[static_cast<size_t>(i) * n + j]; }

  void compute_mu_row(int k) {
    for (int j = 0; j < k; j++) {
      long double s = ip(b, k, j);
      for (int t = 0; t < j; t++) s -= mu_at(k, t) * mu_at(j, t) * bstar[t];
      mu_at(k, j) = s / bstar[j];
    }
  }

  // Size-reduce row k against rows < k; repeats until the recomputed
  // projection coefficients stop drifting past 0.5.
  void size_reduce(int k) {
    const long double eta = 0.5001L;
    for (int pass = 0; pass < 200; pass++) {
      compute_mu_row(k);
      bool any = false;
      for (int j = k - 1; j >= 0; j--) {
        long double m = mu_at(k, j);
        if (fabsl(m) > eta) {
          i64 r = static_cast<i64>(llroundl(m));
          sub_scaled_row(b, k, j, r);
          for (int t = 0; t < j; t++) mu_at(k, t) -= static_cast<long double>(r) * mu_at(j, t);
          mu_at(k, j) -= static_cast<long double>(r);
          any = true;
        }
      }
      if (!any) return;
    }
    throw std::runtime_error("lll: size reduction failed to converge");
  }
};

}  // namespace

void lll(Mat& basis, double delta) {
  if (delta <= 0.25 || delta >= 1.0) throw std::invalid_argument("lll: delta out of range");
  const int n = basis.rows;
  if (n == 0) return;
  LllState st(basis);
  st.bstar[0] = ip(basis, 0, 0);
  if (st.bstar[0] <= 0) throw std::invalid_argument("lll: rank-deficient basis");
  int k = 1;
  while (k < n) {
    st.size_reduce(k);
    if (row_is_zero(basis, k)) throw std::invalid_argument("lll: rank-deficient basis");
    long double norm2 = ip(basis, k, k);
    long double proj = 0;
    for (int t = 0; t < k; t++) proj += st.mu_at(k, t) * st.mu_at(k, t) * st.bstar[t];
    st.bstar[k] = norm2 - proj;
    long double m = st.mu_at(k, k - 1);
    if (st.bstar[k] >= (delta - m * m) * st.bstar[k - 1]) {
      k++;
    } else {
      for (int c = 0; c < basis.cols; c++) std::swap(basis.at(k, c), basis.at(k - 1, c));
      k = k > 1 ? k - 1 : 1;
      if (k == 1) {
        st.bstar[0] = ip(basis, 0, 0);
        if (st.bstar[0] <= 0) throw std::invalid_argument("lll: rank-deficient basis");
      } else {
        // recompute the level we fell back to
        st.size_reduce(k - 1);
        long double n2 = ip(basis, k - 1, k - 1);
        long double pr = 0;
        for (int t = 0; t < k - 1; t++)
          pr += st.mu_at(k - 1, t) * st.mu_at(k - 1, t) * st.bstar[t];
        st.bstar[k - 1] = n2 - pr;
      }
    }
  }
}

std::optional<EnumResult> svp_enumerate(const Gso& gso, int start, int block_size,
                                        double radius2, u64 node_cap, bool linear_pruning) {
  const int m = block_size;
  if (m < 1 || start + m > gso.n) throw std::invalid_argument("svp_enumerate: bad block");
  if (radius2 <= 0) return std::nullopt;
  if (m == 1) {
    if (gso.bstar[start] < radius2)
      return EnumResult{{1}, gso.bstar[start], false};
    return std::nullopt;
  }

  std::vector<double> rho(m + 1, 0.0);  // partial squared norms from the top
  std::vector<double> center(m, 0.0);
  std::vector<i64> x(m, 0), base(m, 0), step(m, 0);
  std::vector<int> dir(m, 1);
  std::vector<double> bound(m, radius2);
  if (linear_pruning)
    for (int i = 0; i < m; i++) bound[i] = radius2 * static_cast<double>(m - i) / m;

  std::vector<i64> best;
  double best2 = radius2;
  bool exceeded = false;

  auto mu_block = [&](int r, int c) { return gso.mu_at(start + r, start + c); };
  // zigzag around the rounded center: offsets 0, +1, -1, +2, -2 ... with the
  // first step toward the fractional side, so distances are nondecreasing
  auto enter_level = [&](int i) {
    double c = 0;
    for (int j = i + 1; j < m; j++) c -= static_cast<double>(x[j]) * mu_block(j, i);
    center[i] = c;
    base[i] = static_cast<i64>(std::llround(c));
    step[i] = 0;
    dir[i] = (c - static_cast<double>(base[i])) >= 0 ? 1 : -1;
    x[i] = base[i];
  };
  auto advance_level = [&](int i) {
    step[i]++;
    i64 k = step[i];
    i64 off = (k % 2 == 1) ? (k + 1) / 2 * dir[i] : -(k / 2) * dir[i];
    x[i] = base[i] + off;
  };

  int i = m - 1;
  enter_level(i);
  u64 nodes = 0;

  while (true) {
    if (++nodes > node_cap) {
      exceeded = true;
      break;
    }
    double d = static_cast<double>(x[i]) - center[i];
    double r2 = rho[i + 1] + d * d * gso.bstar[start + i];
    if (r2 < std::min(best2, bound[i])) {
      if (i == 0) {
        bool nonzero = false;
        for (int t = 0; t < m; t++)
          if (x[t] != 0) nonzero = true;
        if (nonzero) {
          best2 = r2;
          best.assign(x.begin(), x.end());
        }
        advance_level(0);
      } else {
        rho[i] = r2;
        i--;
        enter_level(i);
      }
    } else {
      i++;
      if (i >= m) break;
      advance_level(i);
    }
  }

  if (best.empty()) return std::nullopt;
  return EnumResult{std::move(best), best2, exceeded};
}

namespace {

// Applies unimodular row operations inside the block so that the integer
// combination sum x_i * row_i lands in the first block row.
void insert_combination(Mat& b, int kappa, std::vector<i64> x) {
  const int bs = static_cast<int>(x.size());
  auto nonzeros = [&]() {
    int c = 0;
    for (i64 v : x)
      if (v != 0) c++;
    return c;
  };
  while (nonzeros() > 1) {
    int imax = -1, jmin = -1;
    for (int t = 0; t < bs; t++) {
      if (x[t] == 0) continue;
      if (imax < 0 || std::llabs(x[t]) > std::llabs(x[imax])) imax = t;
    }
    for (int t = 0; t < bs; t++) {
      if (x[t] == 0 || t == imax) continue;
      if (jmin < 0 || std::llabs(x[t]) < std::llabs(x[jmin])) jmin = t;
    }
    i64 qq = static_cast<i64>(std::llround(static_cast<double>(x[imax]) / x[jmin]));
    if (qq == 0) qq = x[imax] > 0 == x[jmin] > 0 ? 1 : -1;
    x[imax] -= qq * x[jmin];
    // row_j += qq * row_i keeps sum x_t row_t invariant
    i64* rj = b.row(kappa + jmin);
    const i64* ri = b.row(kappa + imax);
    for (int c = 0; c < b.cols; c++) {
      i128 v = static_cast<i128>(rj[c]) + static_cast<i128>(qq) * ri[c];
      if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("bkz: entry overflow");
      rj[c] = static_cast<i64>(v);
    }
  }
  int t = 0;
  while (x[t] == 0) t++;
  if (x[t] == -1)
    for (int c = 0; c < b.cols; c++) b.at(kappa + t, c) = -b.at(kappa + t, c);
  // rotate the combination row to the block head
  for (int r = kappa + t; r > kappa; r--)
    for (int c = 0; c < b.cols; c++) std::swap(b.at(r, c), b.at(r - 1, c));
}

std::vector<double> column_std_raw(const Mat& m) {
  std::vector<double> out(m.cols, 0.0);
  for (int c = 0; c < m.cols; c++) {
    double mean = 0;
    for (int r = 0; r < m.rows; r++) mean += static_cast<double>(m.at(r, c));
    mean /= m.rows;
    double ss = 0;
    for (int r = 0; r < m.rows; r++) {
      double d = static_cast<double>(m.at(r, c)) - mean;
      ss += d * d;
    }
    out[c] = std::sqrt(ss / m.rows);
  }
  return out;
}

double mean_row_std_raw(const Mat& m) {
  if (m.rows == 0) return 0.0;
  double acc = 0;
  for (int r = 0; r < m.rows; r++) {
    double mean = 0;
    for (int c = 0; c < m.cols; c++) mean += static_cast<double>(m.at(r, c));
    mean /= m.cols;
    double ss = 0;
    for (int c = 0; c < m.cols; c++) {
      double d = static_cast<double>(m.at(r, c)) - mean;
      ss += d * d;
    }
    acc += std::sqrt(ss / m.cols);
  }
  return acc / m.rows;
}

}  // namespace

double row_norm2(const Mat& m, int r) {
  return static_cast<double>(dot(m.row(r), m.row(r), m.cols));
}

double mean_row_std_centered(const Mat& m, i64 q) {
  Mat c = m;
  for (auto& v : c.a) v = core::centered_mod(v, q);
  return mean_row_std_raw(c);
}

std::vector<double> column_std_centered(const Mat& m, i64 q) {
  Mat c = m;
  for (auto& v : c.a) v = core::centered_mod(v, q);
  return column_std_raw(c);
}

ReductionProfile bkz(Mat& basis, const BkzOptions& opt) {
  if (opt.beta < 2) throw std::invalid_argument("bkz: beta must be >= 2");
  const double t0 = now_seconds();
  const double in_std = mean_row_std_raw(basis);
  lll(basis, opt.delta);
  ReductionProfile prof;
  const int n = basis.rows;
  Gso gso;
  for (int loop = 0; loop < opt.max_loops; loop++) {
    double lt0 = now_seconds();
    bool improved = false;
    for (int kappa = 0; kappa + 1 < n; kappa++) {
      if (now_seconds() - t0 > opt.max_seconds) {
        prof.timed_out = true;
        break;
      }
      int bs = std::min(opt.beta, n - kappa);
      gso.compute(basis);
      double radius2 = gso.bstar[kappa] * 0.9999;
      auto res = svp_enumerate(gso, kappa, bs, radius2, opt.node_cap, opt.linear_pruning);
      if (!res) continue;
      if (res->nodes_exceeded) prof.timed_out = true;
      i64 max_coeff = 0;
      for (i64 v : res->coeffs) max_coeff = std::max<i64>(max_coeff, std::llabs(v));
      if (max_coeff > (1 << 20)) continue;  // precision guard
      // skip trivial solution +-e_0
      bool trivial = std::llabs(res->coeffs[0]) == 1;
      for (size_t t = 1; t < res->coeffs.size() && trivial; t++)
        if (res->coeffs[t] != 0) trivial = false;
      if (trivial) continue;
      insert_combination(basis, kappa, res->coeffs);
      lll(basis, opt.delta);
      improved = true;
    }
    prof.loops = loop + 1;
    prof.loop_seconds.push_back(now_seconds() - lt0);
    if (prof.timed_out || !improved) break;
  }
  prof.wall_time = now_seconds() - t0;
  prof.per_column_std = column_std_raw(basis);
  double out_std = mean_row_std_raw(basis);
  prof.rho = in_std > 0 ? out_std / in_std : 1.0;
  return prof;
}

QaryResult qary_embed_reduce(const Mat& A, i64 q, const QaryOptions& opt) {
  if (opt.omega < 1) throw std::invalid_argument("qary_embed_reduce: omega must be >= 1");
  const int m = A.rows, n = A.cols;
  const int dim = m + n;
  Mat B(dim, dim);
  for (int j = 0; j < n; j++) B.at(j, m + j) = q;
  for (int i = 0; i < m; i++) {
    B.at(n + i, i) = opt.omega;
    for (int j = 0; j < n; j++) B.at(n + i, m + j) = mod_pos(A.at(i, j), q);
  }
  const double sigma_a = mean_row_std_centered(A, q);
  const double t0 = now_seconds();

  QaryResult out;
  auto extract = [&]() {
    // rows with nonzero R part; RA = last n columns mod q
    std::vector<int> keep;
    for (int r = 0; r < dim; r++) {
      bool nz = false;
      for (int c = 0; c < m; c++)
        if (B.at(r, c) != 0) nz = true;
      if (nz) keep.push_back(r);
    }
    out.R = Mat(static_cast<int>(keep.size()), m);
    out.RA = Mat(static_cast<int>(keep.size()), n);
    for (size_t t = 0; t < keep.size(); t++) {
      int r = keep[t];
      for (int c = 0; c < m; c++) {
        if (B.at(r, c) % opt.omega != 0)
          throw std::runtime_error("qary_embed_reduce: transform block not divisible by omega");
        out.R.at(static_cast<int>(t), c) = B.at(r, c) / opt.omega;
      }
      for (int c = 0; c < n; c++) out.RA.at(static_cast<int>(t), c) = mod_pos(B.at(r, m + c), q);
    }
  };
  auto current_rho = [&]() {
    extract();
    double s = mean_row_std_centered(out.RA, q);
    return sigma_a > 0 ? s / sigma_a : 1.0;
  };

  ReductionProfile prof;
  double lt0 = now_seconds();
  lll(B, opt.delta);
  prof.loops = 1;
  prof.loop_seconds.push_back(now_seconds() - lt0);
  double rho = current_rho();
  prof.loop_rho.push_back(rho);

  int flat = 0;
  for (int loop = 0; loop < opt.max_loops; loop++) {
    if (rho <= opt.target_rho) break;
    if (now_seconds() - t0 > opt.max_seconds) {
      prof.timed_out = true;
      break;
    }
    lt0 = now_seconds();
    BkzOptions bo;
    bo.beta = opt.beta;
    bo.max_loops = 1;
    bo.delta = opt.delta;
    bo.max_seconds = opt.max_seconds - (now_seconds() - t0);
    auto bprof = bkz(B, bo);
    prof.loops++;
    prof.loop_seconds.push_back(now_seconds() - lt0);
    if (bprof.timed_out) prof.timed_out = true;
    double nrho = current_rho();
    prof.loop_rho.push_back(nrho);
    if (rho - nrho < 0.005) flat++; else flat = 0;
    rho = nrho;
    if (flat >= 2 || prof.timed_out) break;
  }
  extract();
  prof.rho = rho;
  prof.per_column_std = column_std_centered(out.RA, q);
  prof.wall_time = now_seconds() - t0;
  out.profile = std::move(prof);
  return out;
}

}  // namespace lwebench::reduction
