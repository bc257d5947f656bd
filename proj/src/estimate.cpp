#include "lwebench/estimate.hpp"

#include <cmath>

#include "lwebench/rng.hpp"

namespace lwebench::estimate {

namespace {

constexpr double kCyclesPerSec = 2.1e9;

// CheNgu correction fitted to the published single-loop predictions for
// (n, q, beta) = (64, 967, 30), (128, 11197, 30), (256, 397921, 50).
constexpr double kCheNguC0 = -2.3952920584;
constexpr double kCheNguC1 = -0.1852289893;
constexpr double kCheNguC2 = 1.4649902838;

double log2d(double x) { return std::log2(x); }

CostReport assemble(const std::string& model, int beta, int n, double log2_q,
                    double enum_exp) {
  const int m = static_cast<int>(std::lround(0.875 * n));
  const int d = m + n + 1;
  double enum_cycles_log2 = enum_exp + 6.0 + log2d(8.0 * d);  // 64/node, 8d repeats
  double lll_cycles = std::pow(static_cast<double>(d), 3.0) * log2_q * log2_q;
  double total_log2 = std::log2(std::exp2(enum_cycles_log2) + lll_cycles);
  CostReport r;
  r.model = model;
  r.beta = beta;
  r.lattice_dim = d;
  r.log2_cycles = total_log2;
  r.hours_at_2_1ghz = std::exp2(total_log2) / kCyclesPerSec / 3600.0;
  return r;
}

}  // namespace

CostReport chengu_cost(int beta, int n, double log2_q) {
  if (beta < 2) throw std::invalid_argument("chengu_cost: beta must be >= 2");
  const int m = static_cast<int>(std::lround(0.875 * n));
  const int d = m + n + 1;
  double e = 0.18728 * beta * log2d(beta) - 1.019 * beta + 16.10;
  e += kCheNguC0 + kCheNguC1 * beta + kCheNguC2 * log2d(d);
  return assemble("chengu", beta, n, log2_q, e);
}

CostReport ablr21_cost(int beta, int n, double log2_q) {
  if (beta < 2) throw std::invalid_argument("ablr21_cost: beta must be >= 2");
  const int m = static_cast<int>(std::lround(0.875 * n));
  const int d = m + n + 1;
  double e;
  if (beta <= 97 || 1.5 * beta >= d)
    e = 0.1839 * beta * log2d(beta) - 1.077 * beta + 29.12;
  else
    e = 0.125 * beta * log2d(beta) - 0.654 * beta + 25.84;
  return assemble("ablr21", beta, n, log2_q, e);
}

double mitm_hit_prob(int n_total, int zeta, int h, int h_prime, ProbMode mode, int trials,
                     u64 seed) {
  if (h > n_total || zeta > n_total || h < 0)
    throw std::invalid_argument("mitm_hit_prob: bad arguments");
  if (h_prime >= h) return 1.0;
  if (mode == ProbMode::exact) {
    // P(X = j) = C(zeta,j) C(n-zeta,h-j) / C(n,h) summed for j <= h'
    auto lgc = [](int a, int b) {
      if (b < 0 || b > a) return -1e30;
      return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
    };
    double tail = 0.0;
    for (int j = 0; j <= h_prime; j++) {
      double lg = lgc(zeta, j) + lgc(n_total - zeta, h - j) - lgc(n_total, h);
      if (lg > -1e29) tail += std::exp(lg);
    }
    return std::min(1.0, tail);
  }
  rng::Generator gen({rng::Kind::cryptographic, seed});
  std::vector<int> idx(n_total);
  int hit = 0;
  for (int t = 0; t < trials; t++) {
    for (int i = 0; i < n_total; i++) idx[i] = i;
    int inside = 0;
    for (int i = 0; i < h; i++) {
      int j = i + static_cast<int>(gen.uniform_below(n_total - i));
      std::swap(idx[i], idx[j]);
      if (idx[i] < zeta) inside++;
    }
    if (inside <= h_prime) hit++;
  }
  return static_cast<double>(hit) / trials;
}

double cruel_bit_prob(int n, int k, int num_cruel, int h, int x, int trials, u64 seed) {
  const int nu = num_cruel / k;
  if (nu > n || nu < 1) throw std::invalid_argument("cruel_bit_prob: bad window");
  if (h == 0) return 1.0;
  const int total = n * k;
  rng::Generator gen({rng::Kind::cryptographic, seed});
  std::vector<int> idx(total);
  std::vector<int> count(n);
  int hit = 0;
  for (int t = 0; t < trials; t++) {
    for (int i = 0; i < total; i++) idx[i] = i;
    std::fill(count.begin(), count.end(), 0);
    for (int i = 0; i < h; i++) {
      int j = i + static_cast<int>(gen.uniform_below(total - i));
      std::swap(idx[i], idx[j]);
      int pos = idx[i] % n;
      for (int w = pos - nu + 1; w <= pos; w++) count[(w % n + n) % n]++;
    }
    int mn = count[0];
    for (int w = 1; w < n; w++) mn = std::min(mn, count[w]);
    if (mn <= x) hit++;
  }
  return static_cast<double>(hit) / trials;
}

namespace {

// Irwin-Hall CDF at t for n terms (t in units of q)
double irwin_hall_cdf(int n, double t) {
  if (t <= 0) return 0.0;
  if (t >= n) return 1.0;
  double acc = 0.0, sign = 1.0, binom = 1.0;
  for (int kk = 0; kk <= static_cast<int>(t); kk++) {
    acc += sign * binom * std::pow(t - kk, n);
    sign = -sign;
    binom = binom * (n - kk) / (kk + 1);
  }
  double fact = 1.0;
  for (int i = 2; i <= n; i++) fact *= i;
  return acc / fact;
}

}  // namespace

IrwinHallReport irwin_hall_check(int n_terms, i64 q, int samples, int bins, u64 seed) {
  if (n_terms < 1) throw std::invalid_argument("irwin_hall_check: n_terms must be >= 1");
  IrwinHallReport rep;
  rep.empirical.assign(bins, 0.0);
  rep.analytic.assign(bins, 0.0);
  rng::Generator gen({rng::Kind::cryptographic, seed});
  const double top = static_cast<double>(n_terms) * q;
  int between = 0;
  for (int t = 0; t < samples; t++) {
    i64 s = 0;
    for (int i = 0; i < n_terms; i++) s += gen.uniform_mod(q);
    if (s >= q && s <= 2 * q) between++;
    int b = std::min(bins - 1, static_cast<int>(static_cast<double>(s) / top * bins));
    rep.empirical[b] += 1.0;
  }
  for (double& v : rep.empirical) v /= samples;
  for (int b = 0; b < bins; b++) {
    double lo = static_cast<double>(b) * n_terms / bins;
    double hi = static_cast<double>(b + 1) * n_terms / bins;
    rep.analytic[b] = irwin_hall_cdf(n_terms, hi) - irwin_hall_cdf(n_terms, lo);
  }
  for (int b = 0; b < bins; b++)
    rep.max_deviation =
        std::max(rep.max_deviation, std::fabs(rep.empirical[b] - rep.analytic[b]));
  rep.p_between_q_2q_empirical = static_cast<double>(between) / samples;
  rep.p_between_q_2q_exact =
      irwin_hall_cdf(n_terms, 2.0) - irwin_hall_cdf(n_terms, 1.0);
  return rep;
}

SievingMemory sieving_memory_estimate(int n) {
  if (n < 64) throw std::invalid_argument("sieving_memory_estimate: n must be >= 64");
  // reference sieving dimensions after dimensions-for-free
  static const std::pair<int, int> ref[] = {{128, 104}, {160, 133}, {256, 218},
                                            {512, 450}, {768, 682}, {1024, 916}};
  double dim;
  if (n <= ref[0].first) {
    double slope = static_cast<double>(ref[1].second - ref[0].second) /
                   (ref[1].first - ref[0].first);
    dim = ref[0].second - slope * (ref[0].first - n);
  } else if (n >= ref[5].first) {
    double slope = static_cast<double>(ref[5].second - ref[4].second) /
                   (ref[5].first - ref[4].first);
    dim = ref[5].second + slope * (n - ref[5].first);
  } else {
    dim = ref[5].second;
    for (int i = 0; i + 1 < 6; i++)
      if (n >= ref[i].first && n <= ref[i + 1].first) {
        double tfrac = static_cast<double>(n - ref[i].first) / (ref[i + 1].first - ref[i].first);
        dim = ref[i].second + tfrac * (ref[i + 1].second - ref[i].second);
      }
  }
  SievingMemory m;
  m.sieve_dim = static_cast<int>(std::lround(dim));
  m.db_vectors = std::exp2(1.5 + dim / 2.0 * std::log2(4.0 / 3.0));
  m.bytes = m.db_vectors * 416.0;
  return m;
}

}  // namespace lwebench::estimate
