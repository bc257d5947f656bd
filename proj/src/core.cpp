#include "lwebench/core.hpp"

namespace lwebench::core {

bool is_power_of_two(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

ZqVector::ZqVector(std::vector<i64> entries, i64 modulus) : v(std::move(entries)), q(modulus) {
  if (q < 2) throw std::invalid_argument("ZqVector: modulus must be >= 2");
  if (v.empty()) throw std::invalid_argument("ZqVector: empty");
  for (auto& x : v) x = mod_pos(x, q);
}

NegacyclicPoly::NegacyclicPoly(std::vector<i64> coeffs, i64 modulus)
    : c(std::move(coeffs)), q(modulus) {
  if (q < 2) throw std::invalid_argument("NegacyclicPoly: modulus must be >= 2");
  if (!is_power_of_two(c.size()))
    throw std::invalid_argument("NegacyclicPoly: length must be a power of two");
  for (auto& x : c) x = mod_pos(x, q);
}

i64 centered_mod(i64 x, i64 q) {
  if (q < 2) throw std::invalid_argument("centered_mod: invalid modulus");
  i64 r = x % q;
  if (r < 0) r += q;
  if (2 * r >= q) r -= q;
  return r;
}

i64 centered_mod_i128(i128 x, i64 q) {
  if (q < 2) throw std::invalid_argument("centered_mod: invalid modulus");
  i64 r = mod_pos(x, q);
  if (2 * r >= q) r -= q;
  return r;
}

std::vector<i64> negacyclic_shift(const std::vector<i64>& y, int l, i64 q) {
  const int n = static_cast<int>(y.size());
  if (l < 0 || l >= 2 * n) throw std::invalid_argument("negacyclic_shift: invalid shift");
  std::vector<i64> out(n, 0);
  for (int j = 0; j < n; j++) {
    int t = j + l;
    bool flip = (t / n) % 2 == 1;
    i64 val = flip ? (q - y[j]) % q : y[j];
    out[t % n] = val;
  }
  return out;
}

Mat skew_circulant(const ZqVector& a) {
  const int n = static_cast<int>(a.size());
  if (!is_power_of_two(a.size()))
    throw std::invalid_argument("skew_circulant: dimension must be a power of two");
  Mat m(n, n);
  std::vector<i64> row = a.v;
  for (int l = 0; l < n; l++) {
    for (int j = 0; j < n; j++) m.at(l, j) = row[j];
    // next row = coefficients of x^{l+1} a(x)
    i64 wrap = row[n - 1];
    for (int j = n - 1; j > 0; j--) row[j] = row[j - 1];
    row[0] = (a.q - wrap) % a.q;
  }
  return m;
}

NegacyclicPoly negacyclic_mul(const NegacyclicPoly& a, const NegacyclicPoly& s) {
  if (a.n() != s.n() || a.q != s.q)
    throw std::invalid_argument("negacyclic_mul: mismatched operands");
  const int n = a.n();
  const i64 q = a.q;
  std::vector<i128> acc(n, 0);
  for (int i = 0; i < n; i++) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < n; j++) {
      int t = i + j;
      i128 term = static_cast<i128>(a.c[i]) * s.c[j];
      if (t >= n)
        acc[t - n] -= term;
      else
        acc[t] += term;
    }
  }
  std::vector<i64> out(n);
  for (int i = 0; i < n; i++) out[i] = mod_pos(acc[i], q);
  return NegacyclicPoly(std::move(out), q);
}

std::vector<i64> reverse_poly(const std::vector<i64>& a, i64 q) {
  const int n = static_cast<int>(a.size());
  std::vector<i64> r(n);
  r[0] = a[0] % q;
  for (int j = 1; j < n; j++) r[j] = (q - a[n - j] % q) % q;
  return r;
}

ZqVector module_embed(const std::vector<NegacyclicPoly>& polys) {
  if (polys.empty()) throw std::invalid_argument("module_embed: empty operand list");
  const int n = polys[0].n();
  const i64 q = polys[0].q;
  std::vector<i64> out;
  out.reserve(polys.size() * n);
  for (const auto& p : polys) {
    if (p.n() != n || p.q != q) throw std::invalid_argument("module_embed: mismatched operands");
    out.insert(out.end(), p.c.begin(), p.c.end());
  }
  return ZqVector(std::move(out), q);
}

std::vector<NegacyclicPoly> module_split(const ZqVector& v, int k) {
  if (k < 1 || v.size() % k != 0) throw std::invalid_argument("module_split: bad rank");
  const int n = static_cast<int>(v.size()) / k;
  std::vector<NegacyclicPoly> out;
  for (int i = 0; i < k; i++)
    out.emplace_back(std::vector<i64>(v.v.begin() + i * n, v.v.begin() + (i + 1) * n), v.q);
  return out;
}

}  // namespace lwebench::core
