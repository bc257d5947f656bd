#pragma once

#include <cmath>

#include "lwebench/common.hpp"

namespace lwebench::core {

// Vector over Z_q with entries kept in canonical range [0, q).
struct ZqVector {
  std::vector<i64> v;
  i64 q = 0;

  ZqVector() = default;
  ZqVector(std::vector<i64> entries, i64 modulus);
  size_t size() const { return v.size(); }
};

// Element of R_q = Z_q[X]/(X^n + 1), n a power of two, coefficients canonical.
struct NegacyclicPoly {
  std::vector<i64> c;
  i64 q = 0;

  NegacyclicPoly() = default;
  NegacyclicPoly(std::vector<i64> coeffs, i64 modulus);
  int n() const { return static_cast<int>(c.size()); }
};

bool is_power_of_two(size_t n);

// Representative of x mod q in [-floor(q/2), floor(q/2)]; for even q the
// range is [-q/2, q/2-1].
i64 centered_mod(i64 x, i64 q);
i64 centered_mod_i128(i128 x, i64 q);

// Matrix whose row l holds the coefficients of x^l * a(x) in R_q.
Mat skew_circulant(const ZqVector& a);

// Coefficients of x^l * y(x); negacyclic rotation with sign flips. Accepts
// 0 <= l < 2n (x^{l+n} = -x^l).
std::vector<i64> negacyclic_shift(const std::vector<i64>& y, int l, i64 q);

NegacyclicPoly negacyclic_mul(const NegacyclicPoly& a, const NegacyclicPoly& s);

// a(1/x): the coefficient reversal (a_0, -a_{n-1}, ..., -a_1), canonical mod q.
std::vector<i64> reverse_poly(const std::vector<i64>& a, i64 q);

// Concatenates the coefficient embeddings of k ring elements.
ZqVector module_embed(const std::vector<NegacyclicPoly>& polys);
std::vector<NegacyclicPoly> module_split(const ZqVector& v, int k);

}  // namespace lwebench::core
