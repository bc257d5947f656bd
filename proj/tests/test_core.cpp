#include "doctest.h"
#include "lwebench/core.hpp"
#include "lwebench/rng.hpp"

using namespace lwebench;
using namespace lwebench::core;

namespace {

// schoolbook multiply-then-reduce oracle, independent of negacyclic_mul
std::vector<i64> schoolbook_negacyclic(const std::vector<i64>& a, const std::vector<i64>& s,
                                       i64 q) {
  const int n = static_cast<int>(a.size());
  std::vector<i64> full(2 * n, 0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) full[i + j] = mod_pos(full[i + j] + (i128)a[i] * s[j], q);
  std::vector<i64> out(n);
  for (int i = 0; i < n; i++) out[i] = mod_pos((i128)full[i] - full[i + n], q);
  return out;
}

}  // namespace

TEST_CASE("centered_mod basics") {
  CHECK(centered_mod(0, 3329) == 0);
  CHECK(centered_mod(3328, 3329) == -1);
  CHECK(centered_mod(1665, 3329) == -1664);
  CHECK(std::llabs(centered_mod(1665, 3329)) <= 3329 / 2);
  // even q: [-q/2, q/2-1]
  CHECK(centered_mod(2, 4) == -2);
  CHECK(centered_mod(1, 4) == 1);
  CHECK_THROWS_AS(centered_mod(1, 1), std::invalid_argument);
  // difference divisible by q
  for (i64 x = -50; x < 50; x++) {
    for (i64 q : {2, 3, 97, 3329}) {
      i64 r = centered_mod(x, q);
      CHECK((r - x) % q == 0);
    }
  }
}

TEST_CASE("skew_circulant small cases") {
  // n=2: rows (a0,a1), (-a1,a0)
  ZqVector a({3, 5}, 97);
  auto m = skew_circulant(a);
  CHECK(m.at(0, 0) == 3);
  CHECK(m.at(0, 1) == 5);
  CHECK(m.at(1, 0) == 97 - 5);
  CHECK(m.at(1, 1) == 3);
  // multiplication by 1 is the identity
  ZqVector one({1, 0, 0, 0}, 97);
  auto id = skew_circulant(one);
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++) CHECK(id.at(i, j) == (i == j ? 1 : 0));
  CHECK_THROWS_AS(skew_circulant(ZqVector({1, 2, 3}, 97)), std::invalid_argument);
}

TEST_CASE("skew_circulant rows match schoolbook x^l a") {
  rng::Generator gen({rng::Kind::cryptographic, 42});
  const i64 q = 97;
  const int n = 8;
  std::vector<i64> ac(n);
  for (auto& v : ac) v = gen.uniform_mod(q);
  auto m = skew_circulant(ZqVector(ac, q));
  std::vector<i64> xl(n, 0);  // x^l as a coefficient vector
  for (int l = 0; l < n; l++) {
    std::fill(xl.begin(), xl.end(), 0);
    xl[l] = 1;
    auto expect = schoolbook_negacyclic(xl, ac, q);
    for (int j = 0; j < n; j++) CHECK(m.at(l, j) == expect[j]);
  }
}

TEST_CASE("negacyclic_mul trivial and oracle") {
  const i64 q = 97;
  const int n = 8;
  // a = 1 leaves s unchanged
  std::vector<i64> one(n, 0);
  one[0] = 1;
  rng::Generator gen({rng::Kind::cryptographic, 7});
  std::vector<i64> sc(n);
  for (auto& v : sc) v = gen.uniform_mod(q);
  auto r = negacyclic_mul(NegacyclicPoly(one, q), NegacyclicPoly(sc, q));
  CHECK(r.c == NegacyclicPoly(sc, q).c);
  // x * x^{n-1} = -1
  std::vector<i64> x(n, 0), xn1(n, 0);
  x[1] = 1;
  xn1[n - 1] = 1;
  auto m1 = negacyclic_mul(NegacyclicPoly(x, q), NegacyclicPoly(xn1, q));
  CHECK(m1.c[0] == q - 1);
  for (int i = 1; i < n; i++) CHECK(m1.c[i] == 0);
  // random products match the schoolbook oracle
  for (int t = 0; t < 20; t++) {
    std::vector<i64> ac(n), bc(n);
    for (auto& v : ac) v = gen.uniform_mod(q);
    for (auto& v : bc) v = gen.uniform_mod(q);
    auto got = negacyclic_mul(NegacyclicPoly(ac, q), NegacyclicPoly(bc, q));
    CHECK(got.c == schoolbook_negacyclic(ac, bc, q));
  }
  CHECK_THROWS_AS(negacyclic_mul(NegacyclicPoly({1, 2}, 97), NegacyclicPoly({1, 2}, 89)),
                  std::invalid_argument);
}

TEST_CASE("negacyclic_mul commutes") {
  rng::Generator gen({rng::Kind::cryptographic, 9});
  const i64 q = 3329;
  const int n = 16;
  for (int t = 0; t < 10; t++) {
    std::vector<i64> ac(n), bc(n);
    for (auto& v : ac) v = gen.uniform_mod(q);
    for (auto& v : bc) v = gen.uniform_mod(q);
    NegacyclicPoly a(ac, q), b(bc, q);
    CHECK(negacyclic_mul(a, b).c == negacyclic_mul(b, a).c);
  }
}

TEST_CASE("skew_circulant rows share L2 norm") {
  rng::Generator gen({rng::Kind::cryptographic, 10});
  const i64 q = 3329;
  std::vector<i64> ac(16);
  for (auto& v : ac) v = gen.uniform_mod(q);
  auto m = skew_circulant(ZqVector(ac, q));
  // compare centered norms: shifts permute and negate coefficients
  auto norm2 = [&](int r) {
    i128 s = 0;
    for (int c = 0; c < m.cols; c++) {
      i64 v = centered_mod(m.at(r, c), q);
      s += (i128)v * v;
    }
    return s;
  };
  auto n0 = norm2(0);
  for (int r = 1; r < m.rows; r++) CHECK(norm2(r) == n0);
}

TEST_CASE("module_embed and split") {
  NegacyclicPoly p1({1, 2}, 97), p2({3, 4}, 97);
  auto v = module_embed({p1, p2});
  CHECK(v.v == std::vector<i64>({1, 2, 3, 4}));
  auto back = module_split(v, 2);
  CHECK(back[0].c == p1.c);
  CHECK(back[1].c == p2.c);
  auto single = module_embed({p1});
  CHECK(single.v == p1.c);
  CHECK_THROWS_AS(module_embed({}), std::invalid_argument);
}

TEST_CASE("negacyclic_shift wraps with sign and preserves identity") {
  const i64 q = 97;
  std::vector<i64> y = {1, 2, 3, 4};
  CHECK(negacyclic_shift(y, 0, q) == y);
  // l = n negates
  auto neg = negacyclic_shift(y, 4, q);
  for (int i = 0; i < 4; i++) CHECK(neg[i] == (q - y[i]) % q);
  // composition
  auto s1 = negacyclic_shift(negacyclic_shift(y, 3, q), 2, q);
  auto s2 = negacyclic_shift(y, 5, q);
  CHECK(s1 == s2);
}

TEST_CASE("reverse_poly is an involution and multiplicative") {
  rng::Generator gen({rng::Kind::cryptographic, 4});
  const i64 q = 97;
  const int n = 8;
  std::vector<i64> ac(n), bc(n);
  for (auto& v : ac) v = gen.uniform_mod(q);
  for (auto& v : bc) v = gen.uniform_mod(q);
  CHECK(reverse_poly(reverse_poly(ac, q), q) == ac);
  // rev(a b) = rev(a) rev(b)
  auto lhs = reverse_poly(schoolbook_negacyclic(ac, bc, q), q);
  auto rhs = schoolbook_negacyclic(reverse_poly(ac, q), reverse_poly(bc, q), q);
  CHECK(lhs == rhs);
}
