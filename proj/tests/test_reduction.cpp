#include <cmath>

#include "doctest.h"
#include "lwebench/core.hpp"
#include "lwebench/reduction.hpp"
#include "lwebench/rng.hpp"
#include "test_util.hpp"

using namespace lwebench;
using namespace lwebench::reduction;
using namespace lwebench::testutil;

namespace {

Mat random_basis(int n, int c, i64 lo, i64 hi, u64 seed) {
  rng::Generator gen({rng::Kind::cryptographic, seed});
  Mat m(n, c);
  for (auto& v : m.a) v = lo + static_cast<i64>(gen.uniform_below(hi - lo + 1));
  return m;
}

void check_lll_invariants(const Mat& b, double delta) {
  Gso gso;
  gso.compute(b);
  for (int i = 0; i < b.rows; i++)
    for (int j = 0; j < i; j++) CHECK(std::fabs(gso.mu_at(i, j)) <= 0.5002);
  for (int k = 1; k < b.rows; k++) {
    double m = gso.mu_at(k, k - 1);
    CHECK(gso.bstar[k] >= (delta - m * m) * gso.bstar[k - 1] - 1e-6 * gso.bstar[k - 1]);
  }
}

}  // namespace

TEST_CASE("lll leaves an orthogonal basis unchanged up to sign") {
  Mat b(3, 3);
  b.at(0, 0) = 2;
  b.at(1, 1) = 3;
  b.at(2, 2) = 5;
  Mat orig = b;
  lll(b);
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) CHECK(std::llabs(b.at(i, j)) == std::llabs(orig.at(i, j)));
}

TEST_CASE("lll finds the dim-2 minimum") {
  Mat b(2, 2);
  b.at(0, 0) = 100;
  b.at(0, 1) = 0;
  b.at(1, 0) = 99;
  b.at(1, 1) = 1;
  Mat orig = b;
  lll(b);
  double shortest = brute_force_shortest2(orig, 200);
  CHECK(row_norm2(b, 0) == doctest::Approx(shortest));
  CHECK(same_lattice(orig, b));
}

TEST_CASE("lll preserves the determinant and the lattice") {
  for (u64 seed = 0; seed < 10; seed++) {
    Mat b = random_basis(8, 8, -50, 50, 900 + seed);
    Mat orig = b;
    double ld;
    try {
      ld = log_abs_det(b);
    } catch (...) {
      continue;
    }
    if (!std::isfinite(ld)) continue;
    lll(b);
    CHECK(log_abs_det(b) == doctest::Approx(ld).epsilon(1e-6));
    CHECK(same_lattice(orig, b));
    check_lll_invariants(b, 0.99);
  }
}

TEST_CASE("lll rejects rank-deficient input") {
  Mat b(3, 3);
  // row2 = row0 + row1
  b.at(0, 0) = 3; b.at(0, 1) = 1; b.at(0, 2) = 0;
  b.at(1, 0) = 1; b.at(1, 1) = 4; b.at(1, 2) = 2;
  b.at(2, 0) = 4; b.at(2, 1) = 5; b.at(2, 2) = 2;
  CHECK_THROWS_AS(lll(b), std::invalid_argument);
}

TEST_CASE("svp_enumerate on a scaled identity returns a unit vector") {
  Mat b(4, 4);
  for (int i = 0; i < 4; i++) b.at(i, i) = 7;
  Gso gso;
  gso.compute(b);
  auto r = svp_enumerate(gso, 0, 4, 49.0 * 1.01);
  REQUIRE(r.has_value());
  int nz = 0;
  for (i64 v : r->coeffs)
    if (v != 0) {
      nz++;
      CHECK(std::llabs(v) == 1);
    }
  CHECK(nz == 1);
  CHECK(r->norm2 == doctest::Approx(49.0));
  // dim-1 block
  auto r1 = svp_enumerate(gso, 2, 1, 49.5);
  REQUIRE(r1.has_value());
  CHECK(std::llabs(r1->coeffs[0]) == 1);
  // radius too small finds nothing
  CHECK_FALSE(svp_enumerate(gso, 0, 4, 10.0).has_value());
}

TEST_CASE("svp_enumerate matches bounded brute force in dim 4") {
  for (u64 seed = 0; seed < 12; seed++) {
    Mat b = random_basis(4, 4, -48, 48, 30 + seed);
    Mat work = b;
    try {
      lll(work);
    } catch (const std::invalid_argument&) {
      continue;
    }
    Gso gso;
    gso.compute(work);
    double expect = brute_force_shortest2(b, 5);
    auto r = svp_enumerate(gso, 0, 4, gso.bstar[0] * 1.0001);
    double got = r ? r->norm2 : gso.bstar[0];
    CHECK(got == doctest::Approx(std::min(expect, gso.bstar[0])).epsilon(1e-9));
  }
}

TEST_CASE("bkz beta=2 does not lose to lll") {
  for (u64 seed = 0; seed < 5; seed++) {
    Mat b = random_basis(10, 10, -30, 30, 50 + seed);
    Mat l = b, k = b;
    try {
      lll(l);
    } catch (const std::invalid_argument&) {
      continue;
    }
    BkzOptions opt;
    opt.beta = 2;
    opt.max_loops = 4;
    bkz(k, opt);
    CHECK(row_norm2(k, 0) <= row_norm2(l, 0) * 1.0001);
    CHECK(same_lattice(b, k));
  }
}

TEST_CASE("bkz recovers the exhaustive shortest vector in dim 6") {
  int hits = 0, tried = 0;
  for (u64 seed = 0; seed < 8; seed++) {
    Mat b = random_basis(6, 6, -20, 20, 200 + seed);
    Mat work = b;
    BkzOptions opt;
    opt.beta = 6;
    opt.max_loops = 8;
    try {
      bkz(work, opt);
    } catch (const std::invalid_argument&) {
      continue;
    }
    tried++;
    double expect = brute_force_shortest2(b, 8);
    if (row_norm2(work, 0) == doctest::Approx(expect).epsilon(1e-9)) hits++;
    CHECK(same_lattice(b, work));
  }
  CHECK(hits == tried);
}

TEST_CASE("bkz norm dominance in beta") {
  Mat b = random_basis(16, 16, -40, 40, 77);
  Mat b1 = b, b2 = b;
  BkzOptions o1, o2;
  o1.beta = 4;
  o1.max_loops = 6;
  o2.beta = 10;
  o2.max_loops = 6;
  bkz(b1, o1);
  bkz(b2, o2);
  CHECK(row_norm2(b2, 0) <= row_norm2(b1, 0) * 1.0001);
}

TEST_CASE("qary_embed_reduce on the zero matrix") {
  Mat A(6, 4);
  QaryOptions opt;
  opt.omega = 3;
  opt.beta = 4;
  opt.max_loops = 1;
  auto res = qary_embed_reduce(A, 97, opt);
  CHECK(res.RA.rows == res.R.rows);
  for (i64 v : res.RA.a) CHECK(v == 0);
  // R spans omega Z^m scaled back: must contain all unit directions
  CHECK(res.R.rows == 6);
  CHECK(std::fabs(log_abs_det(res.R)) < 1e-6);  // |det R| = 1
}

TEST_CASE("qary rows satisfy RA = R*A mod q") {
  Mat A = random_basis(12, 10, 0, 96, 123);
  QaryOptions opt;
  opt.omega = 2;
  opt.beta = 8;
  opt.max_loops = 2;
  auto res = qary_embed_reduce(A, 97, opt);
  REQUIRE(res.R.rows == res.RA.rows);
  CHECK(res.R.rows > 0);
  for (int r = 0; r < res.R.rows; r++)
    for (int c = 0; c < 10; c++) {
      i128 acc = 0;
      for (int t = 0; t < 12; t++) acc += static_cast<i128>(res.R.at(r, t)) * A.at(t, c);
      CHECK(mod_pos(acc, 97) == res.RA.at(r, c));
    }
}

TEST_CASE("qary rho is monotone nonincreasing over loops") {
  rng::Generator gen({rng::Kind::cryptographic, 5});
  Mat A = rng::uniform_matrix(28, 32, 3329, gen);
  QaryOptions opt;
  opt.omega = 4;
  opt.beta = 12;
  opt.max_loops = 4;
  auto res = qary_embed_reduce(A, 3329, opt);
  REQUIRE(res.profile.loop_rho.size() >= 2);
  for (size_t i = 1; i < res.profile.loop_rho.size(); i++)
    CHECK(res.profile.loop_rho[i] <= res.profile.loop_rho[i - 1] + 0.02);
  CHECK(res.profile.rho <= 1.05);
  CHECK(res.profile.rho > 0);
}
