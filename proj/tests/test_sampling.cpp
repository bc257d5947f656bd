#include <cmath>
#include <cstdio>
#include <map>

#include "doctest.h"
#include "lwebench/core.hpp"
#include "lwebench/sampling.hpp"

using namespace lwebench;
using namespace lwebench::sampling;

TEST_CASE("binary fixed h") {
  rng::Generator gen({rng::Kind::cryptographic, 1});
  SecretSpec spec;
  spec.dist = Dist::binary;
  spec.length = 64;
  spec.fixed_h = 0;
  auto s = sample_secret(spec, gen);
  for (i64 v : s) CHECK(v == 0);
  spec.fixed_h = 5;
  spec.dist = Dist::ternary;
  s = sample_secret(spec, gen);
  int nz = 0;
  for (i64 v : s) {
    if (v != 0) {
      nz++;
      CHECK(std::llabs(v) == 1);
    }
  }
  CHECK(nz == 5);
  spec.fixed_h = 65;
  CHECK_THROWS_AS(sample_secret(spec, gen), std::invalid_argument);
}

TEST_CASE("binomial law matches enumeration of the 2 eta bits") {
  // eta=2: enumerate the 16 sign patterns to build the expected pmf
  std::map<i64, int> pmf;
  for (int bits = 0; bits < 16; bits++) {
    int a1 = bits & 1, a2 = (bits >> 1) & 1, b1 = (bits >> 2) & 1, b2 = (bits >> 3) & 1;
    pmf[a1 + a2 - b1 - b2]++;
  }
  CHECK(pmf[-2] == 1);
  CHECK(pmf[-1] == 4);
  CHECK(pmf[0] == 6);
  CHECK(pmf[1] == 4);
  CHECK(pmf[2] == 1);

  rng::Generator gen({rng::Kind::cryptographic, 2});
  SecretSpec spec;
  spec.dist = Dist::binomial;
  spec.eta = 2;
  spec.length = 100000;
  auto s = sample_secret(spec, gen);
  std::map<i64, int> got;
  for (i64 v : s) got[v]++;
  for (auto [v, c] : pmf) {
    double expect = c / 16.0;
    double freq = got[v] / 100000.0;
    CHECK(std::fabs(freq - expect) < 0.01);
  }
}

TEST_CASE("gaussian error std in range") {
  rng::Generator gen({rng::Kind::cryptographic, 3});
  auto e = sample_error_vec(Dist::gaussian, 2, 3.19, 100000, 3329, gen);
  double mean = 0;
  for (i64 v : e) mean += static_cast<double>(v);
  mean /= e.size();
  double ss = 0;
  for (i64 v : e) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / e.size());
  CHECK(sd > 3.0);
  CHECK(sd < 3.4);
  // sigma = 0 gives the zero vector
  auto z = sample_error_vec(Dist::gaussian, 2, 0.0, 100, 3329, gen);
  for (i64 v : z) CHECK(v == 0);
}

TEST_CASE("plain samples: zero secret leaves b = e") {
  rng::Generator gen({rng::Kind::cryptographic, 4});
  LweParams p;
  p.n = 16;
  p.q = 3329;
  p.error = Dist::binomial;
  p.error_eta = 2;
  p.secret.length = 16;
  auto s = gen_samples(p, 64, std::vector<i64>(16, 0), gen);
  for (i64 b : s.b) CHECK(std::llabs(core::centered_mod(b, p.q)) <= 2);
}

TEST_CASE("ring samples match the skew-circulant matrix path") {
  rng::Generator gen({rng::Kind::cryptographic, 5});
  LweParams p;
  p.n = 4;
  p.q = 97;
  p.variant = Variant::ring;
  p.error = Dist::gaussian;
  p.sigma_e = 0.0;  // exact identity with zero error
  p.secret.dist = Dist::ternary;
  p.secret.length = 4;
  std::vector<i64> secret = {1, 96, 0, 1};  // -1 mod 97
  auto s = gen_samples(p, 8, secret, gen);
  // each row is the reversed a-polynomial; its pairing must equal <row, s>
  for (int r = 0; r < s.A.rows; r++) {
    i128 acc = dot(s.A.row(r), secret.data(), 4);
    CHECK(mod_pos(acc, p.q) == s.b[r]);
  }
}

TEST_CASE("module samples verify against the planted secret") {
  rng::Generator gen({rng::Kind::cryptographic, 6});
  LweParams p;
  p.n = 8;
  p.k = 2;
  p.q = 3329;
  p.variant = Variant::module;
  p.error = Dist::binomial;
  p.error_eta = 2;
  p.secret.dist = Dist::binomial;
  p.secret.length = 16;
  auto secret = sample_secret(p.secret, gen);
  auto s = gen_samples(p, 32, secret, gen);
  CHECK(residuals_within(s, secret, 2.0));
  // wrong secret fails
  auto wrong = secret;
  wrong[3] = mod_pos(wrong[3] + 1, p.q);
  CHECK_FALSE(residuals_within(s, wrong, 2.0));
}

TEST_CASE("sample file round trip") {
  rng::Generator gen({rng::Kind::cryptographic, 7});
  LweParams p;
  p.n = 8;
  p.q = 257;
  p.variant = Variant::ring;
  p.secret.dist = Dist::ternary;
  p.secret.length = 8;
  p.secret.fixed_h = 3;
  auto secret = sample_secret(p.secret, gen);
  auto s = gen_samples(p, 16, secret, gen);
  save_samples(s, "/tmp/lwebench_test_samples.txt");
  auto t = load_samples("/tmp/lwebench_test_samples.txt");
  CHECK(t.A == s.A);
  CHECK(t.b == s.b);
  CHECK(*t.bhat == *s.bhat);
  CHECK(*t.secret == *s.secret);
  CHECK(t.params.q == p.q);
  std::remove("/tmp/lwebench_test_samples.txt");
  std::remove("/tmp/lwebench_test_samples.txt.secret");
}
