#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "lwebench/core.hpp"
#include "lwebench/preprocess.hpp"

using namespace lwebench;
using namespace lwebench::preprocess;
using namespace lwebench::sampling;

namespace {

SampleSet ring_samples(int n, i64 q, int num, int h, double sigma_e, u64 seed,
                       std::vector<i64>* secret_out = nullptr) {
  LweParams p;
  p.n = n;
  p.q = q;
  p.variant = Variant::ring;
  p.secret.dist = Dist::ternary;
  p.secret.fixed_h = h;
  p.secret.length = n;
  p.error = Dist::gaussian;
  p.sigma_e = sigma_e;
  rng::Generator gen({rng::Kind::cryptographic, seed});
  auto secret = sample_secret(p.secret, gen);
  if (secret_out) *secret_out = secret;
  return gen_samples(p, num, secret, gen);
}

double centered_norm2(const std::vector<i64>& v, i64 q) {
  double s = 0;
  for (i64 x : v) {
    double c = static_cast<double>(core::centered_mod(x, q));
    s += c * c;
  }
  return s;
}

}  // namespace

TEST_CASE("cruel_mask basics") {
  rng::Generator gen({rng::Kind::cryptographic, 1});
  const i64 q = 3329;
  Mat m = rng::uniform_matrix(400, 8, q, gen);
  for (int r = 0; r < m.rows; r++) m.at(r, 5) = 0;  // one dead column
  auto mask = cruel_mask(m, q);
  for (int c = 0; c < 8; c++) CHECK(mask[c] == (c == 5 ? 0 : 1));
  Mat tiny = rng::uniform_matrix(50, 8, q, gen);
  CHECK_THROWS_AS(cruel_mask(tiny, q), std::invalid_argument);
}

TEST_CASE("cliff_split_permutation") {
  auto p1 = cliff_split_permutation(1, 8, 4);
  for (int i = 0; i < 8; i++) CHECK(p1.perm[i] == i);
  CHECK_FALSE(p1.adjusted);

  auto p2 = cliff_split_permutation(2, 4, 4);
  CHECK(p2.perm == std::vector<int>({0, 1, 4, 5, 2, 3, 6, 7}));
  for (size_t i = 0; i < p2.perm.size(); i++) CHECK(p2.perm[p2.inv[i]] == static_cast<int>(i));

  auto p3 = cliff_split_permutation(2, 4, 3);  // not divisible by k
  CHECK(p3.adjusted);
  CHECK(p3.nu == 2);

  // applying perm then inv is the identity
  std::vector<i64> v = {10, 11, 12, 13, 14, 15, 16, 17};
  auto w = apply_permutation(apply_permutation(v, p2.perm), p2.inv);
  CHECK(w == v);
}

TEST_CASE("min_partial_hamming") {
  std::vector<i64> zero(8, 0);
  auto r = min_partial_hamming(zero, 4, 1);
  CHECK(r.h_star == 0);
  CHECK(r.w_star == 0);

  std::vector<i64> s(8, 0);
  s[0] = 1;
  s[1] = -1;
  r = min_partial_hamming(s, 4, 1);
  CHECK(r.h_star == 0);
  CHECK(r.w_star == 2);  // window {2,3,4,5} is the first empty one

  std::vector<i64> full(8, 1);
  r = min_partial_hamming(full, 4, 2);  // k=2: components of length 4
  CHECK(r.h_star == 4 * 2);
}

TEST_CASE("build with huge omega reproduces the input rows") {
  // zero error, omega too expensive to mix: rows come back as +-samples mod q
  LweParams p;
  p.n = 8;
  p.q = 97;
  p.secret.dist = Dist::ternary;
  p.secret.length = 8;
  p.error = Dist::gaussian;
  p.sigma_e = 0.0;
  rng::Generator gen({rng::Kind::cryptographic, 3});
  auto secret = sample_secret(p.secret, gen);
  auto samples = gen_samples(p, 24, secret, gen);
  BuildOptions opt;
  opt.m = 12;
  opt.omega = 1000000;
  opt.beta = 2;
  opt.bkz_loops = 0;
  opt.num_matrices = 1;
  opt.target_count = 12;
  opt.seed = 5;
  auto ds = build_reduced_dataset(samples, opt);
  REQUIRE(ds.ra.rows == 12);
  for (int r = 0; r < ds.ra.rows; r++) {
    REQUIRE(ds.transform[r].idx.size() == 1);
    CHECK(std::llabs(ds.transform[r].coeff[0]) == 1);
    int src = ds.transform[r].idx[0];
    i64 sign = ds.transform[r].coeff[0];
    for (int c = 0; c < 8; c++)
      CHECK(ds.ra.at(r, c) == mod_pos(static_cast<i128>(sign) * samples.A.at(src, c), p.q));
    CHECK(ds.rb[r] == mod_pos(static_cast<i128>(sign) * samples.b[src], p.q));
  }
}

TEST_CASE("cliff_shift identities and sample validity") {
  std::vector<i64> secret;
  auto samples = ring_samples(16, 3329, 64, 4, 3.0, 7, &secret);
  BuildOptions opt;
  opt.m = 14;
  opt.omega = 4;
  opt.beta = 8;
  opt.bkz_loops = 1;
  opt.num_matrices = 4;
  opt.target_count = 120;
  opt.seed = 11;
  auto ds = build_reduced_dataset(samples, opt);
  REQUIRE(ds.ra.rows > 0);
  REQUIRE(ds.bpoly.has_value());

  // residual bound: reduced rows carry combined errors of size ||R|| * e
  auto residual_ok = [&](const preprocess::ReducedDataset& d, double bound) {
    for (int r = 0; r < d.ra.rows; r++) {
      i128 acc = dot(d.ra.row(r), secret.data(), d.ra.cols);
      i64 res = core::centered_mod_i128(static_cast<i128>(d.rb[r]) - acc, d.params.q);
      if (std::fabs(static_cast<double>(res)) > bound) return false;
    }
    return true;
  };
  double norm_bound = 0;
  for (const auto& tr : ds.transform) {
    double n2 = 0;
    for (i64 c : tr.coeff) n2 += static_cast<double>(c) * c;
    norm_bound = std::max(norm_bound, std::sqrt(n2));
  }
  const double bound = 12.0 * 3.0 * norm_bound + 1;
  CHECK(residual_ok(ds, bound));

  // l = 0 is the identity
  auto same = cliff_shift(ds, 0);
  CHECK(same.ra == ds.ra);
  CHECK(same.rb == ds.rb);

  // l = n negates ra
  auto neg = cliff_shift(ds, 16);
  for (int r = 0; r < ds.ra.rows; r++)
    for (int c = 0; c < ds.ra.cols; c++)
      CHECK(neg.ra.at(r, c) == (3329 - ds.ra.at(r, c)) % 3329);

  // every shift preserves row norms and keeps pairs valid for the secret
  for (int l : {1, 5, 11, 15}) {
    auto sh = cliff_shift(ds, l);
    CHECK(residual_ok(sh, bound));
    for (int r = 0; r < ds.ra.rows; r++) {
      std::vector<i64> before(ds.ra.row(r), ds.ra.row(r) + ds.ra.cols);
      std::vector<i64> after(sh.ra.row(r), sh.ra.row(r) + sh.ra.cols);
      CHECK(centered_norm2(before, 3329) == doctest::Approx(centered_norm2(after, 3329)));
    }
  }
  // shifts compose
  auto once = cliff_shift(cliff_shift(ds, 3), 5);
  auto twice = cliff_shift(ds, 8);
  CHECK(once.ra == twice.ra);
  CHECK(once.rb == twice.rb);
  CHECK_THROWS_AS(cliff_shift(ds, 32), std::invalid_argument);
}

TEST_CASE("module split yields per-component cliffs of similar width") {
  LweParams p;
  p.n = 32;
  p.k = 2;
  p.q = 3329;
  p.variant = Variant::module;
  p.secret.dist = Dist::binomial;
  p.secret.length = 64;
  p.error = Dist::binomial;
  rng::Generator gen({rng::Kind::cryptographic, 9});
  auto secret = sample_secret(p.secret, gen);
  auto samples = gen_samples(p, 128, secret, gen);
  BuildOptions opt;
  opt.m = 56;
  opt.omega = 1;
  opt.beta = 2;
  opt.bkz_loops = 0;
  opt.num_matrices = 3;
  opt.target_count = 150;
  opt.seed = 13;
  opt.delta = 0.4;  // quality-limited so the unreduced region survives at this size
  auto ds = build_reduced_dataset(samples, opt);
  REQUIRE(ds.split_permutation.has_value());
  REQUIRE(ds.ra.rows >= 100);
  // cruel width per component
  int w1 = 0, w2 = 0;
  for (int c = 0; c < 32; c++) w1 += ds.cruel_mask[c];
  for (int c = 32; c < 64; c++) w2 += ds.cruel_mask[c];
  CHECK(std::abs(w1 - w2) <= 4);
  CHECK(w1 + w2 == ds.num_cruel);
  CHECK(ds.num_cruel > 0);
}

TEST_CASE("dataset save/load round trip with transforms") {
  std::vector<i64> secret;
  auto samples = ring_samples(8, 257, 32, 2, 1.0, 21, &secret);
  BuildOptions opt;
  opt.m = 7;
  opt.omega = 2;
  opt.beta = 4;
  opt.bkz_loops = 1;
  opt.num_matrices = 2;
  opt.target_count = 120;
  opt.seed = 23;
  auto ds = build_reduced_dataset(samples, opt);
  save_dataset(ds, "/tmp/lwebench_test_ds.txt");
  auto back = load_dataset("/tmp/lwebench_test_ds.txt");
  CHECK(back.ra == ds.ra);
  CHECK(back.rb == ds.rb);
  CHECK(back.cruel_mask == ds.cruel_mask);
  CHECK(*back.bpoly == *ds.bpoly);
  REQUIRE(back.transform.size() == ds.transform.size());
  for (size_t r = 0; r < ds.transform.size(); r++) {
    CHECK(back.transform[r].idx == ds.transform[r].idx);
    CHECK(back.transform[r].coeff == ds.transform[r].coeff);
  }
  // reapply_b on the loaded dataset reproduces rb
  auto rb_before = back.rb;
  reapply_b(back, samples);
  CHECK(back.rb == rb_before);
  std::remove("/tmp/lwebench_test_ds.txt");
}
