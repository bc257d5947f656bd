#include <cmath>

#include "doctest.h"
#include "lwebench/core.hpp"
#include "lwebench/harness.hpp"
#include "lwebench/usvp.hpp"
#include "test_util.hpp"

using namespace lwebench;
using namespace lwebench::usvp;
using namespace lwebench::sampling;

namespace {

SampleSet make_samples(int n, i64 q, int h, double sigma_e, u64 seed,
                       std::vector<i64>* secret_out) {
  LweParams p;
  p.n = n;
  p.q = q;
  p.secret.dist = Dist::binary;
  p.secret.fixed_h = h;
  p.secret.length = n;
  p.error = Dist::gaussian;
  p.sigma_e = sigma_e;
  rng::Generator gen({rng::Kind::cryptographic, seed});
  auto secret = sample_secret(p.secret, gen);
  if (secret_out) *secret_out = secret;
  return gen_samples(p, 4 * n, secret, gen);
}

}  // namespace

TEST_CASE("kannan_embed layout and planted vector membership") {
  std::vector<i64> secret;
  auto s = make_samples(8, 97, 3, 1.0, 1, &secret);
  const int m = 7, n = 8;
  Mat A(m, n);
  std::vector<i64> b(m);
  for (int r = 0; r < m; r++) {
    for (int c = 0; c < n; c++) A.at(r, c) = s.A.at(r, c);
    b[r] = s.b[r];
  }
  const i64 omega = 2;
  auto lat = kannan_embed(A, b, 97, omega);
  CHECK(lat.basis.rows == m + n + 1);
  CHECK(lat.basis.cols == m + n + 1);
  // the vector (omega s, -e, -1) lies in the lattice
  std::vector<i64> target(m + n + 1);
  for (int i = 0; i < n; i++) target[i] = omega * secret[i];
  for (int r = 0; r < m; r++) {
    i128 as = dot(A.row(r), secret.data(), n);
    target[n + r] = -core::centered_mod_i128(static_cast<i128>(b[r]) - as, 97);
  }
  target[m + n] = -1;
  CHECK(testutil::in_lattice(lat.basis, target));
}

TEST_CASE("zero-error tiny instance: lll alone recovers the secret") {
  LweParams p;
  p.n = 8;
  p.q = 257;
  p.secret.dist = Dist::binary;
  p.secret.fixed_h = 3;
  p.secret.length = 8;
  p.error = Dist::gaussian;
  p.sigma_e = 0.0;
  rng::Generator gen({rng::Kind::cryptographic, 2});
  auto secret = sample_secret(p.secret, gen);
  auto samples = gen_samples(p, 48, secret, gen);
  auto head = harness::head_rows(samples, 16);
  auto tail = harness::tail_rows(samples, 32);
  UsvpOptions opt;
  opt.loop_budget = 0;  // scan right after LLL
  auto out = usvp_attack(head, 8, opt, tail);
  REQUIRE(out.secret.has_value());
  CHECK(*out.secret == secret);
  // residuals of the recovered secret are exactly zero
  for (int r = 0; r < tail.A.rows; r++) {
    i128 as = dot(tail.A.row(r), out.secret->data(), 8);
    CHECK(core::centered_mod_i128(static_cast<i128>(tail.b[r]) - as, p.q) == 0);
  }
}

TEST_CASE("planted secret recovered and verified at n=32") {
  std::vector<i64> secret;
  auto samples = make_samples(32, 3329, 5, 3.0, 3, &secret);
  auto head = harness::head_rows(samples, samples.A.rows - 64);
  auto tail = harness::tail_rows(samples, 64);
  UsvpOptions opt;
  opt.beta_start = 16;
  opt.beta_max = 24;
  opt.loop_budget = 4;
  auto out = usvp_attack(head, 28, opt, tail);
  REQUIRE(out.secret.has_value());
  CHECK(*out.secret == secret);
  CHECK(out.omega >= 1);
}

TEST_CASE("balance omega follows sigma_e over sigma_s") {
  LweParams p;
  p.n = 64;
  p.q = 967;
  p.secret.dist = Dist::binary;
  p.secret.fixed_h = 8;
  p.secret.length = 64;
  p.error = Dist::gaussian;
  p.sigma_e = 3.0;
  // sigma_s = sqrt(h/n) for binary fixed-h; omega = round(3 / 0.354) = 8
  CHECK(balance_omega(p) == 8);
  p.sigma_e = 0.1;
  CHECK(balance_omega(p) == 1);  // floor at 1
}

TEST_CASE("returned secrets always verify: no false accepts on garbage") {
  // feed an attack a verify set from a DIFFERENT secret; nothing may verify
  std::vector<i64> s1, s2;
  auto samples = make_samples(16, 3329, 3, 3.0, 4, &s1);
  auto other = make_samples(16, 3329, 3, 3.0, 5, &s2);
  REQUIRE(s1 != s2);
  auto head = harness::head_rows(samples, 48);
  auto tail = harness::tail_rows(other, 48);
  UsvpOptions opt;
  opt.beta_start = 12;
  opt.beta_max = 16;
  opt.loop_budget = 2;
  auto out = usvp_attack(head, 14, opt, tail);
  if (out.secret) CHECK(cc::verify_secret(tail, *out.secret));
}

// Reference point at n=128, q=11197: one to two tours at beta 30. Takes a
// few minutes; run on demand with -no-skip.
TEST_CASE("n=128 reference recovery" * doctest::skip()) {
  std::vector<i64> secret;
  auto samples = make_samples(128, 11197, 8, 3.0, 6, &secret);
  auto head = harness::head_rows(samples, samples.A.rows - 64);
  auto tail = harness::tail_rows(samples, 64);
  UsvpOptions opt;
  opt.beta_start = 30;
  opt.beta_max = 30;
  opt.loop_budget = 2;
  auto out = usvp_attack(head, 112, opt, tail);
  REQUIRE(out.secret.has_value());
  CHECK(*out.secret == secret);
  CHECK(out.loops <= 2);
}
