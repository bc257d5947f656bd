#include "lwebench/usvp.hpp"

#include <chrono>
#include <cmath>

#include "lwebench/reduction.hpp"

namespace lwebench::usvp {

namespace {
double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

KannanLattice kannan_embed(const Mat& A, const std::vector<i64>& b, i64 q, i64 omega) {
  const int m = A.rows, n = A.cols;
  if (m < 1) throw std::invalid_argument("kannan_embed: need at least one sample");
  const int d = m + n + 1;
  KannanLattice lat;
  lat.omega = omega;
  lat.m = m;
  lat.n = n;
  lat.basis = Mat(d, d);
  for (int j = 0; j < m; j++) lat.basis.at(j, n + j) = q;
  for (int i = 0; i < n; i++) {
    lat.basis.at(m + i, i) = omega;
    for (int j = 0; j < m; j++) lat.basis.at(m + i, n + j) = mod_pos(A.at(j, i), q);
  }
  for (int j = 0; j < m; j++) lat.basis.at(m + n, n + j) = mod_pos(b[j], q);
  lat.basis.at(m + n, m + n) = 1;
  return lat;
}

i64 balance_omega(const sampling::LweParams& params) {
  double ss = sampling::secret_entry_std(params.secret);
  double se = sampling::error_std(params.error, params.error_eta, params.sigma_e);
  if (ss <= 0) return 1;
  return std::max<i64>(1, static_cast<i64>(std::llround(se / ss)));
}

namespace {

std::optional<std::vector<i64>> scan_basis(const KannanLattice& lat,
                                           const sampling::SampleSet& verify_set) {
  const int d = lat.m + lat.n + 1;
  for (int r = 0; r < d; r++) {
    i64 last = lat.basis.at(r, d - 1);
    if (last != 1 && last != -1) continue;
    std::vector<i64> cand(lat.n);
    bool ok = true;
    for (int i = 0; i < lat.n && ok; i++) {
      i64 v = lat.basis.at(r, i);
      if (v % lat.omega != 0) ok = false;
      // planted row is (omega s, -e, -1): s = -sign(last) * first/omega
      cand[i] = -last * (v / lat.omega);
    }
    if (!ok) continue;
    if (cc::verify_secret(verify_set, cand)) return cand;
  }
  return std::nullopt;
}

}  // namespace

UsvpOutcome usvp_attack(const sampling::SampleSet& samples, int m, const UsvpOptions& opt,
                        const sampling::SampleSet& verify_set) {
  const auto& p = samples.params;
  const int n = p.dim();
  if (m < 1 || m > samples.A.rows) m = static_cast<int>(std::lround(0.875 * n));
  UsvpOutcome out;
  out.omega = opt.omega > 0 ? opt.omega : balance_omega(p);

  Mat A(m, n);
  std::vector<i64> b(m);
  for (int r = 0; r < m; r++) {
    for (int c = 0; c < n; c++) A.at(r, c) = samples.A.at(r, c);
    b[r] = samples.b[r];
  }
  auto lat = kannan_embed(A, b, p.q, out.omega);

  const double t0 = now_seconds();
  reduction::lll(lat.basis);
  if (auto s = scan_basis(lat, verify_set)) {
    out.secret = s;
    out.seconds = now_seconds() - t0;
    return out;
  }

  int beta = opt.beta_start;
  double best_norm = reduction::row_norm2(lat.basis, 0);
  int stall = 0;
  for (int loop = 0; loop < opt.loop_budget; loop++) {
    if (now_seconds() - t0 > opt.max_seconds) break;
    double lt0 = now_seconds();
    reduction::BkzOptions bo;
    bo.beta = beta;
    bo.max_loops = 1;
    bo.node_cap = opt.node_cap;
    bo.max_seconds = opt.max_seconds - (now_seconds() - t0);
    reduction::bkz(lat.basis, bo);
    out.loops = loop + 1;
    out.loop_seconds.push_back(now_seconds() - lt0);
    if (auto s = scan_basis(lat, verify_set)) {
      out.secret = s;
      break;
    }
    double norm = reduction::row_norm2(lat.basis, 0);
    if (norm >= best_norm * 0.999) {
      if (++stall >= 2) {
        beta = std::min(beta + opt.beta_step, opt.beta_max);
        stall = 0;
      }
    } else {
      stall = 0;
    }
    best_norm = std::min(best_norm, norm);
  }
  out.seconds = now_seconds() - t0;
  return out;
}

}  // namespace lwebench::usvp
