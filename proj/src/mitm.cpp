#include "lwebench/mitm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <unordered_map>

#include "lwebench/core.hpp"
#include "lwebench/reduction.hpp"
#include "lwebench/rng.hpp"

namespace lwebench::mitm {

using core::centered_mod;

std::vector<DualVector> scaled_dual_short_vectors(const Mat& A1, i64 q, int m,
                                                  const DualOptions& opt) {
  const int d2 = A1.cols;
  if (m < 1 || m > A1.rows) throw std::invalid_argument("scaled_dual: bad m");
  if (opt.c < 1) throw std::invalid_argument("scaled_dual: bad c");
  const i64 ci = static_cast<i64>(std::llround(opt.c));
  const bool partitioned = A1.rows >= opt.tau * m;

  std::vector<DualVector> out(opt.tau);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= opt.tau) return;
      rng::Generator gen(rng::derive({rng::Kind::cryptographic, opt.seed}, 1000 + t));
      std::vector<int> rows(m);
      if (partitioned) {
        for (int i = 0; i < m; i++) rows[i] = t * m + i;
      } else {
        std::vector<int> idx(A1.rows);
        for (int i = 0; i < A1.rows; i++) idx[i] = i;
        for (int i = 0; i < m; i++) {
          int j = i + static_cast<int>(gen.uniform_below(A1.rows - i));
          std::swap(idx[i], idx[j]);
        }
        rows.assign(idx.begin(), idx.begin() + m);
      }
      // integer scaled dual basis: rows (c e_i | A1_i) and (0 | q e_j)
      const int dim = m + d2;
      Mat B(dim, dim);
      for (int i = 0; i < m; i++) {
        B.at(i, i) = ci;
        for (int j = 0; j < d2; j++) B.at(i, m + j) = mod_pos(A1.at(rows[i], j), q);
      }
      for (int j = 0; j < d2; j++) B.at(m + j, m + j) = q;
      if (!partitioned && t > 0) {
        // distinct random premix so re-reductions of the same lattice do not
        // all settle on one vector
        for (int i = 0; i < m; i++) {
          int j = static_cast<int>(gen.uniform_below(m));
          if (j == i) continue;
          i64 f = static_cast<i64>(gen.uniform_below(3)) - 1;
          if (f == 0) continue;
          for (int cix = 0; cix < dim; cix++) B.at(i, cix) += f * B.at(j, cix);
        }
      }
      reduction::BkzOptions bo;
      bo.beta = opt.beta;
      bo.max_loops = opt.bkz_loops;
      reduction::bkz(B, bo);
      // shortest row with nonzero y1 part
      int best = -1;
      double bestn = 0;
      for (int r = 0; r < dim; r++) {
        bool nz = false;
        for (int i = 0; i < m; i++)
          if (B.at(r, i) != 0) nz = true;
        if (!nz) continue;
        double nn = reduction::row_norm2(B, r);
        if (best < 0 || nn < bestn) {
          best = r;
          bestn = nn;
        }
      }
      if (best < 0) throw std::runtime_error("scaled_dual: reduction produced no usable row");
      DualVector dv;
      dv.sample_rows = rows;
      dv.y1.resize(m);
      dv.y2.resize(d2);
      for (int i = 0; i < m; i++) {
        if (B.at(best, i) % ci != 0)
          throw std::runtime_error("scaled_dual: first block not divisible by c");
        dv.y1[i] = B.at(best, i) / ci;
      }
      for (int j = 0; j < d2; j++) dv.y2[j] = B.at(best, m + j);
      dv.scaled_norm = std::sqrt(bestn);
      out[t] = std::move(dv);
    }
  };
  int workers = std::max(1, opt.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; w++) ts.emplace_back(work);
    for (auto& t : ts) t.join();
  }
  return out;
}

DerivedSamples derive_samples_and_bound(const std::vector<DualVector>& vecs, const Mat& A2,
                                        const std::vector<i64>& b, double sigma_e, double c,
                                        i64 q, int n_total) {
  if (vecs.empty()) throw std::invalid_argument("derive_samples: no short vectors");
  const int zeta = A2.cols;
  const int tau = static_cast<int>(vecs.size());
  DerivedSamples out;
  out.a = Mat(tau, zeta);
  out.b.resize(tau);
  double norm_acc = 0;
  for (int t = 0; t < tau; t++) {
    const auto& dv = vecs[t];
    const int m = static_cast<int>(dv.y1.size());
    for (int j = 0; j < zeta; j++) {
      i128 acc = 0;
      for (int i = 0; i < m; i++)
        acc += static_cast<i128>(dv.y1[i]) * A2.at(dv.sample_rows[i], j);
      out.a.at(t, j) = mod_pos(acc, q);
    }
    i128 acc = 0;
    for (int i = 0; i < m; i++) acc += static_cast<i128>(dv.y1[i]) * b[dv.sample_rows[i]];
    out.b[t] = mod_pos(acc, q);
    // norm of the reduced scaled-lattice row; recomputed when absent
    double sn = dv.scaled_norm;
    if (sn == 0.0) {
      double n2 = 0;
      for (i64 v : dv.y1) n2 += static_cast<double>(v) * v * c * c;
      for (i64 v : dv.y2) n2 += static_cast<double>(v) * v;
      sn = std::sqrt(n2);
    }
    norm_acc += sn;
  }
  out.mean_short_norm = norm_acc / tau;
  const int m = static_cast<int>(vecs[0].y1.size());
  const double alpha = std::sqrt(2.0 * M_PI) * sigma_e / static_cast<double>(q);
  out.bound = (2.0 + 1.0 / std::sqrt(2.0 * M_PI)) * alpha * static_cast<double>(q) *
              std::sqrt(static_cast<double>(m) / (m + n_total)) * out.mean_short_norm / c;
  if (out.bound >= static_cast<double>(q) / 8.0)
    throw std::runtime_error("derive_samples: bound too large (B >= q/8), reduction insufficient");
  return out;
}

u64 lsh_index(const std::vector<i64>& v, i64 q) {
  if (v.size() > 64) throw std::invalid_argument("lsh_index: tau > 64 unsupported");
  u64 key = 0;
  for (size_t i = 0; i < v.size(); i++)
    if (2 * v[i] < q) key |= 1ull << i;
  return key;
}

std::string lsh_index_string(const std::vector<i64>& v, i64 q) {
  std::string s(v.size(), '0');
  for (size_t i = 0; i < v.size(); i++)
    if (2 * v[i] < q) s[i] = '1';
  return s;
}

std::vector<std::vector<int>> boundary_flips(const std::vector<i64>& r, double B, i64 q) {
  if (B >= static_cast<double>(q) / 4.0)
    throw std::invalid_argument("boundary_flips: B must be below q/4");
  std::vector<int> pos;
  const double half = static_cast<double>(q) / 2.0;
  for (size_t i = 0; i < r.size(); i++) {
    double v = static_cast<double>(r[i]);
    bool near_wrap = v < B || v > static_cast<double>(q) - B;
    bool near_half = std::fabs(v - half) < B;
    if (near_wrap || near_half) pos.push_back(static_cast<int>(i));
  }
  if (pos.size() > 24) throw std::runtime_error("boundary_flips: boundary blow-up, aborting");
  std::vector<std::vector<int>> out;
  out.reserve(1ull << pos.size());
  for (u64 mask = 0; mask < (1ull << pos.size()); mask++) {
    std::vector<int> subset;
    for (size_t t = 0; t < pos.size(); t++)
      if (mask & (1ull << t)) subset.push_back(pos[t]);
    out.push_back(std::move(subset));
  }
  return out;
}

double table_memory_estimate(int zeta, int h_prime, int tau, int alphabet_size) {
  (void)tau;
  if (h_prime > zeta) throw std::invalid_argument("table_memory_estimate: h' > zeta");
  const int wmax = (h_prime + 1) / 2;
  const double assignments = std::max(1, alphabet_size - 1);
  double bytes = 0;
  double binom = 1;  // C(zeta, 0)
  double used = 64.0;
  bytes += binom * used;
  double apow = 1;
  for (int w = 1; w <= wmax; w++) {
    binom = binom * (zeta - w + 1) / w;
    apow *= assignments;
    bytes += binom * apow * (64.0 + 8.0 * w);
  }
  return bytes;
}

DecideResult mitm_decide(const Mat& a_derived, const std::vector<i64>& b_derived, double B,
                         const MitmParams& params) {
  const int tau = a_derived.rows;
  const int zeta = a_derived.cols;
  const i64 q = params.q;
  if (tau < 1 || zeta < 1) throw std::invalid_argument("mitm_decide: empty derived samples");
  double est = table_memory_estimate(zeta, params.h_limit, tau,
                                     static_cast<int>(params.alphabet.size()) + 1);
  if (est > static_cast<double>(params.mem_cap_bytes)) throw MemoryCapExceeded(est);

  DecideResult res;
  const int half = (params.h_limit + 1) / 2;
  const int na = static_cast<int>(params.alphabet.size());

  struct Stored {
    std::vector<int> support;
    u64 assign_id;
  };
  std::unordered_map<u64, std::vector<Stored>> table;

  std::vector<i64> values_of;  // scratch
  auto assignment_values = [&](const std::vector<int>& support, u64 id, std::vector<i64>& out) {
    out.resize(support.size());
    for (size_t t = 0; t < support.size(); t++) {
      out[t] = params.alphabet[id % na];
      id /= na;
    }
  };

  auto a_times = [&](const std::vector<int>& support, const std::vector<i64>& vals,
                     std::vector<i64>& out) {
    out.assign(tau, 0);
    for (size_t t = 0; t < support.size(); t++) {
      const int col = support[t];
      for (int r = 0; r < tau; r++) {
        i64 v = out[r] + mod_pos(static_cast<i128>(vals[t]) * a_derived.at(r, col), q);
        if (v >= q) v -= q;
        out[r] = v;
      }
    }
  };

  auto median_ok = [&](const std::vector<i64>& probe_v, const std::vector<i64>& stored_v) {
    std::vector<double> absres(tau);
    for (int r = 0; r < tau; r++) {
      i64 v = centered_mod(b_derived[r] - probe_v[r] - stored_v[r], q);
      absres[r] = std::fabs(static_cast<double>(v));
    }
    std::nth_element(absres.begin(), absres.begin() + tau / 2, absres.end());
    double med = absres[tau / 2];
    if (tau % 2 == 0) {
      double lo = *std::max_element(absres.begin(), absres.begin() + tau / 2);
      med = 0.5 * (med + lo);
    }
    return med <= B;
  };

  std::vector<i64> v_cur, v_stored, vals, vals_stored;
  std::vector<int> support;

  // enumerate supports of weight <= ceil(h/2), all assignments; probe then
  // insert so every unordered pair is tested exactly once
  bool found = false;
  std::function<void(int, int)> rec = [&](int from, int depth) {
    if (found) return;
    // current support with each assignment
    u64 n_assign = 1;
    for (size_t t = 0; t < support.size(); t++) n_assign *= na;
    for (u64 id = 0; id < n_assign && !found; id++) {
      assignment_values(support, id, vals);
      a_times(support, vals, v_cur);
      // probe r_dagger = b' - A' s
      std::vector<i64> rdag(tau);
      for (int r = 0; r < tau; r++) rdag[r] = mod_pos(static_cast<i128>(b_derived[r]) - v_cur[r], q);
      u64 base_key = lsh_index(rdag, q);
      std::vector<std::vector<int>> flips;
      try {
        flips = boundary_flips(rdag, B, q);
      } catch (const std::runtime_error&) {
        flips = {{}};  // blow-up guard tripped: only the base bucket is probed
        res.blown_probes++;
      }
      for (const auto& subset : flips) {
        u64 key = base_key;
        for (int p : subset) key ^= 1ull << p;
        auto it = table.find(key);
        if (it == table.end()) continue;
        for (const auto& stored : it->second) {
          res.pairs_tested++;
          assignment_values(stored.support, stored.assign_id, vals_stored);
          a_times(stored.support, vals_stored, v_stored);
          if (median_ok(v_cur, v_stored)) {
            // combined candidate s2 = s_probe + s_stored
            std::vector<i64> full(zeta, 0);
            for (size_t t = 0; t < support.size(); t++) full[support[t]] += vals[t];
            for (size_t t = 0; t < stored.support.size(); t++)
              full[stored.support[t]] += vals_stored[t];
            res.support.clear();
            res.values.clear();
            for (int cix = 0; cix < zeta; cix++)
              if (full[cix] != 0) {
                res.support.push_back(cix);
                res.values.push_back(full[cix]);
              }
            res.is_lwe = true;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
      // insert the candidate itself under the hash of A's*
      u64 key = lsh_index(v_cur, q);
      table[key].push_back({support, id});
      res.table_entries++;
    }
    if (found || depth == half) return;
    for (int col = from; col < zeta; col++) {
      support.push_back(col);
      rec(col + 1, depth + 1);
      support.pop_back();
      if (found) return;
    }
  };
  rec(0, 0);
  return res;
}

}  // namespace lwebench::mitm
