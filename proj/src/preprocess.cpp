#include "lwebench/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "lwebench/core.hpp"

namespace lwebench::preprocess {

using core::centered_mod;
using nlohmann::json;

std::vector<uint8_t> cruel_mask(const Mat& ra, i64 q) {
  if (ra.rows < 100)
    throw std::invalid_argument("cruel_mask: need >= 100 rows for stable statistics");
  auto stds = reduction::column_std_centered(ra, q);
  double threshold = static_cast<double>(q) / (2.0 * std::sqrt(12.0));
  std::vector<uint8_t> mask(ra.cols, 0);
  for (int c = 0; c < ra.cols; c++) mask[c] = stds[c] > threshold ? 1 : 0;
  return mask;
}

SplitPermutation cliff_split_permutation(int k, int n, int N_u) {
  if (k < 1 || n < 1 || N_u < 0 || N_u > n * k)
    throw std::invalid_argument("cliff_split_permutation: bad arguments");
  SplitPermutation p;
  p.adjusted = N_u % k != 0;
  p.nu = p.adjusted ? (N_u + k - 1) / k : N_u / k;
  p.perm.reserve(n * k);
  for (int i = 0; i < k; i++)
    for (int j = 0; j < p.nu; j++) p.perm.push_back(i * n + j);
  for (int i = 0; i < k; i++)
    for (int j = p.nu; j < n; j++) p.perm.push_back(i * n + j);
  p.inv.assign(n * k, 0);
  for (int j = 0; j < n * k; j++) p.inv[p.perm[j]] = j;
  return p;
}

std::vector<i64> apply_permutation(const std::vector<i64>& v, const std::vector<int>& perm) {
  std::vector<i64> out(v.size());
  for (size_t j = 0; j < perm.size(); j++) out[j] = v[perm[j]];
  return out;
}

PartialHamming min_partial_hamming(const std::vector<i64>& secret, int nu, int k) {
  const int total = static_cast<int>(secret.size());
  if (k < 1 || total % k != 0) throw std::invalid_argument("min_partial_hamming: bad rank");
  const int n = total / k;
  if (nu > n) throw std::invalid_argument("min_partial_hamming: window exceeds n");
  // delta array: window w covers position j iff w in (j-nu, j] cyclically
  std::vector<int> count(n, 0);
  for (int i = 0; i < k; i++)
    for (int j = 0; j < n; j++) {
      if (secret[i * n + j] == 0) continue;
      for (int w = j - nu + 1; w <= j; w++) count[(w % n + n) % n]++;
    }
  PartialHamming r;
  r.h_star = count[0];
  r.w_star = 0;
  for (int w = 1; w < n; w++)
    if (count[w] < r.h_star) {
      r.h_star = count[w];
      r.w_star = w;
    }
  return r;
}

void cliff_shift_row(std::vector<i64>& ra, i64& rb, std::vector<i64>& bpoly_row, int l, int n,
                     int k, i64 q) {
  if (l < 0 || l >= 2 * n) throw std::invalid_argument("cliff_shift: invalid shift");
  for (int i = 0; i < k; i++) {
    std::vector<i64> comp(ra.begin() + i * n, ra.begin() + (i + 1) * n);
    auto shifted = core::negacyclic_shift(comp, l, q);
    std::copy(shifted.begin(), shifted.end(), ra.begin() + i * n);
  }
  bpoly_row = core::negacyclic_shift(bpoly_row, l, q);
  // rb = coeff_0 of the shifted reversed b-polynomial
  rb = bpoly_row[0];
}

ReducedDataset cliff_shift(const ReducedDataset& ds, int l) {
  if (ds.params.variant == sampling::Variant::plain)
    throw std::invalid_argument("cliff_shift: plain LWE rows cannot be rotated");
  if (!ds.bpoly) throw std::invalid_argument("cliff_shift: dataset lacks b-polynomials");
  ReducedDataset out = ds;
  const int n = ds.params.n, k = ds.params.k;
  for (int r = 0; r < out.ra.rows; r++) {
    std::vector<i64> row(out.ra.row(r), out.ra.row(r) + out.ra.cols);
    std::vector<i64> bp(out.bpoly->row(r), out.bpoly->row(r) + n);
    i64 rb = out.rb[r];
    cliff_shift_row(row, rb, bp, l, n, k, ds.params.q);
    std::copy(row.begin(), row.end(), out.ra.row(r));
    std::copy(bp.begin(), bp.end(), out.bpoly->row(r));
    out.rb[r] = rb;
  }
  out.shift = (ds.shift + l) % (2 * n);
  out.per_column_std = reduction::column_std_centered(out.ra, ds.params.q);
  if (out.ra.rows >= 100) {
    out.cruel_mask = cruel_mask(out.ra, ds.params.q);
    out.num_cruel = 0;
    for (auto m : out.cruel_mask) out.num_cruel += m;
  }
  return out;
}

namespace {

struct MatrixJob {
  Mat ra;
  Mat r;
  std::vector<int> picked;
  double rho = 1.0;
  double seconds = 0.0;
};

MatrixJob reduce_one(const sampling::SampleSet& samples, const BuildOptions& opt,
                     const std::vector<int>* perm, u64 seed) {
  const int nk = samples.params.dim();
  const int m = opt.m > 0 ? opt.m : static_cast<int>(std::lround(0.875 * nk));
  if (m > samples.A.rows) throw std::invalid_argument("build_reduced_dataset: m exceeds samples");
  rng::Generator gen(rng::derive({rng::Kind::cryptographic, seed}, 0));
  // draw m distinct sample indices
  std::vector<int> idx(samples.A.rows);
  for (int i = 0; i < samples.A.rows; i++) idx[i] = i;
  for (int i = 0; i < m; i++) {
    int j = i + static_cast<int>(gen.uniform_below(samples.A.rows - i));
    std::swap(idx[i], idx[j]);
  }
  MatrixJob job;
  job.picked.assign(idx.begin(), idx.begin() + m);
  Mat sub(m, nk);
  for (int r = 0; r < m; r++)
    for (int c = 0; c < nk; c++) {
      int src = perm ? (*perm)[c] : c;
      sub.at(r, c) = samples.A.at(job.picked[r], src);
    }
  reduction::QaryOptions qo;
  qo.omega = opt.omega;
  qo.beta = opt.beta;
  qo.delta = opt.delta;
  qo.target_rho = opt.target_rho;
  qo.max_loops = opt.bkz_loops;
  qo.max_seconds = opt.matrix_seconds_cap;
  auto res = reduction::qary_embed_reduce(sub, samples.params.q, qo);
  job.rho = res.profile.rho;
  job.seconds = res.profile.wall_time;
  job.r = std::move(res.R);
  if (perm) {
    // un-permute: reduced column c sits at original position (*perm)[c]
    Mat ra(res.RA.rows, nk);
    for (int r = 0; r < res.RA.rows; r++)
      for (int c = 0; c < nk; c++) ra.at(r, (*perm)[c]) = res.RA.at(r, c);
    job.ra = std::move(ra);
  } else {
    job.ra = std::move(res.RA);
  }
  return job;
}

}  // namespace

namespace {

ReducedDataset build_once(const sampling::SampleSet& samples, const BuildOptions& opt,
                          const std::optional<SplitPermutation>& split);

}  // namespace

ReducedDataset build_reduced_dataset(const sampling::SampleSet& samples,
                                     const BuildOptions& opt) {
  const auto& params = samples.params;
  const int nk = params.dim();
  if (params.variant != sampling::Variant::module)
    return build_once(samples, opt, std::nullopt);

  // one probe reduction measures the cliff size; the permutation then splits
  // it evenly across components. If the realized cliff disagrees with the
  // probe, rebuild once with the measured width.
  auto probe = reduce_one(samples, opt, nullptr, opt.seed);
  int nu_total = std::max(nk / 2, params.k);
  if (probe.ra.rows >= 100) {
    auto mask = cruel_mask(probe.ra, params.q);
    int cnt = 0;
    for (auto m : mask) cnt += m;
    nu_total = std::max(cnt, params.k);
  }
  for (int attempt = 0; attempt < 2; attempt++) {
    auto split = cliff_split_permutation(params.k, params.n, nu_total);
    auto ds = build_once(samples, opt, split);
    int worst = 0;
    for (int i = 0; i < params.k; i++) {
      int w = 0;
      for (int c = 0; c < params.n; c++) w += ds.cruel_mask[i * params.n + c];
      worst = std::max(worst, std::abs(w - ds.num_cruel / params.k));
    }
    if (worst <= 2 || attempt == 1 || ds.num_cruel < params.k) return ds;
    nu_total = std::max(ds.num_cruel, params.k);
  }
  return build_once(samples, opt, std::nullopt);  // unreachable
}

namespace {

ReducedDataset build_once(const sampling::SampleSet& samples, const BuildOptions& opt,
                          const std::optional<SplitPermutation>& split) {
  const auto& params = samples.params;
  const int nk = params.dim();
  ReducedDataset ds;
  ds.params = params;
  ds.ra = Mat(0, nk);
  const bool ring_like = params.variant != sampling::Variant::plain;
  if (ring_like) ds.bpoly = Mat(0, params.n);

  const std::vector<int>* perm = nullptr;
  if (split) {
    perm = &split->perm;
    ds.split_permutation = split->perm;
  }

  std::vector<MatrixJob> jobs(opt.num_matrices);
  std::vector<int> done(opt.num_matrices, 0);
  int rows_total = 0;

  int workers = std::max(1, opt.workers);
  std::atomic<int> next{0};
  // every scheduled matrix is reduced: which jobs run must not depend on
  // worker timing or the assembled dataset would not replay
  auto work = [&]() {
    for (;;) {
      int j = next.fetch_add(1);
      if (j >= opt.num_matrices) return;
      jobs[j] = reduce_one(samples, opt, perm, opt.seed + 7919ull * (j + 1));
      done[j] = 1;
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; w++) ts.emplace_back(work);
    for (auto& t : ts) t.join();
  }

  for (int j = 0; j < opt.num_matrices && rows_total < opt.target_count; j++) {
    if (!done[j]) continue;
    auto& job = jobs[j];
    ds.matrix_rho.push_back(job.rho);
    ds.matrix_seconds.push_back(job.seconds);
    const int take = std::min(job.ra.rows, opt.target_count - rows_total);
    int base = ds.ra.rows;
    ds.ra.rows += take;
    ds.ra.a.resize(static_cast<size_t>(ds.ra.rows) * nk);
    if (ring_like) {
      ds.bpoly->rows += take;
      ds.bpoly->a.resize(static_cast<size_t>(ds.bpoly->rows) * params.n);
    }
    for (int r = 0; r < take; r++) {
      for (int c = 0; c < nk; c++) ds.ra.at(base + r, c) = job.ra.at(r, c);
      RowTransform tr;
      for (int t = 0; t < job.r.cols; t++) {
        if (job.r.at(r, t) == 0) continue;
        tr.idx.push_back(job.picked[t]);
        tr.coeff.push_back(job.r.at(r, t));
      }
      ds.transform.push_back(std::move(tr));
      ds.rb.push_back(0);
    }
    rows_total += take;
  }

  reapply_b(ds, samples);
  ds.partial = rows_total < opt.target_count;
  if (!ds.matrix_rho.empty()) {
    double s = 0;
    for (double r : ds.matrix_rho) s += r;
    ds.rho = s / static_cast<double>(ds.matrix_rho.size());
  }
  ds.per_column_std = reduction::column_std_centered(ds.ra, params.q);
  if (ds.ra.rows >= 100) {
    ds.cruel_mask = cruel_mask(ds.ra, params.q);
    for (auto m : ds.cruel_mask) ds.num_cruel += m;
  } else {
    ds.cruel_mask.assign(nk, 1);
    ds.num_cruel = nk;
  }
  return ds;
}

}  // namespace

void reapply_b(ReducedDataset& ds, const sampling::SampleSet& samples) {
  if (ds.transform.size() != static_cast<size_t>(ds.ra.rows))
    throw std::invalid_argument("reapply_b: dataset lacks transform provenance");
  if (ds.shift != 0)
    throw std::invalid_argument("reapply_b: dataset already shifted; re-apply before shifting");
  const i64 q = ds.params.q;
  const bool ring_like = ds.params.variant != sampling::Variant::plain;
  if (ring_like && !samples.bhat)
    throw std::invalid_argument("reapply_b: ring samples lack b polynomials");
  for (int r = 0; r < ds.ra.rows; r++) {
    const auto& tr = ds.transform[r];
    i128 acc = 0;
    for (size_t t = 0; t < tr.idx.size(); t++)
      acc += static_cast<i128>(tr.coeff[t]) * samples.b[tr.idx[t]];
    ds.rb[r] = mod_pos(acc, q);
    if (ring_like) {
      for (int c = 0; c < ds.params.n; c++) {
        i128 s = 0;
        for (size_t t = 0; t < tr.idx.size(); t++)
          s += static_cast<i128>(tr.coeff[t]) * samples.bhat->at(tr.idx[t], c);
        ds.bpoly->at(r, c) = mod_pos(s, q);
      }
    }
  }
}

void save_dataset(const ReducedDataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  json hdr = {{"type", "reduced"},
              {"rows", ds.ra.rows},
              {"cols", ds.ra.cols},
              {"shift", ds.shift},
              {"rho", ds.rho},
              {"num_cruel", ds.num_cruel},
              {"partial", ds.partial},
              {"q", ds.params.q},
              {"n", ds.params.n},
              {"k", ds.params.k},
              {"variant", sampling::variant_name(ds.params.variant)},
              {"sigma_e", ds.params.sigma_e},
              {"error", sampling::dist_name(ds.params.error)},
              {"error_eta", ds.params.error_eta},
              {"has_bpoly", ds.bpoly.has_value()},
              {"has_transform", !ds.transform.empty()}};
  if (ds.split_permutation) hdr["split_permutation"] = *ds.split_permutation;
  hdr["cruel_mask"] = ds.cruel_mask;
  hdr["per_column_std"] = ds.per_column_std;
  hdr["matrix_rho"] = ds.matrix_rho;
  hdr["matrix_seconds"] = ds.matrix_seconds;
  f << hdr.dump() << "\n";
  for (int r = 0; r < ds.ra.rows; r++) {
    for (int c = 0; c < ds.ra.cols; c++) f << ds.ra.at(r, c) << ' ';
    f << ds.rb[r] << "\n";
  }
  if (ds.bpoly)
    for (int r = 0; r < ds.bpoly->rows; r++)
      for (int c = 0; c < ds.bpoly->cols; c++)
        f << ds.bpoly->at(r, c) << (c + 1 == ds.bpoly->cols ? '\n' : ' ');
  for (const auto& tr : ds.transform) {
    f << tr.idx.size();
    for (size_t t = 0; t < tr.idx.size(); t++) f << ' ' << tr.idx[t] << ' ' << tr.coeff[t];
    f << "\n";
  }
}

ReducedDataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(f, line);
  json hdr = json::parse(line);
  ReducedDataset ds;
  ds.params.q = hdr.at("q");
  ds.params.n = hdr.at("n");
  ds.params.k = hdr.at("k");
  ds.params.variant = sampling::variant_from_name(hdr.at("variant"));
  ds.params.sigma_e = hdr.at("sigma_e");
  ds.params.error = sampling::dist_from_name(hdr.at("error"));
  ds.params.error_eta = hdr.at("error_eta");
  ds.params.secret.length = ds.params.dim();
  ds.shift = hdr.at("shift");
  ds.rho = hdr.at("rho");
  ds.num_cruel = hdr.at("num_cruel");
  ds.partial = hdr.at("partial");
  ds.cruel_mask = hdr.at("cruel_mask").get<std::vector<uint8_t>>();
  ds.per_column_std = hdr.at("per_column_std").get<std::vector<double>>();
  ds.matrix_rho = hdr.at("matrix_rho").get<std::vector<double>>();
  ds.matrix_seconds = hdr.at("matrix_seconds").get<std::vector<double>>();
  if (hdr.contains("split_permutation"))
    ds.split_permutation = hdr.at("split_permutation").get<std::vector<int>>();
  int rows = hdr.at("rows"), cols = hdr.at("cols");
  ds.ra = Mat(rows, cols);
  ds.rb.resize(rows);
  for (int r = 0; r < rows; r++) {
    for (int c = 0; c < cols; c++) f >> ds.ra.at(r, c);
    f >> ds.rb[r];
  }
  if (hdr.value("has_bpoly", false)) {
    Mat bp(rows, ds.params.n);
    for (int r = 0; r < rows; r++)
      for (int c = 0; c < ds.params.n; c++) f >> bp.at(r, c);
    ds.bpoly = std::move(bp);
  }
  if (hdr.value("has_transform", false)) {
    ds.transform.resize(rows);
    for (int r = 0; r < rows; r++) {
      size_t cnt;
      f >> cnt;
      ds.transform[r].idx.resize(cnt);
      ds.transform[r].coeff.resize(cnt);
      for (size_t t = 0; t < cnt; t++) f >> ds.transform[r].idx[t] >> ds.transform[r].coeff[t];
    }
  }
  return ds;
}

}  // namespace lwebench::preprocess
