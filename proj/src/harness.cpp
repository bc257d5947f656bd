#include "lwebench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace lwebench::harness {

using nlohmann::json;

namespace {
double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

std::string attack_name(Attack a) {
  switch (a) {
    case Attack::usvp: return "usvp";
    case Attack::cc: return "cc";
    case Attack::mitm: return "mitm";
    case Attack::distinguish: return "distinguish";
  }
  return "?";
}

Attack attack_from_name(const std::string& s) {
  if (s == "usvp") return Attack::usvp;
  if (s == "cc") return Attack::cc;
  if (s == "mitm") return Attack::mitm;
  if (s == "distinguish") return Attack::distinguish;
  throw std::invalid_argument("unknown attack: " + s);
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::recovered: return "recovered";
    case Outcome::decided: return "decided";
    case Outcome::failed: return "failed";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  params.validate();
  if (trials_per_h < 1) throw std::invalid_argument("config: trials_per_h must be >= 1");
  if (time_cap_seconds <= 0 || mem_cap_bytes == 0)
    throw std::invalid_argument("config: caps must be positive");
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  json j;
  f >> j;
  ExperimentConfig c;
  auto& p = j.at("params");
  c.params.n = p.at("n");
  c.params.k = p.value("k", 1);
  c.params.q = p.at("q");
  c.params.variant = sampling::variant_from_name(p.value("variant", "plain"));
  c.params.secret.dist = sampling::dist_from_name(p.value("secret_dist", "ternary"));
  c.params.secret.eta = p.value("eta", 2);
  c.params.secret.sigma = p.value("secret_sigma", 3.19);
  c.params.secret.length = c.params.dim();
  c.params.error = sampling::dist_from_name(p.value("error_dist", "gaussian"));
  c.params.error_eta = p.value("error_eta", 2);
  c.params.sigma_e = p.value("sigma_e", 3.19);
  c.attack = attack_from_name(j.at("attack"));
  c.h_list = j.at("h_list").get<std::vector<int>>();
  c.trials_per_h = j.value("trials_per_h", 10);
  c.seed = j.value("seed", 1ull);
  c.time_cap_seconds = j.value("time_cap_seconds", 3600.0);
  c.mem_cap_bytes = j.value("mem_cap_bytes", 8ull << 30);
  c.workers = j.value("workers", 1);
  if (j.contains("build")) {
    auto& b = j.at("build");
    c.build.m = b.value("m", 0);
    c.build.omega = b.value("omega", 4);
    c.build.beta = b.value("beta", 18);
    c.build.target_rho = b.value("target_rho", 0.0);
    c.build.bkz_loops = b.value("bkz_loops", 4);
    c.build.num_matrices = b.value("num_matrices", 64);
    c.build.target_count = b.value("target_count", 5000);
  }
  if (j.contains("cc")) {
    c.cc_opt.bf.h_limit = j.at("cc").value("h_limit", 3);
    c.cc_opt.bf.gamma = j.at("cc").value("gamma", 0.7);
  }
  if (j.contains("usvp")) {
    auto& u = j.at("usvp");
    c.usvp_opt.omega = u.value("omega", 0);
    c.usvp_opt.beta_start = u.value("beta_start", 20);
    c.usvp_opt.beta_max = u.value("beta_max", 40);
    c.usvp_opt.loop_budget = u.value("loop_budget", 10);
    c.usvp_m = u.value("m", 0);
  }
  if (j.contains("mitm")) {
    auto& mm = j.at("mitm");
    c.mitm_zeta = mm.value("zeta", 0);
    c.mitm_tau = mm.value("tau", 8);
    c.mitm_c = mm.value("c", 10.0);
    c.mitm_h_limit = mm.value("h_limit", 4);
    c.mitm_beta = mm.value("beta", 20);
  }
  if (j.contains("distinguish")) {
    auto& d = j.at("distinguish");
    c.dist_delta = d.value("delta", 16);
    c.dist_probes = d.value("probes", 128);
    c.dist_oracle_sigma = d.value("oracle_sigma", 3.0);
  }
  c.num_samples = j.value("num_samples", 0);
  c.verify_samples = j.value("verify_samples", 64);
  if (j.contains("generator")) {
    auto& g = j.at("generator");
    c.gen.kind = g.value("kind", "crypto") == std::string("lcg") ? rng::Kind::lcg
                                                                  : rng::Kind::cryptographic;
    c.gen.lcg.a = g.value("lcg_a", 1103515245ull);
    c.gen.lcg.c = g.value("lcg_c", 12345ull);
    c.gen.lcg.m = g.value("lcg_m", static_cast<u64>(1u << 31));
  }
  return c;
}

std::string fingerprint(const std::vector<i64>& secret) {
  u64 h = 1469598103934665603ull;
  for (i64 v : secret) {
    h ^= static_cast<u64>(v);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string AttackResult::to_json_line() const {
  json j = {{"attack", attack},
            {"setting", setting},
            {"h", h},
            {"trial", trial},
            {"outcome", outcome_name(outcome)},
            {"preprocess_hours", preprocess_hours},
            {"recover_hours", recover_hours},
            {"peak_memory_bytes", peak_memory_bytes},
            {"fingerprint", secret_fingerprint},
            {"fingerprint_match", fingerprint_match}};
  return j.dump();
}

namespace {

std::string setting_string(const sampling::LweParams& p) {
  std::ostringstream os;
  os << sampling::variant_name(p.variant) << " n=" << p.n << " k=" << p.k << " q=" << p.q
     << " secret=" << sampling::dist_name(p.secret.dist);
  return os.str();
}

}  // namespace

std::vector<i64> nonzero_alphabet(const sampling::SecretSpec& s) {
  switch (s.dist) {
    case sampling::Dist::binary: return {1};
    case sampling::Dist::ternary: return {-1, 1};
    case sampling::Dist::binomial: {
      std::vector<i64> a;
      for (i64 v = -s.eta; v <= s.eta; v++)
        if (v != 0) a.push_back(v);
      return a;
    }
    case sampling::Dist::gaussian: {
      std::vector<i64> a;
      i64 r = std::max<i64>(1, static_cast<i64>(std::llround(3 * s.sigma)));
      for (i64 v = -r; v <= r; v++)
        if (v != 0) a.push_back(v);
      return a;
    }
    default: throw std::invalid_argument("nonzero_alphabet: uniform secrets unsupported");
  }
}

std::vector<i64> full_alphabet(const sampling::SecretSpec& s) {
  auto a = nonzero_alphabet(s);
  a.push_back(0);
  std::sort(a.begin(), a.end());
  return a;
}

namespace {

// Shared A-side of a sample set: per-trial secrets only change b.
struct SharedAside {
  Mat A;  // reversed embeddings for ring/module
  sampling::LweParams params;
};

SharedAside gen_a_side(const sampling::LweParams& params, int num, rng::Generator& gen) {
  SharedAside s;
  s.params = params;
  s.A = rng::uniform_matrix(num, params.dim(), params.q, gen);
  return s;
}

sampling::SampleSet complete_samples(const SharedAside& aside, const std::vector<i64>& secret,
                                     rng::Generator& gen) {
  const auto& p = aside.params;
  const i64 q = p.q;
  sampling::SampleSet out;
  out.params = p;
  out.secret = secret;
  out.A = aside.A;
  const int rows = aside.A.rows;
  out.b.resize(rows);
  if (p.variant == sampling::Variant::plain) {
    for (int r = 0; r < rows; r++) {
      i128 acc = dot(out.A.row(r), secret.data(), p.dim());
      i64 e = sampling::sample_error_vec(p.error, p.error_eta, p.sigma_e, 1, q, gen)[0];
      out.b[r] = mod_pos(acc + e, q);
    }
    return out;
  }
  // ring/module: rows hold reversed a-coefficients; rebuild b polynomials
  const int n = p.n, k = p.k;
  out.bhat = Mat(rows, n);
  std::vector<core::NegacyclicPoly> spolys;
  for (int i = 0; i < k; i++)
    spolys.emplace_back(std::vector<i64>(secret.begin() + i * n, secret.begin() + (i + 1) * n),
                        q);
  for (int r = 0; r < rows; r++) {
    std::vector<i64> bacc(n, 0);
    for (int i = 0; i < k; i++) {
      std::vector<i64> arev(out.A.row(r) + i * n, out.A.row(r) + (i + 1) * n);
      auto ac = core::reverse_poly(arev, q);  // reversal is an involution
      auto prod = core::negacyclic_mul(core::NegacyclicPoly(ac, q), spolys[i]);
      for (int j = 0; j < n; j++) bacc[j] = mod_pos(static_cast<i128>(bacc[j]) + prod.c[j], q);
    }
    auto evec = sampling::sample_error_vec(p.error, p.error_eta, p.sigma_e, n, q, gen);
    for (int j = 0; j < n; j++) bacc[j] = mod_pos(static_cast<i128>(bacc[j]) + evec[j], q);
    out.b[r] = bacc[0];
    auto brev = core::reverse_poly(bacc, q);
    for (int j = 0; j < n; j++) out.bhat->at(r, j) = brev[j];
  }
  return out;
}

}  // namespace

sampling::SampleSet head_rows(const sampling::SampleSet& s, int rows) {
  sampling::SampleSet out;
  out.params = s.params;
  out.secret = s.secret;
  out.A = Mat(rows, s.A.cols);
  out.b.assign(s.b.begin(), s.b.begin() + rows);
  std::copy(s.A.a.begin(), s.A.a.begin() + static_cast<size_t>(rows) * s.A.cols,
            out.A.a.begin());
  if (s.bhat) {
    Mat bh(rows, s.bhat->cols);
    std::copy(s.bhat->a.begin(), s.bhat->a.begin() + static_cast<size_t>(rows) * s.bhat->cols,
              bh.a.begin());
    out.bhat = std::move(bh);
  }
  return out;
}

sampling::SampleSet tail_rows(const sampling::SampleSet& s, int rows) {
  sampling::SampleSet out;
  out.params = s.params;
  out.secret = s.secret;
  const int from = s.A.rows - rows;
  out.A = Mat(rows, s.A.cols);
  out.b.assign(s.b.begin() + from, s.b.end());
  std::copy(s.A.a.begin() + static_cast<size_t>(from) * s.A.cols, s.A.a.end(),
            out.A.a.begin());
  return out;
}

std::vector<AttackResult> run_experiment(const ExperimentConfig& cfg,
                                         const std::string& results_path) {
  cfg.validate();
  std::vector<AttackResult> results;
  std::ofstream log;
  if (!results_path.empty()) log.open(results_path, std::ios::app);
  const std::string setting = setting_string(cfg.params);
  if (cfg.h_list.empty()) return results;

  const int nk = cfg.params.dim();
  int attack_rows = cfg.num_samples > 0 ? cfg.num_samples : 4 * cfg.params.n;
  if (cfg.attack == Attack::mitm) attack_rows = std::max(attack_rows, cfg.mitm_tau * nk);
  const int num = attack_rows + cfg.verify_samples;

  rng::GeneratorSpec a_spec = cfg.gen;
  a_spec.seed = cfg.seed + 17;
  rng::Generator a_gen(a_spec);
  SharedAside aside = gen_a_side(cfg.params, num, a_gen);

  // shared preprocessing: transforms depend only on the A side
  double preprocess_hours = 0.0;
  std::optional<preprocess::ReducedDataset> shared_ds;
  std::optional<std::vector<mitm::DualVector>> shared_dual;
  double shared_mem = 0.0;
  const int zeta = cfg.mitm_zeta > 0 ? std::min(cfg.mitm_zeta, nk - 1) : nk / 2;
  if (cfg.attack == Attack::cc || cfg.attack == Attack::distinguish) {
    double t0 = now_seconds();
    rng::Generator tmp(rng::derive({rng::Kind::cryptographic, cfg.seed}, 23));
    auto probe = complete_samples(aside, std::vector<i64>(nk, 0), tmp);
    preprocess::BuildOptions b = cfg.build;
    b.seed = cfg.seed;
    b.workers = cfg.workers;
    shared_ds = preprocess::build_reduced_dataset(head_rows(probe, attack_rows), b);
    preprocess_hours = (now_seconds() - t0) / 3600.0;
    shared_mem = static_cast<double>(shared_ds->ra.a.size() * sizeof(i64));
  } else if (cfg.attack == Attack::mitm) {
    double t0 = now_seconds();
    Mat A1(attack_rows, nk - zeta);
    for (int r = 0; r < attack_rows; r++)
      for (int c = 0; c < nk - zeta; c++) A1.at(r, c) = aside.A.at(r, c);
    mitm::DualOptions dopt;
    dopt.c = cfg.mitm_c;
    dopt.tau = cfg.mitm_tau;
    dopt.beta = cfg.mitm_beta;
    dopt.seed = cfg.seed;
    dopt.workers = cfg.workers;
    shared_dual = mitm::scaled_dual_short_vectors(A1, cfg.params.q, nk, dopt);
    preprocess_hours = (now_seconds() - t0) / 3600.0;
  }

  for (int h : cfg.h_list) {
    for (int trial = 0; trial < cfg.trials_per_h; trial++) {
      u64 trial_seed = cfg.seed + 100000ull * (h + 1) + 1000ull * (trial + 1);
      rng::Generator sgen(rng::derive({rng::Kind::cryptographic, trial_seed}, 1));
      sampling::SecretSpec spec = cfg.params.secret;
      spec.fixed_h = h;
      spec.length = nk;
      auto secret = sampling::sample_secret(spec, sgen);
      rng::Generator egen(rng::derive({rng::Kind::cryptographic, trial_seed}, 2));
      auto samples = complete_samples(aside, secret, egen);
      auto fresh = tail_rows(samples, cfg.verify_samples);

      AttackResult res;
      res.attack = attack_name(cfg.attack);
      res.setting = setting;
      res.h = h;
      res.trial = trial;
      res.preprocess_hours = preprocess_hours;
      res.secret_fingerprint = fingerprint(secret);
      res.peak_memory_bytes = shared_mem;

      double t0 = now_seconds();
      try {
        switch (cfg.attack) {
          case Attack::cc: {
            auto ds = *shared_ds;
            preprocess::reapply_b(ds, samples);
            auto out =
                cc::attack(ds, fresh, cfg.cc_opt, nonzero_alphabet(spec), full_alphabet(spec));
            if (out.secret) {
              res.outcome = Outcome::recovered;
              res.fingerprint_match = fingerprint(*out.secret) == res.secret_fingerprint;
            }
            break;
          }
          case Attack::usvp: {
            usvp::UsvpOptions uo = cfg.usvp_opt;
            uo.max_seconds = cfg.time_cap_seconds;
            int m = cfg.usvp_m > 0 ? cfg.usvp_m : static_cast<int>(std::lround(0.875 * nk));
            auto out = usvp::usvp_attack(head_rows(samples, attack_rows), m, uo, fresh);
            if (out.secret) {
              res.outcome = Outcome::recovered;
              res.fingerprint_match = fingerprint(*out.secret) == res.secret_fingerprint;
            }
            break;
          }
          case Attack::mitm: {
            Mat A2(attack_rows, zeta);
            for (int r = 0; r < attack_rows; r++)
              for (int c = 0; c < zeta; c++) A2.at(r, c) = aside.A.at(r, nk - zeta + c);
            auto derived = mitm::derive_samples_and_bound(*shared_dual, A2, samples.b,
                                                          cfg.params.sigma_e, cfg.mitm_c,
                                                          cfg.params.q, nk);
            mitm::MitmParams mp;
            mp.zeta = zeta;
            mp.tau = cfg.mitm_tau;
            mp.c = cfg.mitm_c;
            mp.alphabet = nonzero_alphabet(spec);
            mp.q = cfg.params.q;
            mp.h_limit = cfg.mitm_h_limit;
            mp.mem_cap_bytes = cfg.mem_cap_bytes;
            res.peak_memory_bytes = mitm::table_memory_estimate(
                zeta, mp.h_limit, cfg.mitm_tau, static_cast<int>(mp.alphabet.size()) + 1);
            auto dec = mitm::mitm_decide(derived.a, derived.b, derived.bound, mp);
            if (dec.is_lwe) res.outcome = Outcome::decided;
            break;
          }
          case Attack::distinguish: {
            auto ds = *shared_ds;
            preprocess::reapply_b(ds, samples);
            distinguish::NoisyOracle oracle(secret, cfg.params.q, cfg.dist_oracle_sigma,
                                            trial_seed);
            auto per_coord = distinguish::recover_secret(oracle, cfg.params.q, nk,
                                                         cfg.dist_delta, cfg.dist_probes, ds.ra);
            std::vector<i64> rec(nk, 0);
            bool all_known = true;
            for (int i = 0; i < nk; i++) {
              rec[i] = per_coord[i].value;
              all_known = all_known && per_coord[i].known;
            }
            if (all_known && cc::verify_secret(fresh, rec)) {
              res.outcome = Outcome::recovered;
              res.fingerprint_match = fingerprint(rec) == res.secret_fingerprint;
            }
            break;
          }
        }
      } catch (const mitm::MemoryCapExceeded& e) {
        res.outcome = Outcome::failed;
        res.peak_memory_bytes = e.estimate_bytes;
      } catch (const std::exception&) {
        res.outcome = Outcome::failed;
      }
      res.recover_hours = (now_seconds() - t0) / 3600.0;
      if (res.recover_hours * 3600.0 > cfg.time_cap_seconds) res.outcome = Outcome::timeout;
      results.push_back(res);
      if (log) log << res.to_json_line() << "\n";
    }
  }
  return results;
}

ReportTables report(const std::string& results_path) {
  std::ifstream f(results_path);
  if (!f) throw std::runtime_error("cannot read results " + results_path);
  ReportTables out;
  struct Cell {
    int attempted = 0;
    int recovered = 0;
    double best_hours = 0.0;
  };
  std::map<std::pair<std::string, std::string>, std::map<int, Cell>> grid;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      auto key = std::make_pair(j.at("setting").get<std::string>(),
                                j.at("attack").get<std::string>());
      auto& cell = grid[key][j.at("h").get<int>()];
      cell.attempted++;
      std::string oc = j.at("outcome");
      if (oc == "recovered" || oc == "decided") {
        double hrs = j.at("recover_hours");
        if (cell.recovered == 0 || hrs < cell.best_hours) cell.best_hours = hrs;
        cell.recovered++;
      }
    } catch (const std::exception&) {
      out.skipped_records++;
    }
  }
  // order attacks by best recovered h descending, ties by best time
  struct RowKey {
    std::string setting, attack;
    int best_h = -1;
    double best_time = 1e18;
  };
  std::vector<RowKey> order;
  for (const auto& [key, cells] : grid) {
    RowKey rk{key.first, key.second};
    for (const auto& [h, cell] : cells)
      if (cell.recovered > 0 && h > rk.best_h) {
        rk.best_h = h;
        rk.best_time = cell.best_hours;
      }
    order.push_back(rk);
  }
  std::sort(order.begin(), order.end(), [](const RowKey& a, const RowKey& b) {
    if (a.setting != b.setting) return a.setting < b.setting;
    if (a.best_h != b.best_h) return a.best_h > b.best_h;
    if (a.best_time != b.best_time) return a.best_time < b.best_time;
    return a.attack < b.attack;
  });
  std::ostringstream text;
  json jout = json::array();
  for (const auto& rk : order) {
    text << rk.setting << " | " << rk.attack << " | best h=";
    if (rk.best_h >= 0)
      text << rk.best_h;
    else
      text << "-";
    text << "\n";
    json jrow = {{"setting", rk.setting}, {"attack", rk.attack}, {"best_h", rk.best_h}};
    json hs = json::array();
    for (const auto& [h, cell] : grid[{rk.setting, rk.attack}]) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "  h=%-3d rate=%d/%d best_hours=%.4f", h, cell.recovered,
                    cell.attempted, cell.recovered ? cell.best_hours : 0.0);
      text << buf << "\n";
      hs.push_back({{"h", h},
                    {"recovered", cell.recovered},
                    {"attempted", cell.attempted},
                    {"best_hours", cell.recovered ? cell.best_hours : 0.0}});
    }
    jrow["per_h"] = hs;
    jout.push_back(jrow);
  }
  out.text = text.str();
  out.json = jout.dump(2);
  return out;
}

}  // namespace lwebench::harness
