#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "lwebench/estimate.hpp"
#include "lwebench/harness.hpp"

using namespace lwebench;

namespace {

int env_workers() {
  const char* w = std::getenv("LWEBENCH_WORKERS");
  if (!w) return static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::atoi(w));
}

sampling::LweParams params_from_flags(int n, int k, i64 q, const std::string& variant,
                                      const std::string& secret_dist, int eta,
                                      double secret_sigma, const std::string& error_dist,
                                      double sigma_e) {
  sampling::LweParams p;
  p.n = n;
  p.k = k;
  p.q = q;
  p.variant = sampling::variant_from_name(variant);
  p.secret.dist = sampling::dist_from_name(secret_dist);
  p.secret.eta = eta;
  p.secret.sigma = secret_sigma;
  p.secret.length = p.dim();
  p.error = sampling::dist_from_name(error_dist);
  p.error_eta = eta;
  p.sigma_e = sigma_e;
  p.validate();
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LWE attack benchmarking toolkit"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate LWE/RLWE/MLWE samples");
  struct {
    int n = 64, k = 1, h = -1, num = 0, eta = 2;
    i64 q = 3329;
    std::string variant = "plain", secret_dist = "ternary", error_dist = "gaussian";
    std::string gen_kind = "crypto", out = "samples.txt";
    double sigma_e = 3.19, secret_sigma = 3.19;
    u64 seed = 1, lcg_a = 1103515245, lcg_c = 12345, lcg_m = 1u << 31;
  } g;
  gen->add_option("--n", g.n);
  gen->add_option("--k", g.k);
  gen->add_option("--q", g.q);
  gen->add_option("--variant", g.variant, "plain|ring|module");
  gen->add_option("--secret-dist", g.secret_dist, "binary|ternary|binomial|gaussian");
  gen->add_option("--eta", g.eta);
  gen->add_option("--secret-sigma", g.secret_sigma);
  gen->add_option("--hw", g.h, "fixed Hamming weight (-1: unconstrained)");
  gen->add_option("--error-dist", g.error_dist);
  gen->add_option("--sigma-e", g.sigma_e);
  gen->add_option("--num", g.num, "sample count (0: 4n)");
  gen->add_option("--seed", g.seed);
  gen->add_option("--gen", g.gen_kind, "crypto|lcg");
  gen->add_option("--lcg-a", g.lcg_a);
  gen->add_option("--lcg-c", g.lcg_c);
  gen->add_option("--lcg-m", g.lcg_m);
  gen->add_option("--out", g.out);

  // ---- preprocess ----
  auto* prep = app.add_subcommand("preprocess", "subsample-and-reduce a sample file");
  struct {
    std::string in = "samples.txt", out = "reduced.txt";
    int m = 0, beta = 18, loops = 4, num_matrices = 64, target = 5000;
    i64 omega = 4;
    double target_rho = 0.0;
    u64 seed = 1;
  } pr;
  prep->add_option("--in", pr.in);
  prep->add_option("--out", pr.out);
  prep->add_option("--m", pr.m, "subsample size (0: 0.875 nk)");
  prep->add_option("--omega", pr.omega);
  prep->add_option("--beta", pr.beta);
  prep->add_option("--loops", pr.loops);
  prep->add_option("--num-matrices", pr.num_matrices);
  prep->add_option("--target-count", pr.target);
  prep->add_option("--target-rho", pr.target_rho);
  prep->add_option("--seed", pr.seed);

  // ---- attack ----
  auto* attack = app.add_subcommand("attack", "run an attack");
  attack->require_subcommand(1);
  auto* a_usvp = attack->add_subcommand("usvp", "Kannan embedding search");
  struct {
    std::string in = "samples.txt";
    int m = 0, beta_max = 40, loop_budget = 10;
    i64 omega = 0;
    double max_seconds = 3600;
  } au;
  a_usvp->add_option("--in", au.in);
  a_usvp->add_option("--m", au.m);
  a_usvp->add_option("--omega", au.omega);
  a_usvp->add_option("--beta-max", au.beta_max);
  a_usvp->add_option("--loop-budget", au.loop_budget);
  a_usvp->add_option("--max-seconds", au.max_seconds);

  auto* a_cc = attack->add_subcommand("cc", "cool-and-cruel brute force + regression");
  struct {
    std::string ds = "reduced.txt", samples = "samples.txt";
    int h_limit = 3;
    double gamma = 0.7;
  } ac;
  a_cc->add_option("--dataset", ac.ds);
  a_cc->add_option("--samples", ac.samples, "sample file; the tail verifies candidates");
  a_cc->add_option("--h-limit", ac.h_limit);
  a_cc->add_option("--gamma", ac.gamma);

  auto* a_mitm = attack->add_subcommand("mitm", "dual hybrid meet-in-the-middle decision");
  struct {
    std::string in = "samples.txt";
    int zeta = 0, tau = 8, h_limit = 4, beta = 20;
    double c = 10.0;
    u64 mem_cap = 4ull << 30;
  } am;
  a_mitm->add_option("--in", am.in);
  a_mitm->add_option("--zeta", am.zeta);
  a_mitm->add_option("--tau", am.tau);
  a_mitm->add_option("--h-limit", am.h_limit);
  a_mitm->add_option("--beta", am.beta);
  a_mitm->add_option("--c", am.c);
  a_mitm->add_option("--mem-cap", am.mem_cap);

  // ---- distinguish ----
  auto* dist = app.add_subcommand("distinguish", "slope/binary distinguisher against an oracle");
  struct {
    std::string ds = "reduced.txt", oracle = "noisy", cmd;
    std::string samples = "samples.txt";
    i64 delta = 16;
    int probes = 128;
    double sigma = 3.0;
    u64 seed = 1;
  } dd;
  dist->add_option("--dataset", dd.ds);
  dist->add_option("--samples", dd.samples);
  dist->add_option("--oracle", dd.oracle, "exact|noisy|cmd");
  dist->add_option("--cmd", dd.cmd, "external oracle command (line protocol on stdio)");
  dist->add_option("--delta", dd.delta);
  dist->add_option("--probes", dd.probes);
  dist->add_option("--sigma", dd.sigma);
  dist->add_option("--seed", dd.seed);

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "cost and probability tables");
  est->require_subcommand(1);
  bool est_json = false;
  auto* e_cost = est->add_subcommand("cost", "BKZ loop cost models");
  struct {
    int beta = 30, n = 64;
    double log2q = 9.92;
    std::string model = "both";
  } ec;
  e_cost->add_option("--beta", ec.beta);
  e_cost->add_option("--n", ec.n);
  e_cost->add_option("--log2q", ec.log2q);
  e_cost->add_option("--model", ec.model, "chengu|ablr21|both");

  auto* e_mitm = est->add_subcommand("mitm-prob", "guessing-region hit probability");
  struct {
    int n = 1024, zeta = 920, h = 8, hp = 6, trials = 10000;
    std::string mode = "exact";
  } em;
  e_mitm->add_option("--n", em.n);
  e_mitm->add_option("--zeta", em.zeta);
  e_mitm->add_option("--hw", em.h);
  e_mitm->add_option("--h-prime", em.hp);
  e_mitm->add_option("--mode", em.mode, "exact|mc");
  e_mitm->add_option("--trials", em.trials);

  auto* e_cruel = est->add_subcommand("cruel-prob", "cruel-bit count probability");
  struct {
    int n = 256, k = 2, num_cruel = 388, h = 9, x = 3, trials = 10000;
    u64 seed = 1;
  } ecr;
  e_cruel->add_option("--n", ecr.n);
  e_cruel->add_option("--k", ecr.k);
  e_cruel->add_option("--num-cruel", ecr.num_cruel);
  e_cruel->add_option("--hw", ecr.h);
  e_cruel->add_option("--x", ecr.x);
  e_cruel->add_option("--trials", ecr.trials);
  e_cruel->add_option("--seed", ecr.seed);

  auto* e_ih = est->add_subcommand("irwin-hall", "modular-sum distribution check");
  struct {
    int terms = 3, samples = 1000000;
    i64 q = 3329;
  } ei;
  e_ih->add_option("--terms", ei.terms);
  e_ih->add_option("--q", ei.q);
  e_ih->add_option("--samples", ei.samples);

  auto* e_sieve = est->add_subcommand("sieve-mem", "sieving database memory");
  struct {
    int n = 128;
  } es;
  e_sieve->add_option("--n", es.n);
  for (auto* sub : {e_cost, e_mitm, e_cruel, e_ih, e_sieve})
    sub->add_flag("--json", est_json, "emit machine-readable records");

  // ---- run / report ----
  auto* run = app.add_subcommand("run", "run an experiment config");
  struct {
    std::string config, results = "results.jsonl";
    i64 seed = -1;
    int workers = 0, trials = 0;
  } rr;
  run->add_option("--config", rr.config)->required();
  run->add_option("--results", rr.results);
  run->add_option("--seed", rr.seed, "override the config seed");
  run->add_option("--workers", rr.workers, "override worker count");
  run->add_option("--trials-per-h", rr.trials, "override trials per h");

  auto* rep = app.add_subcommand("report", "aggregate results into a leaderboard");
  struct {
    std::string in = "results.jsonl", json_out;
  } rp;
  rep->add_option("--in", rp.in);
  rep->add_option("--json-out", rp.json_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto p = params_from_flags(g.n, g.k, g.q, g.variant, g.secret_dist, g.eta, g.secret_sigma,
                                 g.error_dist, g.sigma_e);
      if (g.h >= 0) p.secret.fixed_h = g.h;
      rng::GeneratorSpec spec;
      spec.kind = g.gen_kind == "lcg" ? rng::Kind::lcg : rng::Kind::cryptographic;
      spec.seed = g.seed;
      spec.lcg = {g.lcg_a, g.lcg_c, g.lcg_m};
      rng::Generator rg(spec);
      auto secret = sampling::sample_secret(p.secret, rg);
      int num = g.num > 0 ? g.num : 4 * p.n;
      auto s = sampling::gen_samples(p, num, secret, rg);
      sampling::save_samples(s, g.out);
      std::cout << "wrote " << num << " samples to " << g.out << "\n";
    } else if (*prep) {
      auto s = sampling::load_samples(pr.in);
      preprocess::BuildOptions b;
      b.m = pr.m;
      b.omega = pr.omega;
      b.beta = pr.beta;
      b.bkz_loops = pr.loops;
      b.num_matrices = pr.num_matrices;
      b.target_count = pr.target;
      b.target_rho = pr.target_rho;
      b.seed = pr.seed;
      b.workers = env_workers();
      auto ds = preprocess::build_reduced_dataset(s, b);
      preprocess::save_dataset(ds, pr.out);
      std::cout << "rows=" << ds.ra.rows << " rho=" << ds.rho << " cruel=" << ds.num_cruel
                << (ds.partial ? " (partial)" : "") << " -> " << pr.out << "\n";
    } else if (*a_usvp) {
      auto s = sampling::load_samples(au.in);
      const int keep = std::max(32, static_cast<int>(s.A.rows) / 8);
      usvp::UsvpOptions uo;
      uo.omega = au.omega;
      uo.beta_max = au.beta_max;
      uo.loop_budget = au.loop_budget;
      uo.max_seconds = au.max_seconds;
      int m = au.m;
      auto head = harness::head_rows(s, s.A.rows - keep);
      auto tail = harness::tail_rows(s, keep);
      auto out = usvp::usvp_attack(head, m, uo, tail);
      for (size_t i = 0; i < out.loop_seconds.size(); i++)
        std::cout << "loop " << i + 1 << ": " << out.loop_seconds[i] << " s\n";
      if (out.secret) {
        std::cout << "recovered secret in " << out.loops << " loops, " << out.seconds << " s\n";
        for (i64 v : *out.secret) std::cout << v << ' ';
        std::cout << "\n";
      } else {
        std::cout << "not found (loops=" << out.loops << ", " << out.seconds << " s)\n";
        return 0;
      }
    } else if (*a_cc) {
      auto ds = preprocess::load_dataset(ac.ds);
      auto s = sampling::load_samples(ac.samples);
      if (!ds.transform.empty()) preprocess::reapply_b(ds, s);
      const int keep = std::max(32, static_cast<int>(s.A.rows) / 8);
      auto tail = harness::tail_rows(s, keep);
      cc::AttackOptions opt;
      opt.bf.h_limit = ac.h_limit;
      opt.bf.gamma = ac.gamma;
      // alphabets follow the declared secret distribution
      auto nz = harness::nonzero_alphabet(s.params.secret);
      auto full = harness::full_alphabet(s.params.secret);
      {
        auto cands = cc::brute_force_cruel(ds, opt.bf, nz);
        size_t show = std::min<size_t>(cands.size(), 8);
        for (size_t i = 0; i < show; i++) {
          std::cout << "candidate " << i << " score=" << cands[i].score << " support=[";
          for (size_t j = 0; j < cands[i].support.size(); j++)
            std::cout << (j ? "," : "") << cands[i].support[j];
          std::cout << "]\n";
        }
      }
      auto out = cc::attack(ds, tail, opt, nz, full);
      if (out.secret) {
        std::cout << "recovered secret (candidates tried: " << out.candidates_tried << ")\n";
        for (i64 v : *out.secret) std::cout << v << ' ';
        std::cout << "\n";
      } else {
        std::cout << "no verified candidate (tried " << out.candidates_tried << ")\n";
      }
    } else if (*a_mitm) {
      auto s = sampling::load_samples(am.in);
      const int nk = s.params.dim();
      const int zeta = am.zeta > 0 ? am.zeta : nk / 2;
      Mat A1(s.A.rows, nk - zeta), A2(s.A.rows, zeta);
      for (int r = 0; r < s.A.rows; r++) {
        for (int c = 0; c < nk - zeta; c++) A1.at(r, c) = s.A.at(r, c);
        for (int c = 0; c < zeta; c++) A2.at(r, c) = s.A.at(r, nk - zeta + c);
      }
      mitm::DualOptions dopt;
      dopt.tau = am.tau;
      dopt.c = am.c;
      dopt.beta = am.beta;
      dopt.workers = env_workers();
      auto vecs = mitm::scaled_dual_short_vectors(A1, s.params.q, nk, dopt);
      auto derived = mitm::derive_samples_and_bound(vecs, A2, s.b, s.params.sigma_e, am.c,
                                                    s.params.q, nk);
      std::cout << "B=" << derived.bound << " (B/q=" << derived.bound / s.params.q << ")\n";
      mitm::MitmParams mp;
      mp.zeta = zeta;
      mp.tau = am.tau;
      mp.c = am.c;
      mp.alphabet = harness::nonzero_alphabet(s.params.secret);
      mp.q = s.params.q;
      mp.h_limit = am.h_limit;
      mp.mem_cap_bytes = am.mem_cap;
      auto dec = mitm::mitm_decide(derived.a, derived.b, derived.bound, mp);
      std::cout << (dec.is_lwe ? "decision: LWE" : "decision: not LWE") << " (entries "
                << dec.table_entries << ", pairs " << dec.pairs_tested << ")\n";
    } else if (*dist) {
      auto ds = preprocess::load_dataset(dd.ds);
      auto s = sampling::load_samples(dd.samples);
      if (!ds.transform.empty()) preprocess::reapply_b(ds, s);
      std::unique_ptr<distinguish::PredictorOracle> oracle;
      if (dd.oracle == "cmd") {
        oracle = std::make_unique<distinguish::StreamOracle>(dd.cmd);
      } else if (!s.secret) {
        throw std::runtime_error("synthetic oracle needs the secret sidecar");
      } else if (dd.oracle == "exact") {
        oracle = std::make_unique<distinguish::ExactOracle>(*s.secret, s.params.q);
      } else {
        oracle = std::make_unique<distinguish::NoisyOracle>(*s.secret, s.params.q, dd.sigma,
                                                            dd.seed);
      }
      auto per = distinguish::recover_secret(*oracle, s.params.q, s.params.dim(), dd.delta,
                                             dd.probes, ds.ra);
      std::cout << "recovered coordinates:\n";
      for (const auto& r : per) std::cout << (r.known ? std::to_string(r.value) : "?") << ' ';
      std::cout << "\n";
    } else if (*e_cost) {
      auto print = [&](const estimate::CostReport& r) {
        if (est_json) {
          nlohmann::json j = {{"model", r.model},
                              {"beta", r.beta},
                              {"lattice_dim", r.lattice_dim},
                              {"log2_cycles", r.log2_cycles},
                              {"hours_at_2_1ghz", r.hours_at_2_1ghz}};
          std::cout << j.dump() << "\n";
        } else {
          std::printf("%-7s beta=%-3d d=%-5d log2cycles=%.2f hours=%.6g\n", r.model.c_str(),
                      r.beta, r.lattice_dim, r.log2_cycles, r.hours_at_2_1ghz);
        }
      };
      if (ec.model != "ablr21") print(estimate::chengu_cost(ec.beta, ec.n, ec.log2q));
      if (ec.model != "chengu") print(estimate::ablr21_cost(ec.beta, ec.n, ec.log2q));
    } else if (*e_mitm) {
      auto mode = em.mode == "mc" ? estimate::ProbMode::monte_carlo : estimate::ProbMode::exact;
      double p = estimate::mitm_hit_prob(em.n, em.zeta, em.h, em.hp, mode, em.trials);
      if (est_json) {
        nlohmann::json j = {{"n", em.n}, {"zeta", em.zeta}, {"h", em.h},
                            {"h_prime", em.hp}, {"mode", em.mode}, {"p", p}};
        std::cout << j.dump() << "\n";
      } else {
        std::printf("P(<= %d of %d in zeta=%d window of %d) = %.4f\n", em.hp, em.h, em.zeta,
                    em.n, p);
      }
    } else if (*e_cruel) {
      double p =
          estimate::cruel_bit_prob(ecr.n, ecr.k, ecr.num_cruel, ecr.h, ecr.x, ecr.trials,
                                   ecr.seed);
      if (est_json) {
        nlohmann::json j = {{"n", ecr.n},     {"k", ecr.k}, {"num_cruel", ecr.num_cruel},
                            {"h", ecr.h},     {"x", ecr.x}, {"trials", ecr.trials},
                            {"p", p}};
        std::cout << j.dump() << "\n";
      } else {
        std::printf("P(h* <= %d | h=%d, window %d/%d x k=%d) = %.4f\n", ecr.x, ecr.h,
                    ecr.num_cruel / ecr.k, ecr.n, ecr.k, p);
      }
    } else if (*e_ih) {
      auto rep = estimate::irwin_hall_check(ei.terms, ei.q, ei.samples);
      if (est_json) {
        nlohmann::json j = {{"terms", ei.terms},
                            {"q", ei.q},
                            {"p_between_q_2q_empirical", rep.p_between_q_2q_empirical},
                            {"p_between_q_2q_exact", rep.p_between_q_2q_exact},
                            {"max_deviation", rep.max_deviation}};
        std::cout << j.dump() << "\n";
      } else {
        std::printf("P(sum in [q,2q]): empirical %.4f exact %.4f; max bin deviation %.5f\n",
                    rep.p_between_q_2q_empirical, rep.p_between_q_2q_exact, rep.max_deviation);
      }
    } else if (*e_sieve) {
      auto m = estimate::sieving_memory_estimate(es.n);
      if (est_json) {
        nlohmann::json j = {{"n", es.n},
                            {"sieve_dim", m.sieve_dim},
                            {"log2_db_vectors", std::log2(m.db_vectors)},
                            {"bytes", m.bytes}};
        std::cout << j.dump() << "\n";
      } else {
        std::printf("n=%d sieve_dim=%d db_vectors=2^%.1f memory=%.3g GB\n", es.n, m.sieve_dim,
                    std::log2(m.db_vectors), m.bytes / 1e9);
      }
    } else if (*run) {
      auto cfg = harness::config_from_json_file(rr.config);
      // precedence: CLI flag > config file > default
      if (rr.seed >= 0) cfg.seed = static_cast<u64>(rr.seed);
      if (rr.trials > 0) cfg.trials_per_h = rr.trials;
      if (rr.workers > 0)
        cfg.workers = rr.workers;
      else if (cfg.workers <= 1)
        cfg.workers = env_workers();
      auto results = harness::run_experiment(cfg, rr.results);
      int rec = 0;
      for (const auto& r : results)
        if (r.outcome == harness::Outcome::recovered || r.outcome == harness::Outcome::decided)
          rec++;
      std::cout << rec << "/" << results.size() << " trials succeeded; records appended to "
                << rr.results << "\n";
    } else if (*rep) {
      auto tables = harness::report(rp.in);
      std::cout << tables.text;
      if (tables.skipped_records)
        std::cerr << "skipped " << tables.skipped_records << " corrupt records\n";
      if (!rp.json_out.empty()) {
        std::ofstream jf(rp.json_out);
        jf << tables.json << "\n";
      }
    }
  } catch (const mitm::MemoryCapExceeded& e) {
    std::cerr << "refused: estimated table memory " << e.estimate_bytes / 1e9
              << " GB exceeds the configured cap\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
