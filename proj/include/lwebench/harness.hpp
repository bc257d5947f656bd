#pragma once

#include "lwebench/cc.hpp"
#include "lwebench/distinguish.hpp"
#include "lwebench/mitm.hpp"
#include "lwebench/preprocess.hpp"
#include "lwebench/usvp.hpp"

namespace lwebench::harness {

enum class Attack { usvp, cc, mitm, distinguish };

std::string attack_name(Attack a);
Attack attack_from_name(const std::string& s);

struct ExperimentConfig {
  sampling::LweParams params;
  Attack attack = Attack::cc;
  std::vector<int> h_list;
  int trials_per_h = 10;
  u64 seed = 1;
  double time_cap_seconds = 3600.0;
  u64 mem_cap_bytes = 8ull << 30;
  int workers = 1;
  rng::GeneratorSpec gen;  // generator for the A side; seed comes from `seed`

  // preprocessing (cc / distinguish)
  preprocess::BuildOptions build;
  // cc
  cc::AttackOptions cc_opt;
  // usvp
  usvp::UsvpOptions usvp_opt;
  int usvp_m = 0;  // 0 -> 0.875 n k
  // mitm
  int mitm_zeta = 0;
  int mitm_tau = 8;
  double mitm_c = 10.0;
  int mitm_h_limit = 4;
  int mitm_beta = 20;
  // distinguish
  i64 dist_delta = 16;
  int dist_probes = 128;
  double dist_oracle_sigma = 3.0;

  int num_samples = 0;    // 0 -> 4 n (plus verify margin)
  int verify_samples = 64;

  void validate() const;
};

ExperimentConfig config_from_json_file(const std::string& path);

enum class Outcome { recovered, decided, failed, timeout };

std::string outcome_name(Outcome o);

struct AttackResult {
  std::string attack;
  std::string setting;  // compact params descriptor
  int h = 0;
  int trial = 0;
  Outcome outcome = Outcome::failed;
  double preprocess_hours = 0.0;
  double recover_hours = 0.0;
  double peak_memory_bytes = 0.0;
  std::string secret_fingerprint;
  bool fingerprint_match = false;

  std::string to_json_line() const;
};

// Deterministic given (config, seed): same secrets, same outcomes. Results are
// appended to results_path (JSONL) as they complete when a path is given.
std::vector<AttackResult> run_experiment(const ExperimentConfig& cfg,
                                         const std::string& results_path = "");

// Aggregated leaderboard: per (setting, attack) the best recovered h, per-h
// success rates, and best time. Pure fold over the records; byte-stable.
struct ReportTables {
  std::string text;
  std::string json;
  int skipped_records = 0;
};

ReportTables report(const std::string& results_path);

std::string fingerprint(const std::vector<i64>& secret);

// Row-window views and alphabet helpers shared by the CLI and the runner.
sampling::SampleSet head_rows(const sampling::SampleSet& s, int rows);
sampling::SampleSet tail_rows(const sampling::SampleSet& s, int rows);
std::vector<i64> nonzero_alphabet(const sampling::SecretSpec& s);
std::vector<i64> full_alphabet(const sampling::SecretSpec& s);

}  // namespace lwebench::harness
