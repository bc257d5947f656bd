#include "lwebench/distinguish.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "lwebench/core.hpp"
#include "lwebench/rng.hpp"

namespace lwebench::distinguish {

using core::centered_mod;

i64 ExactOracle::predict(const std::vector<i64>& a) const {
  return mod_pos(dot(a.data(), s_.data(), static_cast<int>(s_.size())), q_);
}

i64 NoisyOracle::predict(const std::vector<i64>& a) const {
  u64 h = 1469598103934665603ull ^ seed_;
  for (i64 v : a) {
    h ^= static_cast<u64>(v);
    h *= 1099511628211ull;
  }
  rng::Generator g({rng::Kind::cryptographic, h});
  i64 noise = static_cast<i64>(std::llround(g.gaussian(sigma_)));
  return mod_pos(dot(a.data(), s_.data(), static_cast<int>(s_.size())) + noise, q_);
}

struct StreamOracle::Impl {
  FILE* to_child = nullptr;
  FILE* from_child = nullptr;
  pid_t pid = -1;
};

StreamOracle::StreamOracle(const std::string& command) : impl_(new Impl) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw std::runtime_error("StreamOracle: pipe failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("StreamOracle: fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  impl_->pid = pid;
  impl_->to_child = fdopen(in_pipe[1], "w");
  impl_->from_child = fdopen(out_pipe[0], "r");
  if (!impl_->to_child || !impl_->from_child)
    throw std::runtime_error("StreamOracle: fdopen failed");
}

StreamOracle::~StreamOracle() {
  if (impl_->to_child) fclose(impl_->to_child);
  if (impl_->from_child) fclose(impl_->from_child);
  if (impl_->pid > 0) {
    int status = 0;
    waitpid(impl_->pid, &status, 0);
  }
}

i64 StreamOracle::predict(const std::vector<i64>& a) const {
  std::ostringstream line;
  for (size_t i = 0; i < a.size(); i++) line << (i ? " " : "") << a[i];
  line << "\n";
  auto s = line.str();
  if (fputs(s.c_str(), impl_->to_child) == EOF || fflush(impl_->to_child) != 0)
    throw std::runtime_error("StreamOracle: write failed");
  char buf[256];
  if (!fgets(buf, sizeof buf, impl_->from_child))
    throw std::runtime_error("StreamOracle: oracle closed the stream");
  return std::strtoll(buf, nullptr, 10);
}

SlopeResult slope_distinguish(const PredictorOracle& oracle, i64 q, int i, i64 delta,
                              int num_probes, const Mat& base_points, double mode_threshold) {
  if (delta < 1) throw std::invalid_argument("slope_distinguish: delta must be >= 1");
  if (base_points.rows < 1) throw std::invalid_argument("slope_distinguish: no base points");
  std::map<i64, int> votes;
  for (int p = 0; p < num_probes; p++) {
    const int r = p % base_points.rows;
    std::vector<i64> a(base_points.row(r), base_points.row(r) + base_points.cols);
    i64 f0 = oracle.predict(a);
    a[i] = mod_pos(static_cast<i128>(a[i]) + delta, q);
    i64 f1 = oracle.predict(a);
    double slope = static_cast<double>(centered_mod(f1 - f0, q)) / static_cast<double>(delta);
    votes[static_cast<i64>(std::llround(slope))]++;
  }
  SlopeResult res;
  for (const auto& [v, c] : votes)
    if (c > res.mode_count) {
      res.mode_count = c;
      res.value = v;
    }
  res.known = res.mode_count >= std::max(2, static_cast<int>(mode_threshold * num_probes));
  return res;
}

Activity binary_distinguish(const PredictorOracle& oracle, i64 q, int i, int num_probes,
                            const Mat& base_points) {
  const i64 big_delta = q / 4;
  std::vector<double> diffs;
  diffs.reserve(num_probes);
  for (int p = 0; p < num_probes; p++) {
    const int r = p % base_points.rows;
    std::vector<i64> a(base_points.row(r), base_points.row(r) + base_points.cols);
    i64 f0 = oracle.predict(a);
    a[i] = mod_pos(static_cast<i128>(a[i]) + big_delta, q);
    i64 f1 = oracle.predict(a);
    diffs.push_back(std::fabs(static_cast<double>(centered_mod(f1 - f0, q))));
  }
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
  double median = diffs[diffs.size() / 2];
  return median > static_cast<double>(q) / 8.0 ? Activity::active : Activity::inactive;
}

std::vector<SlopeResult> recover_secret(const PredictorOracle& oracle, i64 q, int dim,
                                        i64 delta, int num_probes, const Mat& base_points) {
  std::vector<SlopeResult> out(dim);
  for (int i = 0; i < dim; i++)
    out[i] = slope_distinguish(oracle, q, i, delta, num_probes, base_points);
  return out;
}

}  // namespace lwebench::distinguish
