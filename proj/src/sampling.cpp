#include "lwebench/sampling.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lwebench::sampling {

using core::centered_mod;
using core::centered_mod_i128;
using nlohmann::json;

std::string dist_name(Dist d) {
  switch (d) {
    case Dist::binary: return "binary";
    case Dist::ternary: return "ternary";
    case Dist::binomial: return "binomial";
    case Dist::gaussian: return "gaussian";
    case Dist::uniform: return "uniform";
  }
  return "?";
}

Dist dist_from_name(const std::string& s) {
  if (s == "binary") return Dist::binary;
  if (s == "ternary") return Dist::ternary;
  if (s == "binomial") return Dist::binomial;
  if (s == "gaussian") return Dist::gaussian;
  if (s == "uniform") return Dist::uniform;
  throw std::invalid_argument("unknown distribution: " + s);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::ring: return "ring";
    case Variant::module: return "module";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  if (s == "plain") return Variant::plain;
  if (s == "ring") return Variant::ring;
  if (s == "module") return Variant::module;
  throw std::invalid_argument("unknown variant: " + s);
}

void LweParams::validate() const {
  if (n < 1 || k < 1 || q < 2) throw std::invalid_argument("LweParams: bad n/k/q");
  if (variant == Variant::ring && (!core::is_power_of_two(n) || k != 1))
    throw std::invalid_argument("LweParams: ring requires power-of-two n, k=1");
  if (variant == Variant::module && (!core::is_power_of_two(n) || k < 2))
    throw std::invalid_argument("LweParams: module requires power-of-two n, k>=2");
  if (variant == Variant::plain && k != 1)
    throw std::invalid_argument("LweParams: plain requires k=1");
}

namespace {

i64 draw_value(Dist dist, int eta, double sigma, i64 q, rng::Generator& gen) {
  switch (dist) {
    case Dist::binary:
      return static_cast<i64>(gen.uniform_below(2));
    case Dist::ternary:
      return static_cast<i64>(gen.uniform_below(3)) - 1;
    case Dist::binomial: {
      i64 v = 0;
      for (int i = 0; i < eta; i++)
        v += static_cast<i64>(gen.uniform_below(2)) - static_cast<i64>(gen.uniform_below(2));
      return v;
    }
    case Dist::gaussian:
      return static_cast<i64>(std::llround(gen.gaussian(sigma)));
    case Dist::uniform:
      return gen.uniform_mod(q);
  }
  return 0;
}

i64 draw_nonzero(Dist dist, int eta, double sigma, i64 q, rng::Generator& gen) {
  for (;;) {
    i64 v = dist == Dist::binary ? 1 : draw_value(dist, eta, sigma, q, gen);
    if (v != 0) return v;
  }
}

}  // namespace

std::vector<i64> sample_secret(const SecretSpec& spec, rng::Generator& gen) {
  if (spec.length < 1) throw std::invalid_argument("sample_secret: empty spec");
  std::vector<i64> s(spec.length, 0);
  if (spec.fixed_h) {
    int h = *spec.fixed_h;
    if (h < 0 || h > spec.length) throw std::invalid_argument("sample_secret: h out of range");
    // uniform positions via partial Fisher-Yates
    std::vector<int> idx(spec.length);
    for (int i = 0; i < spec.length; i++) idx[i] = i;
    for (int i = 0; i < h; i++) {
      int j = i + static_cast<int>(gen.uniform_below(spec.length - i));
      std::swap(idx[i], idx[j]);
      s[idx[i]] = draw_nonzero(spec.dist, spec.eta, spec.sigma, 0x7fffffff, gen);
    }
    return s;
  }
  for (auto& v : s) v = draw_value(spec.dist, spec.eta, spec.sigma, 0x7fffffff, gen);
  return s;
}

std::vector<i64> sample_error_vec(Dist dist, int eta, double sigma, int len, i64 q,
                                  rng::Generator& gen) {
  std::vector<i64> e(len);
  for (auto& v : e) v = sigma == 0.0 && dist == Dist::gaussian
                            ? 0
                            : draw_value(dist, eta, sigma, q, gen);
  return e;
}

double secret_entry_std(const SecretSpec& spec) {
  double base_var = 0, base_mean = 0;
  switch (spec.dist) {
    case Dist::binary: base_mean = 0.5; base_var = 0.25; break;
    case Dist::ternary: base_var = 2.0 / 3.0; break;
    case Dist::binomial: base_var = spec.eta / 2.0; break;
    case Dist::gaussian: base_var = spec.sigma * spec.sigma; break;
    case Dist::uniform: throw std::invalid_argument("secret_entry_std: uniform secret");
  }
  if (!spec.fixed_h) return std::sqrt(base_var + base_mean * base_mean);
  // fixed h: fraction h/len of entries drawn from the conditional nonzero law
  double frac = static_cast<double>(*spec.fixed_h) / spec.length;
  double nz_second_moment;
  switch (spec.dist) {
    case Dist::binary: nz_second_moment = 1.0; break;
    case Dist::ternary: nz_second_moment = 1.0; break;
    case Dist::binomial: {
      // E[v^2 | v != 0] for centered binomial(eta)
      double p0 = 0, m2 = 0;
      int n2 = 2 * spec.eta;
      double tot = std::pow(2.0, n2);
      for (i64 v = -spec.eta; v <= spec.eta; v++) {
        double ways = 0;
        for (int a = 0; a <= spec.eta; a++) {
          int b = a - static_cast<int>(v);
          if (b < 0 || b > spec.eta) continue;
          double ca = 1, cb = 1;
          for (int t = 0; t < a; t++) ca = ca * (spec.eta - t) / (t + 1);
          for (int t = 0; t < b; t++) cb = cb * (spec.eta - t) / (t + 1);
          ways += ca * cb;
        }
        if (v == 0) p0 = ways / tot;
        m2 += static_cast<double>(v) * v * ways / tot;
      }
      nz_second_moment = m2 / (1 - p0);
      break;
    }
    case Dist::gaussian: {
      // rounded N(0, sigma) conditioned on != 0; Monte-Carlo-free approx via
      // truncated series over integers
      double num = 0, den = 0;
      for (int v = 1; v < 100; v++) {
        double p = 0.5 * (std::erf((v + 0.5) / (spec.sigma * std::sqrt(2.0))) -
                          std::erf((v - 0.5) / (spec.sigma * std::sqrt(2.0))));
        num += 2 * p * v * v;
        den += 2 * p;
      }
      nz_second_moment = num / den;
      break;
    }
    default: nz_second_moment = 1.0;
  }
  return std::sqrt(frac * nz_second_moment);
}

double error_std(Dist dist, int eta, double sigma) {
  switch (dist) {
    case Dist::binary: return 0.5;
    case Dist::ternary: return std::sqrt(2.0 / 3.0);
    case Dist::binomial: return std::sqrt(eta / 2.0);
    case Dist::gaussian: return sigma;
    default: throw std::invalid_argument("error_std: unsupported error distribution");
  }
}

SampleSet gen_samples(const LweParams& params, int num, const std::vector<i64>& secret,
                      rng::Generator& gen) {
  params.validate();
  const int nk = params.dim();
  if (static_cast<int>(secret.size()) != nk)
    throw std::invalid_argument("gen_samples: secret length mismatch");
  const i64 q = params.q;
  SampleSet out;
  out.params = params;
  out.secret = secret;
  if (num < 1) throw std::invalid_argument("gen_samples: num < 1");

  if (params.variant == Variant::plain) {
    out.A = rng::uniform_matrix(num, nk, q, gen);
    out.b.resize(num);
    for (int r = 0; r < num; r++) {
      i128 acc = dot(out.A.row(r), secret.data(), nk);
      i64 e = draw_value(params.error, params.error_eta, params.sigma_e, q, gen);
      out.b[r] = mod_pos(acc + e, q);
    }
    return out;
  }

  // ring / module: one embedded row per polynomial sample. Row j of the
  // skew-circulant expansion pairs <coeffs(x^j * rev(a)), s> with b_j; we emit
  // the j=0 row and keep the reversed b polynomial for later rotations.
  const int n = params.n, k = params.k;
  out.A = Mat(num, nk);
  out.b.resize(num);
  out.bhat = Mat(num, n);
  std::vector<core::NegacyclicPoly> spolys;
  for (int i = 0; i < k; i++)
    spolys.emplace_back(std::vector<i64>(secret.begin() + i * n, secret.begin() + (i + 1) * n),
                        q);
  for (int r = 0; r < num; r++) {
    std::vector<i64> bacc(n, 0);
    for (int i = 0; i < k; i++) {
      std::vector<i64> ac(n);
      for (int j = 0; j < n; j++) ac[j] = gen.uniform_mod(q);
      core::NegacyclicPoly ap(ac, q);
      auto prod = core::negacyclic_mul(ap, spolys[i]);
      for (int j = 0; j < n; j++) bacc[j] = mod_pos(static_cast<i128>(bacc[j]) + prod.c[j], q);
      auto arev = core::reverse_poly(ac, q);
      for (int j = 0; j < n; j++) out.A.at(r, i * n + j) = arev[j];
    }
    auto evec = sample_error_vec(params.error, params.error_eta, params.sigma_e, n, q, gen);
    for (int j = 0; j < n; j++) bacc[j] = mod_pos(static_cast<i128>(bacc[j]) + evec[j], q);
    out.b[r] = bacc[0];
    auto brev = core::reverse_poly(bacc, q);
    for (int j = 0; j < n; j++) out.bhat->at(r, j) = brev[j];
  }
  return out;
}

bool residuals_within(const SampleSet& s, const std::vector<i64>& secret, double bound) {
  const int nk = s.A.cols;
  for (int r = 0; r < s.A.rows; r++) {
    i128 acc = dot(s.A.row(r), secret.data(), nk);
    i64 res = centered_mod_i128(static_cast<i128>(s.b[r]) - acc, s.params.q);
    if (std::llabs(res) > bound) return false;
  }
  return true;
}

namespace {

json params_to_json(const LweParams& p) {
  json j;
  j["n"] = p.n;
  j["k"] = p.k;
  j["q"] = p.q;
  j["variant"] = variant_name(p.variant);
  j["secret"] = {{"dist", dist_name(p.secret.dist)},
                 {"eta", p.secret.eta},
                 {"sigma", p.secret.sigma},
                 {"length", p.secret.length}};
  if (p.secret.fixed_h) j["secret"]["h"] = *p.secret.fixed_h;
  j["error"] = dist_name(p.error);
  j["error_eta"] = p.error_eta;
  j["sigma_e"] = p.sigma_e;
  return j;
}

LweParams params_from_json(const json& j) {
  LweParams p;
  p.n = j.at("n");
  p.k = j.at("k");
  p.q = j.at("q");
  p.variant = variant_from_name(j.at("variant"));
  p.secret.dist = dist_from_name(j.at("secret").at("dist"));
  p.secret.eta = j.at("secret").at("eta");
  p.secret.sigma = j.at("secret").at("sigma");
  p.secret.length = j.at("secret").at("length");
  if (j.at("secret").contains("h")) p.secret.fixed_h = j.at("secret").at("h").get<int>();
  p.error = dist_from_name(j.at("error"));
  p.error_eta = j.at("error_eta");
  p.sigma_e = j.at("sigma_e");
  return p;
}

}  // namespace

void save_samples(const SampleSet& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  json hdr = {{"type", "samples"}, {"params", params_to_json(s.params)}, {"rows", s.A.rows}};
  hdr["has_bhat"] = s.bhat.has_value();
  f << hdr.dump() << "\n";
  for (int r = 0; r < s.A.rows; r++) {
    for (int c = 0; c < s.A.cols; c++) f << s.A.at(r, c) << ' ';
    f << s.b[r] << "\n";
  }
  if (s.bhat) {
    for (int r = 0; r < s.bhat->rows; r++) {
      for (int c = 0; c < s.bhat->cols; c++)
        f << s.bhat->at(r, c) << (c + 1 == s.bhat->cols ? '\n' : ' ');
    }
  }
  if (s.secret) {
    std::ofstream fs(path + ".secret");
    json sh = {{"type", "secret"}, {"length", s.secret->size()}};
    fs << sh.dump() << "\n";
    for (size_t i = 0; i < s.secret->size(); i++)
      fs << (*s.secret)[i] << (i + 1 == s.secret->size() ? '\n' : ' ');
  }
}

SampleSet load_samples(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(f, line);
  json hdr = json::parse(line);
  SampleSet s;
  s.params = params_from_json(hdr.at("params"));
  int rows = hdr.at("rows");
  const int nk = s.params.dim();
  s.A = Mat(rows, nk);
  s.b.resize(rows);
  for (int r = 0; r < rows; r++) {
    for (int c = 0; c < nk; c++) f >> s.A.at(r, c);
    f >> s.b[r];
  }
  if (hdr.value("has_bhat", false)) {
    Mat bh(rows, s.params.n);
    for (int r = 0; r < rows; r++)
      for (int c = 0; c < s.params.n; c++) f >> bh.at(r, c);
    s.bhat = std::move(bh);
  }
  std::ifstream fs(path + ".secret");
  if (fs) {
    std::getline(fs, line);
    std::vector<i64> sec(nk);
    for (int i = 0; i < nk; i++) fs >> sec[i];
    s.secret = std::move(sec);
  }
  return s;
}

}  // namespace lwebench::sampling
