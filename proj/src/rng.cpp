#include "lwebench/rng.hpp"

#include <cmath>
#include <cstring>

namespace lwebench::rng {

namespace {

inline u64 splitmix64(u64& x) {
  x += 0x9E3779B97F4A7C15ull;
  u64 z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint32_t rotl32(uint32_t x, int k) { return (x << k) | (x >> (32 - k)); }

void chacha_block(const uint32_t in[16], uint32_t out[16]) {
  uint32_t x[16];
  std::memcpy(x, in, sizeof(x));
  auto qr = [&](int a, int b, int c, int d) {
    x[a] += x[b]; x[d] ^= x[a]; x[d] = rotl32(x[d], 16);
    x[c] += x[d]; x[b] ^= x[c]; x[b] = rotl32(x[b], 12);
    x[a] += x[b]; x[d] ^= x[a]; x[d] = rotl32(x[d], 8);
    x[c] += x[d]; x[b] ^= x[c]; x[b] = rotl32(x[b], 7);
  };
  for (int i = 0; i < 10; i++) {
    qr(0, 4, 8, 12); qr(1, 5, 9, 13); qr(2, 6, 10, 14); qr(3, 7, 11, 15);
    qr(0, 5, 10, 15); qr(1, 6, 11, 12); qr(2, 7, 8, 13); qr(3, 4, 9, 14);
  }
  for (int i = 0; i < 16; i++) out[i] = x[i] + in[i];
}

}  // namespace

Generator::Generator(const GeneratorSpec& spec) : spec_(spec) {
  if (spec.kind == Kind::lcg) {
    const auto& p = spec.lcg;
    if (!(p.m > p.a && p.a >= 1 && p.m > p.c))
      throw std::invalid_argument("Generator: invalid lcg parameters");
    lcg_x_ = spec.seed % p.m;
  } else {
    u64 s = spec.seed;
    for (auto& k : key_) k = splitmix64(s);
  }
}

void Generator::refill() {
  uint32_t in[16] = {0x61707865u, 0x3320646eu, 0x79622d32u, 0x6b206574u};
  // 256-bit key from the first four mixed words, counter + nonce from the rest
  in[4] = static_cast<uint32_t>(key_[0]);
  in[5] = static_cast<uint32_t>(key_[0] >> 32);
  in[6] = static_cast<uint32_t>(key_[1]);
  in[7] = static_cast<uint32_t>(key_[1] >> 32);
  in[8] = static_cast<uint32_t>(key_[2]);
  in[9] = static_cast<uint32_t>(key_[2] >> 32);
  in[10] = static_cast<uint32_t>(key_[3]);
  in[11] = static_cast<uint32_t>(key_[3] >> 32);
  in[12] = static_cast<uint32_t>(counter_);
  in[13] = static_cast<uint32_t>(counter_ >> 32);
  in[14] = static_cast<uint32_t>(key_[4]);
  in[15] = static_cast<uint32_t>(key_[5]);
  counter_++;
  uint32_t out[16];
  chacha_block(in, out);
  for (int i = 0; i < 8; i++)
    buf_[i] = (static_cast<u64>(out[2 * i + 1]) << 32) | out[2 * i];
  buf_pos_ = 0;
}

u64 Generator::next_raw() {
  if (spec_.kind == Kind::lcg) {
    const auto& p = spec_.lcg;
    lcg_x_ = static_cast<u64>((static_cast<unsigned __int128>(lcg_x_) * p.a + p.c) % p.m);
    return lcg_x_;
  }
  if (buf_pos_ >= 8) refill();
  return buf_[buf_pos_++];
}

u64 Generator::uniform_below(u64 bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: zero bound");
  u64 limit = ~0ull - (~0ull % bound) - 1;  // last accepted value
  for (;;) {
    u64 r = next_raw();
    if (r <= limit || limit == ~0ull) return r % bound;
  }
}

i64 Generator::uniform_mod(i64 q) {
  if (q < 2) throw std::invalid_argument("uniform_mod: invalid modulus");
  if (spec_.kind == Kind::lcg) return static_cast<i64>(next_raw() % static_cast<u64>(q));
  return static_cast<i64>(uniform_below(static_cast<u64>(q)));
}

double Generator::uniform_real() {
  return static_cast<double>(next_raw() >> 11) * (1.0 / 9007199254740992.0);
}

double Generator::gaussian(double sigma) {
  if (gauss_spare_) {
    double v = *gauss_spare_ * sigma;
    gauss_spare_.reset();
    return v;
  }
  double u1, u2;
  do {
    u1 = uniform_real();
  } while (u1 <= 1e-300);
  u2 = uniform_real();
  double r = std::sqrt(-2.0 * std::log(u1));
  gauss_spare_ = r * std::sin(2.0 * M_PI * u2);
  return r * std::cos(2.0 * M_PI * u2) * sigma;
}

GeneratorSpec derive(const GeneratorSpec& base, u64 index) {
  GeneratorSpec d = base;
  d.seed = base.seed + index;
  return d;
}

Mat uniform_matrix(int rows, int cols, i64 q, Generator& gen) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("uniform_matrix: empty shape");
  Mat m(rows, cols);
  for (int r = 0; r < rows; r++)
    for (int c = 0; c < cols; c++) m.at(r, c) = gen.uniform_mod(q);
  return m;
}

std::pair<u64, u64> lcg_column_params(u64 a, u64 c, u64 m, int n) {
  using u128 = unsigned __int128;
  u64 apow = 1 % m, geom = 0;
  for (int i = 0; i < n; i++) {
    geom = static_cast<u64>((geom + apow) % m);  // 1 + a + ... + a^{n-1}
    apow = static_cast<u64>((static_cast<u128>(apow) * a) % m);
  }
  u64 c_col = static_cast<u64>((static_cast<u128>(c) * geom) % m);
  return {apow, c_col};
}

}  // namespace lwebench::rng
