#include "pir/rng.hpp"

#include <cmath>

namespace pir {

namespace philox {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// splitmix64 finalizer, used only to spread (seed, stream_id) into the key.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key) {
  std::array<std::uint32_t, 4> c = counter;
  std::array<std::uint32_t, 2> k = key;
  for (int r = 0; r < 10; ++r) {
    round_once(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

}  // namespace philox

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t k = philox::mix64(philox::mix64(seed) + stream_id);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void CounterStream::uniform_pair(std::uint64_t sample, std::uint64_t block,
                                 double& u0, double& u1) const {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32)};
  const auto out = philox::block(ctr, key_);
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  // 53-bit mantissas mapped to (0, 1]; the +1 keeps log() finite.
  u0 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  u1 = static_cast<double>((b >> 11) + 1) * 0x1.0p-53;
}

double CounterStream::uniform(std::uint64_t sample, std::uint64_t block) const {
  double u0, u1;
  uniform_pair(sample, block, u0, u1);
  return u0;
}

void CounterStream::gaussian_pair(std::uint64_t sample, std::uint64_t block,
                                  double& g0, double& g1) const {
  double u0, u1;
  uniform_pair(sample, block, u0, u1);
  const double r = std::sqrt(-2.0 * std::log(u0));
  const double theta = 2.0 * M_PI * u1;
  g0 = r * std::cos(theta);
  g1 = r * std::sin(theta);
}

void CounterStream::fill_gaussians(std::uint64_t sample, std::span<double> out,
                                   std::uint64_t block0) const {
  std::size_t i = 0;
  std::uint64_t b = block0;
  while (i + 1 < out.size()) {
    gaussian_pair(sample, b++, out[i], out[i + 1]);
    i += 2;
  }
  if (i < out.size()) {
    double g0, g1;
    gaussian_pair(sample, b, g0, g1);
    out[i] = g0;
  }
}

}  // namespace pir
