#include "carate/rng.hpp"

#include <cmath>

#include "carate/stats.hpp"

namespace carate {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

StreamKey StreamKey::derive(std::uint64_t seed, std::uint64_t replication,
                            Purpose purpose) {
  // Absorb each field through splitmix64 so that nearby inputs diverge.
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  state = h ^ (replication * 0xD1B54A32D192ED03ull);
  h = splitmix64(state);
  state = h ^ (static_cast<std::uint64_t>(purpose) * 0x8CB92BA72F3D8DD7ull);
  StreamKey key;
  for (auto& w : key.words) w = splitmix64(state);
  return key;
}

RngStream::RngStream(const StreamKey& key) {
  key_ = {static_cast<std::uint32_t>(key.words[0]),
          static_cast<std::uint32_t>(key.words[0] >> 32)};
  counter_hi0_ = static_cast<std::uint32_t>(key.words[1]);
  counter_hi1_ = static_cast<std::uint32_t>(key.words[1] >> 32);
}

void RngStream::refill() {
  const PhiloxCounter ctr = {static_cast<std::uint32_t>(block_),
                             static_cast<std::uint32_t>(block_ >> 32),
                             counter_hi0_, counter_hi1_};
  buffer_ = philox4x32_10(ctr, key_);
  ++block_;
  buffered_ = 4;
}

std::uint32_t RngStream::next_u32() {
  if (buffered_ == 0) refill();
  return buffer_[4 - buffered_--];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * kTwoPowMinus53;
}

double RngStream::uniform_open01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPowMinus53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  // Lemire's nearly-divisionless method with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double RngStream::standard_normal() {
  return normal_inverse_cdf(uniform_open01());
}

}  // namespace carate
