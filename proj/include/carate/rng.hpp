#ifndef CARATE_RNG_HPP_
#define CARATE_RNG_HPP_

#include <array>
#include <cstdint>

namespace carate {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC 2011). Maps a 128-bit counter and a 64-bit key to 128
// pseudo-random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Separates the random streams used by one replication so that, e.g., a
// change of assignment scheme does not perturb the covariate draws.
enum class Purpose : std::uint32_t {
  kCovariates = 1,
  kNoise = 2,
  kAssignment = 3,
  kCalibration = 4,
  kAuxiliary = 5,
};

// 256-bit stream identity derived from (seed, replication, purpose).
struct StreamKey {
  std::array<std::uint64_t, 4> words{};

  static StreamKey derive(std::uint64_t seed, std::uint64_t replication,
                          Purpose purpose);
  bool operator==(const StreamKey&) const = default;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Counter-based random stream. Words 0 and 1 of the key become the Philox key
// and the upper half of the counter; the lower half of the counter is the
// block index. Streams are cheap value types: copy one to replay it.
class RngStream {
 public:
  explicit RngStream(const StreamKey& key);
  RngStream(std::uint64_t seed, std::uint64_t replication, Purpose purpose)
      : RngStream(StreamKey::derive(seed, replication, purpose)) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform_open01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t uniform_index(std::uint64_t bound);
  bool bernoulli(double p);
  // Standard normal by inverse-CDF transform of uniform_open01().
  double standard_normal();

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill();

  PhiloxKey key_{};
  std::uint32_t counter_hi0_ = 0;
  std::uint32_t counter_hi1_ = 0;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int buffered_ = 0;
};

}  // namespace carate

#endif  // CARATE_RNG_HPP_
