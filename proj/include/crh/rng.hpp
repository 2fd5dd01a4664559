#pragma once

#include <cstdint>
#include <random>

namespace crh {

/// Stable 64-bit finalizer (splitmix64). Used for every seed derivation and
/// for the public per-node hopping sequences, so its output must never change.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t entity,
                                 std::uint64_t replication) noexcept {
  return mix64(mix64(mix64(master) ^ entity) ^ (replication * 0xd1b54a32d192ed03ULL));
}

/// Entity families that own an independent random stream.
enum class StreamKind : std::uint64_t {
  PuChannel = 1,
  SuTraffic = 2,
  SuBackoff = 3,
  SuSelection = 4,
  SuSensing = 5,
  ScenarioDraw = 6,
};

constexpr std::uint64_t entity_id(StreamKind kind, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(kind) << 48) ^ index;
}

/// Seeded stream. The engine is std::mt19937_64 (bit-exact across standard
/// libraries); the distribution transforms are implemented here because the
/// std:: distributions are not specified bit-for-bit.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  RandomStream(std::uint64_t master, StreamKind kind, std::uint64_t index,
               std::uint64_t replication)
      : engine_(mix_seed(master, entity_id(kind, index), replication)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Number of failures before the first success, success probability p in (0, 1].
  std::uint64_t geometric_failures(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace crh
