#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

namespace v2x {

/// Named deterministic random streams. Each concern draws from its own
/// generator so adding draws to one feature does not perturb the others.
enum class Stream : int {
  placement = 0,
  shadowing = 1,
  fading = 2,
  kmeans = 3,
  bler = 4,
  txpool = 5,  // sidelink autonomous-mode resource selection
};

inline constexpr int kStreamCount = 6;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed) {
    for (int i = 0; i < kStreamCount; ++i) {
      streams_[i].seed(splitmix64(master_seed + 0x100ull * (i + 1)));
    }
  }

  std::mt19937_64& operator[](Stream s) { return streams_[static_cast<int>(s)]; }

 private:
  std::array<std::mt19937_64, kStreamCount> streams_;
};

}  // namespace v2x
