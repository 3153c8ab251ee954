#pragma once

#include <cstdint>

namespace dgame {

// splitmix64: the standard 64-bit finalizer-based generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (base, a, b). Used for per-sample
// and per-player seeds so that every execution is replayable from one base.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t s = base;
  std::uint64_t z = splitmix64(s);
  s = z ^ (a * 0xd1342543de82ef95ULL);
  z = splitmix64(s);
  s = z ^ (b * 0xaf251af3b0f025b5ULL);
  return splitmix64(s);
}

// Counter-based random bit source: the k-th bit is a pure function of
// (seed, k), independent of how many bits were drawn before in other runs.
class BitStream {
 public:
  explicit BitStream(std::uint64_t seed) : seed_(seed) {}

  int next_bit() {
    if (avail_ == 0) {
      std::uint64_t s = seed_ + block_ * 0x9e3779b97f4a7c15ULL;
      buf_ = splitmix64(s);
      ++block_;
      avail_ = 64;
    }
    int bit = static_cast<int>(buf_ & 1u);
    buf_ >>= 1;
    --avail_;
    return bit;
  }

  std::uint64_t next_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint64_t>(next_bit());
    return v;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t block_ = 0;
  std::uint64_t buf_ = 0;
  int avail_ = 0;
};

}  // namespace dgame
