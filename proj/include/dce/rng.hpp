#pragma once

#include <array>
#include <cstdint>

namespace dce {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011), version-pinned
// by known-answer tests. The 64-bit key holds the seed; counter words 2..3 hold
// the stream id and words 0..1 the block index, so distinct (seed, stream) pairs
// give independent sequences and any position is addressable in O(1).
class PhiloxRng {
 public:
  PhiloxRng(uint64_t seed, uint64_t stream);

  static std::array<uint32_t, 4> block(const std::array<uint32_t, 4>& counter,
                                       const std::array<uint32_t, 2>& key);

  uint64_t next_u64();
  double next_double();  // uniform on [0, 1), 53-bit resolution
  bool bernoulli(double p);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }
  uint64_t digest() const;  // mixes seed, stream and position

  static uint64_t mix64(uint64_t z);  // SplitMix64 finalizer

 private:
  void refill();

  uint64_t seed_ = 0;
  uint64_t stream_ = 0;
  uint64_t block_index_ = 0;
  std::array<uint32_t, 4> buffer_{};
  int used_ = 2;  // u64 slots consumed from the current block
};

}  // namespace dce
