#include "dce/rng.hpp"

namespace dce {

namespace {

constexpr uint32_t kWeylA = 0x9E3779B9u;
constexpr uint32_t kWeylB = 0xBB67AE85u;
constexpr uint32_t kMulA = 0xD2511F53u;
constexpr uint32_t kMulB = 0xCD9E8D57u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  const uint64_t product = uint64_t(a) * uint64_t(b);
  lo = uint32_t(product);
  hi = uint32_t(product >> 32);
}

inline void one_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kMulA, c[0], lo0, hi0);
  mulhilo(kMulB, c[2], lo1, hi1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxRng::PhiloxRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

std::array<uint32_t, 4> PhiloxRng::block(const std::array<uint32_t, 4>& counter,
                                         const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> out = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    one_round(out, k);
    if (round < 9) {
      k[0] += kWeylA;
      k[1] += kWeylB;
    }
  }
  return out;
}

void PhiloxRng::refill() {
  const std::array<uint32_t, 4> counter = {uint32_t(block_index_), uint32_t(block_index_ >> 32),
                                           uint32_t(stream_), uint32_t(stream_ >> 32)};
  const std::array<uint32_t, 2> key = {uint32_t(seed_), uint32_t(seed_ >> 32)};
  buffer_ = block(counter, key);
  ++block_index_;
  used_ = 0;
}

uint64_t PhiloxRng::next_u64() {
  if (used_ >= 2) refill();
  const uint64_t value = uint64_t(buffer_[2 * used_]) | (uint64_t(buffer_[2 * used_ + 1]) << 32);
  ++used_;
  return value;
}

double PhiloxRng::next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

bool PhiloxRng::bernoulli(double p) { return next_double() < p; }

uint64_t PhiloxRng::mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t PhiloxRng::digest() const {
  return mix64(seed_ ^ mix64(stream_ ^ mix64(2 * block_index_ + uint64_t(used_))));
}

}  // namespace dce
