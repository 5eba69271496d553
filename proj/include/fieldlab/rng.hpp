#pragma once

#include <cstdint>

namespace fieldlab {

// One Philox4x32-10 block: out <- block(ctr, key).
void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

// Counter-based stream (Philox4x32-10). A stream is addressed by
// (seed, stream_id); the 128-bit counter holds the stream id in its two
// high words and the draw counter in the two low words, so distinct
// stream ids can never reach the same generator state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  std::uint32_t next_u32();

  // strictly inside (0,1)
  double uniform01();
  // standard normal (Box-Muller, second value cached)
  double normal();
  // unit-rate exponential
  double exponential();
  // survival t^-alpha on [1, inf)
  double pareto(double alpha);
  // uniform integer in [0, n)
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  void refill();

  std::uint32_t key_[2];
  std::uint32_t ctr_[4];
  std::uint32_t buf_[4];
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Disjoint stream ids for (context, replication) pairs; valid while
// rep < 2^32, which run_mc enforces.
inline std::uint64_t substream_id(std::uint32_t ctx, std::uint64_t rep) {
  return (static_cast<std::uint64_t>(ctx) << 32) | (rep & 0xffffffffULL);
}

}  // namespace fieldlab
