#include "fieldlab/rng.hpp"

#include <cmath>

namespace fieldlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::uint32_t x[4], const std::uint32_t k[2]) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  const std::uint32_t y0 = hi1 ^ x[1] ^ k[0];
  const std::uint32_t y1 = lo1;
  const std::uint32_t y2 = hi0 ^ x[3] ^ k[1];
  const std::uint32_t y3 = lo0;
  x[0] = y0;
  x[1] = y1;
  x[2] = y2;
  x[3] = y3;
}

}  // namespace

void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
  std::uint32_t x[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
  std::uint32_t k[2] = {key[0], key[1]};
  for (int r = 0; r < 9; ++r) {
    philox_round(x, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  philox_round(x, k);
  out[0] = x[0];
  out[1] = x[1];
  out[2] = x[2];
  out[3] = x[3];
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  key_[0] = static_cast<std::uint32_t>(seed);
  key_[1] = static_cast<std::uint32_t>(seed >> 32);
  ctr_[0] = 0;
  ctr_[1] = 0;
  ctr_[2] = static_cast<std::uint32_t>(stream_id);
  ctr_[3] = static_cast<std::uint32_t>(stream_id >> 32);
}

void RngStream::refill() {
  philox4x32_10(ctr_, key_, buf_);
  pos_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];  // draw counter only; stream words fixed
}

std::uint32_t RngStream::next_u32() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  // 53 random bits, offset half a step: never exactly 0 or 1
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RngStream::exponential() { return -std::log(uniform01()); }

double RngStream::pareto(double alpha) {
  return std::pow(uniform01(), -1.0 / alpha);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  return n ? next_u64() % n : 0;
}

}  // namespace fieldlab
