#include "topothermo/rng.hpp"

namespace topothermo {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

Philox4x32::counter_type Philox4x32::generate(counter_type ctr, key_type key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream) noexcept
    : CounterRng(seed, static_cast<std::uint32_t>(stream)) {}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream) noexcept : seed_(seed), stream_(stream) {}

void CounterRng::uniforms(std::uint64_t index, std::span<double> out) const noexcept {
  const Philox4x32::key_type key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  std::size_t filled = 0;
  for (std::uint32_t block = 0; filled < out.size(); ++block) {
    const auto r = Philox4x32::generate(
        {block, stream_, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)}, key);
    out[filled++] = to_unit(r[0], r[1]);
    if (filled < out.size()) out[filled++] = to_unit(r[2], r[3]);
  }
}

}  // namespace topothermo
