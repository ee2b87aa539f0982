#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace topothermo {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A pure function of (counter, key): any draw can be regenerated from its
/// coordinates alone, which is what makes the Monte Carlo estimators
/// independent of how samples are split across workers.
struct Philox4x32 {
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static counter_type generate(counter_type counter, key_type key) noexcept;
};

/// Named substreams. Each estimator draws from its own stream so that, e.g.,
/// Newton starts never alias volume samples for the same seed.
enum class Stream : std::uint32_t {
  volume = 1,
  boundary_probe = 2,
  newton_starts = 3,
  cylinder = 4,
};

/// Addressable uniform source: draw `index` of stream `stream` under `seed`.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, Stream stream) noexcept;
  CounterRng(std::uint64_t seed, std::uint32_t stream) noexcept;

  /// Fills `out` with uniforms in [0, 1) belonging to draw `index`.
  void uniforms(std::uint64_t index, std::span<double> out) const noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

}  // namespace topothermo
