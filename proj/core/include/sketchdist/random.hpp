#pragma once

#include <array>
#include <cstdint>

namespace sketchdist {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123). Each
/// (key, counter) pair maps to four independent 32-bit words, so any element
/// of a stream can be drawn without generating its predecessors.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
  explicit Philox4x32(Key key) noexcept : key_(key) {}

  Counter operator()(Counter ctr) const noexcept;

  /// Block for a 64-bit stream position (low words) and a stream tag.
  Counter block(std::uint64_t index, std::uint32_t stream = 0) const noexcept {
    return (*this)({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    stream, 0});
  }

 private:
  Key key_;
};

/// Uniform double in (0, 1) from 53 random bits; never returns 0.
double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept;

/// Standard normal via Box-Muller from one Philox block.
double normal_from_block(const Philox4x32::Counter& block) noexcept;

/// Uniform integer in [0, n) from a 64-bit draw (multiply-shift).
std::uint64_t bounded(std::uint64_t draw, std::uint64_t n) noexcept;

}  // namespace sketchdist
