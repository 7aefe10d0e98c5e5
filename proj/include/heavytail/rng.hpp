#pragma once

#include <cstdint>
#include <random>

namespace heavytail {

using Engine = std::mt19937_64;

/// Identifies one reproducible random stream.
///
/// The engine state is derived from both words through std::seed_seq, so
/// distinct (master_seed, stream_index) pairs give unrelated sequences and the
/// same pair always gives the same sequence, whichever thread consumes it.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    return Engine(seq);
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Uniform draw on the open interval (0, 1) from the top 53 bits of one output.
inline double uniform_open(Engine& engine) {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(engine() >> 11) + 0.5) * kScale;
}

}  // namespace heavytail
