#pragma once

#include <cstdint>
#include <random>

namespace levy {

/// Independent random stream for one replicate. The engine is seeded from
/// (master seed, replicate index, substream) through std::seed_seq, so a
/// replicate's draws do not depend on which thread runs it or in what order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index, std::uint32_t substream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      substream};
    engine_.seed(seq);
  }

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return static_cast<std::uint64_t>(dist(engine_));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace levy
