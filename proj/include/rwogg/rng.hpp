#ifndef RWOGG_RNG_HPP
#define RWOGG_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace rwogg {

/// Recorded in run metadata so outputs can be reproduced bit-for-bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64;stream-seed=splitmix64(seed,stream);u01=top53";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent per-walker / per-trajectory stream derived from (seed, stream).
/// Results never depend on how streams are spread over threads.
class StreamRng {
public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

} // namespace rwogg

#endif
