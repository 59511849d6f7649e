#pragma once

#include <cmath>
#include <cstdint>

namespace stochsys {

// Counter-based random stream in the SplitMix64 family. The start state is
// derived by hashing (seed, replicate, stream), so every (replicate, process)
// pair owns an independent stream and a replicate simulated on worker A
// produces exactly the draws it would produce on worker B. That is what makes
// ensemble output independent of thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream)
      : state_(derive(seed, replicate, stream)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // uniform on (0, 1]; never 0, so log() is safe
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; consumes exactly two uniforms
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t replicate,
                              std::uint64_t stream) {
    std::uint64_t s = mix(seed + 0x9E3779B97F4A7C15ull);
    s = mix(s ^ (replicate + 0xD1B54A32D192ED03ull));
    s = mix(s ^ (stream + 0x8CB92BA72F3D8DD7ull));
    return s;
  }

  std::uint64_t state_;
};

}  // namespace stochsys
