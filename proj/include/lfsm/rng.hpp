#pragma once

#include <cmath>
#include <cstdint>

namespace lfsm {

// SplitMix64 generator. Chosen over std::mt19937 because the stream is a pure
// function of a 64-bit counter: sub-streams for independent trajectories can
// be derived from (master seed, trajectory index) without any coordination,
// which keeps every simulation reproducible from a single --seed value no
// matter how the work is split across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for worker `stream` under a common master seed. Two
  // mixing rounds so that (master, 0), (master, 1), ... and (master+1, 0)
  // land far apart even for small integer seeds.
  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t x = mix(master ^ 0x632be59bd9b4e019ULL);
    x = mix(x + 0x9e3779b97f4a7c15ULL * (stream + 1));
    return Rng(x);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on the open interval (0,1). The half-step offset keeps both
  // endpoints unreachable, so log() and tan() of derived variates are finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential via inversion.
  double exponential() { return -std::log(uniform01()); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace lfsm
