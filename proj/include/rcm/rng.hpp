#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rcm {

// Counter-based stream: output i is a SplitMix64 finalizer applied to
// key + i*gamma. Streams derived from (seed, path ids) are statistically
// independent and reproducible regardless of scheduling, which is what the
// per-(trajectory, step) substream contract needs.
class SplitRng {
 public:
  using result_type = std::uint64_t;

  explicit SplitRng(std::uint64_t key = 0) : key_(key), ctr_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Child key derivation; chain for nested stream ids.
  static std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
    return mix(key ^ mix(id + 0x632be59bd9b4e019ULL));
  }

  static SplitRng from(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix(seed);
    for (std::uint64_t id : path) k = derive(k, id);
    return SplitRng(k);
  }

  SplitRng split(std::uint64_t id) const { return SplitRng(derive(key_, id)); }

  result_type operator()() {
    return mix(key_ + (ctr_++) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return ((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) %
           n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace rcm
