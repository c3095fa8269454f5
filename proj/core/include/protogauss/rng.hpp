#pragma once

#include <cstdint>
#include <initializer_list>

namespace protogauss {

// splitmix64 finalizer, also used to hash stream keys.
std::uint64_t mix64(std::uint64_t x);

// Deterministic xoshiro256++ stream. Streams derived from the same root
// seed and key tuple are bit-identical across runs and independent of the
// order in which they are created, which keeps every sampler draw
// reproducible no matter how the surrounding loops are arranged.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream derive(std::uint64_t root,
                          std::initializer_list<std::uint64_t> key);

  std::uint64_t next_u64();
  // uniform on (0,1), never returns an endpoint
  double next_unit();
  // uniform integer in [0, n), n > 0
  std::uint64_t next_below(std::uint64_t n);
  // standard normal via Box-Muller
  double next_normal();
  // Gamma(shape, 1) via Marsaglia-Tsang, shape > 0
  double next_gamma(double shape);
  // chi-squared with nu degrees of freedom, nu > 0
  double next_chi2(double nu);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream tags so unrelated draw sites never share a stream.
namespace stream_tag {
inline constexpr std::uint64_t kVarDraw = 1;
inline constexpr std::uint64_t kMeanDraw = 2;
inline constexpr std::uint64_t kSplit = 3;
inline constexpr std::uint64_t kNegativeSwap = 4;
inline constexpr std::uint64_t kNegativeRandom = 5;
inline constexpr std::uint64_t kSynth = 6;
}  // namespace stream_tag

}  // namespace protogauss
