#pragma once

// Counter-based random streams.
//
// Every random draw in the library comes from Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11). A stream is the
// sequence of blocks Philox(counter = {i_lo, i_hi, stream_lo, stream_hi},
// key = {seed_lo, seed_hi}) for i = 0, 1, 2, ..., consumed one 32-bit word at
// a time in block order. Because any (seed, stream) pair addresses its own
// sequence, work item r can draw from stream r without coordinating with any
// other thread.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace distkern::random {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
Block philox4x32(Block counter, Key key);

/// SplitMix64 finalizer, used to derive independent seeds from (seed, tag, index).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

/// Domain tags so that different consumers of one user seed never share a stream.
namespace tags {
inline constexpr std::uint64_t kSimulation = 0x73796e7468ULL;    // "synth"
inline constexpr std::uint64_t kPermutation = 0x7065726dULL;     // "perm"
inline constexpr std::uint64_t kKMeans = 0x6b6d65616e73ULL;      // "kmeans"
inline constexpr std::uint64_t kTrialData = 0x747269616cULL;     // "trial"
}  // namespace tags

class CounterStream {
 public:
  using result_type = std::uint32_t;

  CounterStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unbiased integer in [0, bound) by Lemire's multiply-and-reject method.
  std::uint32_t below(std::uint32_t bound);

  /// Standard normal via Box-Muller; values are produced in pairs.
  double normal();

 private:
  void refill();

  Key key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  unsigned used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Fisher-Yates shuffle of `out` (which must hold 0..n-1 or any sequence)
/// driven by `stream`, walking i from n-1 down to 1 and swapping with below(i+1).
void shuffle(CounterStream& stream, std::span<std::size_t> out);

/// The permutation used by replicate `replicate` of a permutation test:
/// identity shuffled by CounterStream(seed, replicate).
std::vector<std::size_t> replicate_permutation(std::uint64_t seed, std::uint64_t replicate,
                                               std::size_t n);

}  // namespace distkern::random
