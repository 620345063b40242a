#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pir {

/// Counter-based random number generation (Philox4x32-10).
///
/// Every draw is a pure function of (seed, stream_id, sample, block), so
/// estimators can hand out disjoint streams to parallel workers and still
/// produce bitwise identical results for a fixed seed, independent of
/// scheduling. One 128-bit block yields two doubles.
namespace philox {

/// One Philox4x32-10 keyed bijection: 128-bit counter -> 128-bit output.
std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                   const std::array<std::uint32_t, 2>& key);

}  // namespace philox

/// A logical RNG stream identified by (seed, stream_id).
///
/// `sample` is the coarse counter (one per Monte Carlo sample or chain step),
/// `block` the fine counter within a sample. All generators are const and
/// reentrant.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Two independent uniforms in (0, 1].
  void uniform_pair(std::uint64_t sample, std::uint64_t block, double& u0, double& u1) const;

  /// Single uniform in (0, 1] (first half of the block).
  double uniform(std::uint64_t sample, std::uint64_t block) const;

  /// Two independent standard normals (Box-Muller on one block).
  void gaussian_pair(std::uint64_t sample, std::uint64_t block, double& g0, double& g1) const;

  /// Fills `out` with standard normals, consuming blocks [block0, block0 + ceil(n/2)).
  void fill_gaussians(std::uint64_t sample, std::span<double> out, std::uint64_t block0 = 0) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace pir
