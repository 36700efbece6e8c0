#pragma once

#include <cstdint>
#include <random>

namespace carmen {

/// Seeded random stream identified by (seed, stream id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// are fully specified by the standard, so a given (seed, stream id) pair
/// yields the same bits on every conforming platform. All variate generation
/// on top of the raw bits is done in this library rather than with the
/// implementation-defined std:: distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; depends only on (seed, stream id, key),
  /// never on how many draws this stream has made.
  RngStream substream(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); never returns 0.
  double uniform_open();

  /// Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace carmen
