#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace lyapinit {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is split into a 64-bit block index (low words) and a
/// 64-bit stream id (high words); the 64-bit key is the master seed. Distinct
/// stream ids therefore walk disjoint counter ranges under the same key.
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// One application of the ten-round bijection.
  static Counter block(Counter counter, Key key) noexcept;

 private:
  void refill() noexcept;

  Key key_;
  Counter counter_;
  Counter buffer_{};
  int next_ = 4;  // index into buffer_, in 32-bit words
};

/// A reproducible random stream identified by (master_seed, stream_id).
///
/// Rebuilding a stream from the same pair replays the same draws bit for bit,
/// independent of any other stream. A stream must not be shared between
/// threads; give each unit of work its own id.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const noexcept { return master_; }
  std::uint64_t stream_id() const noexcept { return id_; }

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Philox4x32& engine() noexcept { return engine_; }

 private:
  std::uint64_t master_;
  std::uint64_t id_;
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

/// Stream id for a named sub-purpose of a run, kept clear of the small ids
/// used for per-trial streams.
std::uint64_t derived_stream_id(std::uint64_t base, std::uint64_t index);

/// Fresh seed from std::random_device, for runs without an explicit seed.
std::uint64_t entropy_seed();

}  // namespace lyapinit
