#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace mixstable {

/// SplitMix64 finalizer. Used for seeding and for stream-id mixing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives the id of sub-stream `index` of stream `parent`.
///
/// Chunked and per-replicate generation give every chunk its own
/// sub-stream id, so the result does not depend on how chunks are
/// scheduled over threads.
constexpr std::uint64_t child_stream(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL) ^ mix64(index + 0x8CB92BA72F3D8DD7ULL);
}

/// Deterministic random stream: xoshiro256** keyed by (seed, stream_id).
///
/// Seeding protocol: a SplitMix64 sequence is started at
/// `mix64(seed) ^ mix64(stream_id ^ 0x6A09E667F3BCC909)` and its first
/// four outputs form the xoshiro state. Identical (seed, stream_id)
/// pairs reproduce identical sequences bit-exactly; distinct stream
/// ids land on unrelated points of the 2^256 period.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t sm = mix64(seed) ^ mix64(stream_id ^ 0x6A09E667F3BCC909ULL);
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      word = mix64(sm);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Fresh stream for sub-stream `index` under the same seed.
  RngStream child(std::uint64_t index) const noexcept {
    return RngStream(seed_, child_stream(stream_id_, index));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential W_1.
  double exponential() noexcept { return -std::log(uniform()); }

  /// Standard normal by the Marsaglia polar method; the second variate
  /// of each accepted pair is cached in the stream state.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Rademacher sign, +1 or -1 with equal probability.
  double sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

  bool operator==(const RngStream& other) const noexcept {
    return state_ == other.state_ && has_spare_ == other.has_spare_ &&
           (!has_spare_ || spare_ == other.spare_);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mixstable
