#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace widelab {

// splitmix64 finalizer. Every seed and stream id in the project goes through
// this function; changing it changes every output file.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  /// State words are the first four outputs of a splitmix64 sequence
  /// started at `key`.
  explicit Xoshiro256pp(std::uint64_t key) noexcept {
    for (auto& word : state_) {
      key += kGoldenGamma;
      word = mix64(key);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Uniform on the open interval (0, 1) from the top 52 bits of one draw,
/// so both endpoints stay representable: [2^-53, 1 - 2^-53].
inline double uniform_open01(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Identifies one reproducible random sequence. A stream is a plain value:
/// copying it and building two engines yields two identical sequences.
///
/// Engine key:   mix64(master_seed ^ mix64(stream_id + kGoldenGamma))
/// Child stream: same master_seed, id = mix64(stream_id ^ mix64(k + kChildSalt))
struct RandomStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  static constexpr std::uint64_t kChildSalt = 0x632be59bd9b4e019ULL;

  std::uint64_t key() const noexcept {
    return mix64(master_seed ^ mix64(stream_id + kGoldenGamma));
  }

  Xoshiro256pp engine() const noexcept { return Xoshiro256pp(key()); }

  RandomStream child(std::uint64_t k) const noexcept {
    return {master_seed, mix64(stream_id ^ mix64(k + kChildSalt))};
  }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;
};

/// Derives an independent master seed for a named family of streams, e.g.
/// one (width, repetition) cell of a study.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
  return mix64(master_seed ^ mix64(a * kGoldenGamma ^ mix64(b + 1)));
}

namespace detail {

// Copies bit 8 of `bits` into the sign of x (x >= 0) without a branch.
inline double apply_sign_bit(double x, std::uint64_t bits) noexcept {
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) |
                               ((bits & 0x100) << 55));
}

// 256-layer ziggurat tables for a symmetric density f on [0, inf).
// x[0] is the base-strip width, x[1] = r, x[256] = 0; y[i] = f(x[i]).
struct ZigguratTable {
  std::array<double, 257> x{};
  std::array<double, 257> y{};
};

// Built during static initialization of random.cpp; do not sample from
// other static initializers.
extern const ZigguratTable kNormalTable;
extern const ZigguratTable kExponentialTable;

inline constexpr double kNormalR = 3.6541528853610088;
inline constexpr double kExponentialR = 7.69711747013104972;

double normal_tail(Xoshiro256pp& eng) noexcept;
double normal_wedge(Xoshiro256pp& eng, double x, int layer) noexcept;
double exponential_wedge(Xoshiro256pp& eng, double x, int layer) noexcept;

}  // namespace detail

/// Standard normal variate. Ziggurat, one 64-bit draw on the fast path.
inline double standard_normal(Xoshiro256pp& eng) noexcept {
  const auto& t = detail::kNormalTable;
  for (;;) {
    const std::uint64_t bits = eng();
    const int i = static_cast<int>(bits & 0xff);
    const double x = static_cast<double>(bits >> 11) * 0x1.0p-53 * t.x[i];
    if (x < t.x[i + 1]) [[likely]] return detail::apply_sign_bit(x, bits);
    if (i == 0) return detail::apply_sign_bit(detail::normal_tail(eng), bits);
    const double accepted = detail::normal_wedge(eng, x, i);
    if (accepted >= 0.0) return detail::apply_sign_bit(accepted, bits);
  }
}

/// Two-sided exponential variate with density exp(-|x|)/2.
inline double symmetric_exponential(Xoshiro256pp& eng) noexcept {
  const auto& t = detail::kExponentialTable;
  for (;;) {
    const std::uint64_t bits = eng();
    const int i = static_cast<int>(bits & 0xff);
    const double x = static_cast<double>(bits >> 11) * 0x1.0p-53 * t.x[i];
    if (x < t.x[i + 1]) [[likely]] return detail::apply_sign_bit(x, bits);
    if (i == 0) {
      // memoryless tail
      return detail::apply_sign_bit(
          detail::kExponentialR - std::log(uniform_open01(eng())), bits);
    }
    const double accepted = detail::exponential_wedge(eng, x, i);
    if (accepted >= 0.0) return detail::apply_sign_bit(accepted, bits);
  }
}

}  // namespace widelab
