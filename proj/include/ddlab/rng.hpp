#pragma once

#include <cstdint>
#include <limits>

namespace ddlab {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of seeds and tags into a new 64-bit key.
std::uint64_t hash64(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept;

/// Tags for the independent random sub-streams derived from an instance seed.
enum class Stream : std::uint64_t {
  teacher = 0x7465616368ULL,
  inputs = 0x696e707574ULL,
  label_noise = 0x6c6e6f6973ULL,
  update_noise = 0x756e6f6973ULL,
  test_set = 0x7465737473ULL,
  rotation = 0x726f746174ULL,
};

/// Counter-based generator: the i-th draw is mix64(key + i * golden), so a
/// stream is fully determined by its key and never shares state with another.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  CounterRng(std::uint64_t seed, Stream stream) noexcept
      : key_(hash64(seed, static_cast<std::uint64_t>(stream))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  /// Standard normal (Box-Muller, second variate cached).
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ddlab
