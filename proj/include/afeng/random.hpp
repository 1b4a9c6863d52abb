#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace afeng {

// Seeded source with platform-independent draws. The std engine is fully
// specified by the standard; the std distributions are not, so the helpers
// below map raw engine output to values themselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a counter.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t counter);

}  // namespace afeng
