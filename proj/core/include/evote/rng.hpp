#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace evote {

// Seeded random source. The engine's output sequence is fixed by the
// standard, and draws avoid std:: distributions (whose algorithms vary
// between library vendors), so a seed reproduces bit-exactly everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bit() { return (engine_() >> 63) != 0; }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evote
