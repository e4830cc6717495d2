#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace pvyield {

// Deterministic 64-bit PRNG (splitmix64, Steele et al. 2014). Every seeded
// operation in the library draws from this generator rather than from
// std:: distributions, so byte-identical reruns hold across standard-library
// implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform in {0, ..., n-1}, unbiased via rejection.
  uint64_t below(uint64_t n) {
    const uint64_t t = (0 - n) % n;  // 2^64 mod n
    uint64_t x;
    do {
      x = next_u64();
    } while (x < t);
    return x % n;
  }

  // Derives an independent stream; forking does not disturb this generator.
  Rng fork(uint64_t stream) const {
    Rng child(state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    child.next_u64();
    return child;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices drawn from {0, ..., n-1}, in draw order.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  uint64_t state_;
};

}  // namespace pvyield
