#include "pvyield/util/rng.hpp"

#include <numeric>

#include "pvyield/errors.hpp"

namespace pvyield {

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  if (k > n) fail(errc::not_enough_sites, "cannot draw " + std::to_string(k) + " from " + std::to_string(n));
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), size_t{0});
  // Partial Fisher-Yates: the first k slots end up holding the sample.
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace pvyield
