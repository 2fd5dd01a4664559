#include "crh/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crh {

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RandomStream::below: n must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return r % n;
}

std::uint64_t RandomStream::geometric_failures(double p) {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("RandomStream::geometric_failures: p must be in (0, 1]");
  if (p == 1.0) return 0;
  // Inversion: floor(log(U) / log(1 - p)) with U in (0, 1].
  const double u = 1.0 - uniform();
  const double k = std::floor(std::log(u) / std::log1p(-p));
  if (k >= 9.0e18) return static_cast<std::uint64_t>(9.0e18);
  return static_cast<std::uint64_t>(k);
}

}  // namespace crh
