#include "liftplan/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace liftplan {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t z =
      mix64(seed_ + 0x9e3779b97f4a7c15ULL * (counter_++ + 1)) ^
      mix64(stream_ + 0xbf58476d1ce4e5b9ULL);
  return mix64(z);
}

double RngStream::next_unit() {
  // 53-bit mantissa, shifted into (0, 1] so log() below is always finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_gauss() {
  const double u1 = next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

RngStream RngStream::derive(std::uint64_t child) const {
  return RngStream(seed_, mix64(stream_ + 0x9e3779b97f4a7c15ULL * (child + 1)));
}

Vec gauss_vec(RngStream& rng, std::size_t dim, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gauss_vec: sigma must be >= 0");
  if (dim < 1) throw std::invalid_argument("gauss_vec: dim must be >= 1");
  Vec out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = sigma * rng.next_gauss();
  return out;
}

}  // namespace liftplan
