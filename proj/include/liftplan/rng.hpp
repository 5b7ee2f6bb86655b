#pragma once

#include <cstdint>

#include "liftplan/dense.hpp"

namespace liftplan {

// Counter-based stream: draw k is a pure hash of (seed, stream, k), so a
// stream's output never depends on what other streams consumed. derive()
// makes per-trial / per-chunk child streams without sequential coupling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  double next_unit();   // uniform on (0, 1]
  double next_gauss();  // N(0,1); always consumes exactly two counter slots
  double uniform(double lo, double hi);

  RngStream derive(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// dim i.i.d. N(0, sigma^2) samples; sigma = 0 yields exact zeros but still
// advances the stream by the same amount.
Vec gauss_vec(RngStream& rng, std::size_t dim, double sigma);

// Stable 64-bit finalizer shared with config hashing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace liftplan
