#include <cstdio>
#include <ostream>

#include "liftplan/objectives.hpp"

namespace liftplan {
namespace {

Vec unit_gauss_dir(RngStream& rng, std::size_t dim) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec u = gauss_vec(rng, dim, 1.0);
    const double n = norm2(u);
    if (n > 1e-12) {
      scale_inplace(1.0 / n, u);
      return u;
    }
  }
  throw std::runtime_error("landscape_slice: could not draw a unit direction");
}

}  // namespace

LandscapeField landscape_slice(const std::function<double(std::span<const double>)>& loss,
                               std::span<const double> center, RngStream& rng,
                               std::size_t grid, double radius) {
  if (grid < 3) throw std::invalid_argument("landscape_slice: grid must be >= 3");
  if (center.size() < 2)
    throw std::invalid_argument("landscape_slice: need at least 2 parameters");

  const Vec u = unit_gauss_dir(rng, center.size());
  Vec v;
  for (int attempt = 0; attempt < 64; ++attempt) {
    v = unit_gauss_dir(rng, center.size());
    axpy(-dot(v, u), u, v);
    const double n = norm2(v);
    if (n > 1e-8) {
      scale_inplace(1.0 / n, v);
      break;
    }
    v.clear();
  }
  if (v.empty()) throw std::runtime_error("landscape_slice: could not orthogonalize");

  LandscapeField field;
  field.grid = grid;
  field.radius = radius;
  field.u = u;
  field.v = v;
  field.offsets.resize(grid);
  for (std::size_t i = 0; i < grid; ++i)
    field.offsets[i] = -radius + 2.0 * radius * static_cast<double>(i) /
                                     static_cast<double>(grid - 1);

  field.values.resize(grid * grid);
  Vec point(center.begin(), center.end());
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      std::copy(center.begin(), center.end(), point.begin());
      axpy(field.offsets[i], u, point);
      axpy(field.offsets[j], v, point);
      field.values[i * grid + j] = loss(point);
    }
  }
  return field;
}

void write_landscape_csv(const LandscapeField& field, std::ostream& os) {
  os << "alpha,beta,loss\n";
  char buf[128];
  for (std::size_t i = 0; i < field.grid; ++i)
    for (std::size_t j = 0; j < field.grid; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", field.offsets[i],
                    field.offsets[j], field.values[i * field.grid + j]);
      os << buf;
    }
}

}  // namespace liftplan
