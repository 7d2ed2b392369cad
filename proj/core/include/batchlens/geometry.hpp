#pragma once

#include <span>
#include <vector>

namespace batchlens {

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;

  friend bool operator==(const Circle&, const Circle&) = default;
};

/// Front-chain circle packing. Circles are placed in input order; the first
/// lands on the origin and every later one touches two already placed
/// circles. Pairwise overlap stays below 1e-6 * (r_i + r_j).
/// Throws Error(InvalidArgument) for a non-positive or non-finite radius.
std::vector<Circle> pack_siblings(std::span<const double> radii);

/// Smallest circle containing every input circle. Throws
/// Error(InvalidArgument) on empty input.
Circle enclosing_circle(std::span<const Circle> circles);

}  // namespace batchlens
