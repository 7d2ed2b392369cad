#include "batchlens/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "batchlens/error.hpp"

namespace batchlens {

namespace {

// Relative slack when testing two placed circles for overlap.
constexpr double kOverlapSlack = 1e-7;

// Puts c tangent to both a and b, on the left of the a->b direction.
void place(const Circle& b, const Circle& a, Circle& c) {
  const double dx = b.cx - a.cx;
  const double dy = b.cy - a.cy;
  const double d2 = dx * dx + dy * dy;
  if (d2 > 0.0) {
    double a2 = a.r + c.r;
    a2 *= a2;
    double b2 = b.r + c.r;
    b2 *= b2;
    if (a2 > b2) {
      const double x = (d2 + b2 - a2) / (2.0 * d2);
      const double y = std::sqrt(std::max(0.0, b2 / d2 - x * x));
      c.cx = b.cx - x * dx - y * dy;
      c.cy = b.cy - x * dy + y * dx;
    } else {
      const double x = (d2 + a2 - b2) / (2.0 * d2);
      const double y = std::sqrt(std::max(0.0, a2 / d2 - x * x));
      c.cx = a.cx + x * dx - y * dy;
      c.cy = a.cy + x * dy + y * dx;
    }
  } else {
    c.cx = a.cx + c.r;
    c.cy = a.cy;
  }
}

bool intersects(const Circle& a, const Circle& b) {
  const double dr = (a.r + b.r) * (1.0 - kOverlapSlack);
  const double dx = b.cx - a.cx;
  const double dy = b.cy - a.cy;
  return dr > 0.0 && dr * dr > dx * dx + dy * dy;
}

// Front chain as a circular doubly linked list over indices.
struct ChainNode {
  std::size_t circle;
  std::size_t next;
  std::size_t prev;
};

double score(const std::vector<Circle>& circles, const std::vector<ChainNode>& chain,
             std::size_t node) {
  const auto& a = circles[chain[node].circle];
  const auto& b = circles[chain[chain[node].next].circle];
  const double ab = a.r + b.r;
  const double dx = (a.cx * b.r + b.cx * a.r) / ab;
  const double dy = (a.cy * b.r + b.cy * a.r) / ab;
  return dx * dx + dy * dy;
}

// --- smallest enclosing circle of circles (move-to-front with a basis of up to three) ---

bool encloses_not(const Circle& a, const Circle& b) {
  const double dr = a.r - b.r;
  const double dx = b.cx - a.cx;
  const double dy = b.cy - a.cy;
  return dr < 0.0 || dr * dr < dx * dx + dy * dy;
}

bool encloses_weak(const Circle& a, const Circle& b) {
  const double dr = a.r - b.r + std::max({a.r, b.r, 1.0}) * 1e-9;
  const double dx = b.cx - a.cx;
  const double dy = b.cy - a.cy;
  return dr > 0.0 && dr * dr > dx * dx + dy * dy;
}

bool encloses_weak_all(const Circle& a, const std::vector<Circle>& basis) {
  return std::all_of(basis.begin(), basis.end(), [&](const Circle& b) { return encloses_weak(a, b); });
}

Circle enclose2(const Circle& a, const Circle& b) {
  const double x21 = b.cx - a.cx;
  const double y21 = b.cy - a.cy;
  const double r21 = b.r - a.r;
  const double l = std::sqrt(x21 * x21 + y21 * y21);
  if (l == 0.0) return a.r >= b.r ? a : b;
  return {(a.cx + b.cx + x21 / l * r21) / 2.0, (a.cy + b.cy + y21 / l * r21) / 2.0,
          (l + a.r + b.r) / 2.0};
}

// Circle internally tangent to all three (Apollonius, outer solution).
std::optional<Circle> enclose3(const Circle& a, const Circle& b, const Circle& c) {
  const double x1 = a.cx, y1 = a.cy, r1 = a.r;
  const double x2 = b.cx, y2 = b.cy, r2 = b.r;
  const double x3 = c.cx, y3 = c.cy, r3 = c.r;
  const double a2 = x1 - x2;
  const double a3 = x1 - x3;
  const double b2 = y1 - y2;
  const double b3 = y1 - y3;
  const double c2 = r2 - r1;
  const double c3 = r3 - r1;
  const double d1 = x1 * x1 + y1 * y1 - r1 * r1;
  const double d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
  const double d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
  const double ab = a3 * b2 - a2 * b3;
  if (ab == 0.0) return std::nullopt;  // collinear centers
  const double xa = (b2 * d3 - b3 * d2) / (ab * 2.0) - x1;
  const double xb = (b3 * c2 - b2 * c3) / ab;
  const double ya = (a3 * d2 - a2 * d3) / (ab * 2.0) - y1;
  const double yb = (a2 * c3 - a3 * c2) / ab;
  const double A = xb * xb + yb * yb - 1.0;
  const double B = 2.0 * (r1 + xa * xb + ya * yb);
  const double C = xa * xa + ya * ya - r1 * r1;
  const double r = -(std::abs(A) > 1e-6 ? (B + std::sqrt(std::max(0.0, B * B - 4.0 * A * C))) / (2.0 * A)
                                        : C / B);
  if (!std::isfinite(r)) return std::nullopt;
  return Circle{x1 + xa + xb * r, y1 + ya + yb * r, r};
}

std::optional<Circle> enclose_basis(const std::vector<Circle>& basis) {
  switch (basis.size()) {
    case 1: return basis[0];
    case 2: return enclose2(basis[0], basis[1]);
    case 3: return enclose3(basis[0], basis[1], basis[2]);
    default: return std::nullopt;
  }
}

std::optional<std::vector<Circle>> extend_basis(const std::vector<Circle>& basis, const Circle& p) {
  if (encloses_weak_all(p, basis)) return std::vector<Circle>{p};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (encloses_not(p, basis[i]) && encloses_weak_all(enclose2(basis[i], p), basis)) {
      return std::vector<Circle>{basis[i], p};
    }
  }
  for (std::size_t i = 0; i + 1 < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (encloses_not(enclose2(basis[i], basis[j]), p) &&
          encloses_not(enclose2(basis[i], p), basis[j]) &&
          encloses_not(enclose2(basis[j], p), basis[i])) {
        const auto e = enclose3(basis[i], basis[j], p);
        if (e && encloses_weak_all(*e, basis)) return std::vector<Circle>{basis[i], basis[j], p};
      }
    }
  }
  return std::nullopt;
}

// Grows r until every circle fits around the given center.
double covering_radius(double cx, double cy, std::span<const Circle> circles) {
  double r = 0.0;
  for (const auto& c : circles) r = std::max(r, std::hypot(c.cx - cx, c.cy - cy) + c.r);
  return r;
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument, "circle radius must be positive and finite");
  }
}

}  // namespace

std::vector<Circle> pack_siblings(std::span<const double> radii) {
  std::vector<Circle> circles;
  circles.reserve(radii.size());
  for (double r : radii) {
    check_radius(r);
    circles.push_back({0.0, 0.0, r});
  }
  const std::size_t n = circles.size();
  if (n == 0) return circles;
  if (n >= 2) {
    circles[0].cx = -circles[1].r;
    circles[1].cx = circles[0].r;
  }
  if (n >= 3) {
    place(circles[1], circles[0], circles[2]);

    std::vector<ChainNode> chain;
    chain.reserve(n);
    chain.push_back({0, 1, 2});
    chain.push_back({1, 2, 0});
    chain.push_back({2, 0, 1});
    std::size_t a = 0;
    std::size_t b = 1;

    for (std::size_t i = 3; i < n;) {
      place(circles[chain[a].circle], circles[chain[b].circle], circles[i]);

      // Look for the nearest front-chain circle (by chain distance) that the
      // candidate overlaps; if one exists, drop the span up to it and retry.
      std::size_t j = chain[b].next;
      std::size_t k = chain[a].prev;
      double sj = circles[chain[b].circle].r;
      double sk = circles[chain[a].circle].r;
      bool retry = false;
      do {
        if (sj <= sk) {
          if (intersects(circles[chain[j].circle], circles[i])) {
            b = j;
            chain[a].next = b;
            chain[b].prev = a;
            retry = true;
            break;
          }
          sj += circles[chain[j].circle].r;
          j = chain[j].next;
        } else {
          if (intersects(circles[chain[k].circle], circles[i])) {
            a = k;
            chain[a].next = b;
            chain[b].prev = a;
            retry = true;
            break;
          }
          sk += circles[chain[k].circle].r;
          k = chain[k].prev;
        }
      } while (j != chain[k].next);
      if (retry) continue;

      const std::size_t c = chain.size();
      chain.push_back({i, b, a});
      chain[a].next = c;
      chain[b].prev = c;
      b = c;

      // Restart from the chain pair closest to the origin.
      double best = score(circles, chain, a);
      for (std::size_t node = chain[c].next; node != b; node = chain[node].next) {
        const double s = score(circles, chain, node);
        if (s < best) {
          a = node;
          best = s;
        }
      }
      b = chain[a].next;
      ++i;
    }
  }
  const double ox = circles[0].cx;
  const double oy = circles[0].cy;
  for (auto& c : circles) {
    c.cx -= ox;
    c.cy -= oy;
  }
  return circles;
}

Circle enclosing_circle(std::span<const Circle> circles) {
  if (circles.empty()) throw Error(ErrorCode::InvalidArgument, "enclosing_circle of nothing");
  for (const auto& c : circles) {
    check_radius(c.r);
    if (!std::isfinite(c.cx) || !std::isfinite(c.cy)) {
      throw Error(ErrorCode::InvalidArgument, "circle center must be finite");
    }
  }

  // Fixed pseudo-random visiting order keeps the expected running time
  // linear while the result stays reproducible.
  std::vector<Circle> order(circles.begin(), circles.end());
  std::uint32_t lcg = 1;
  for (std::size_t i = order.size(); i > 1; --i) {
    lcg = lcg * 1664525u + 1013904223u;
    std::swap(order[i - 1], order[lcg % i]);
  }

  std::vector<Circle> basis;
  std::optional<Circle> e;
  bool failed = false;
  for (std::size_t i = 0; i < order.size();) {
    if (e && encloses_weak(*e, order[i])) {
      ++i;
      continue;
    }
    auto next = extend_basis(basis, order[i]);
    if (!next) {
      failed = true;
      break;
    }
    basis = std::move(*next);
    e = enclose_basis(basis);
    if (!e) {
      failed = true;
      break;
    }
    i = 0;
  }

  Circle result;
  if (failed || !e) {
    // Degenerate geometry: center on the bounding box and cover everything.
    double x0 = circles[0].cx - circles[0].r, x1 = circles[0].cx + circles[0].r;
    double y0 = circles[0].cy - circles[0].r, y1 = circles[0].cy + circles[0].r;
    for (const auto& c : circles) {
      x0 = std::min(x0, c.cx - c.r);
      x1 = std::max(x1, c.cx + c.r);
      y0 = std::min(y0, c.cy - c.r);
      y1 = std::max(y1, c.cy + c.r);
    }
    result = {(x0 + x1) / 2.0, (y0 + y1) / 2.0, 0.0};
  } else {
    result = *e;
  }
  // Absorb rounding so containment holds exactly as computed.
  result.r = std::max(result.r, covering_radius(result.cx, result.cy, circles));
  return result;
}

}  // namespace batchlens
