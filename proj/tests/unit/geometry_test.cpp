#include <doctest.h>

#include <random>

#include "batchlens/error.hpp"
#include "batchlens/geometry.hpp"
#include "test_support.hpp"

using namespace batchlens;

namespace {

double dist(const Circle& a, const Circle& b) { return std::hypot(a.cx - b.cx, a.cy - b.cy); }

}  // namespace

TEST_CASE("single circle sits at the origin") {
  const std::vector<double> r{1.0};
  CHECK(pack_siblings(r) == std::vector<Circle>{{0, 0, 1}});
  CHECK(pack_siblings(std::vector<double>{}).empty());
}

TEST_CASE("two circles are tangent") {
  const auto c = pack_siblings(std::vector<double>{1, 1});
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Circle{0, 0, 1});
  CHECK(std::abs(dist(c[0], c[1]) - 2.0) <= 1e-9);
}

TEST_CASE("three unit circles form a tangent triangle") {
  const auto c = pack_siblings(std::vector<double>{1, 1, 1});
  REQUIRE(c.size() == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) CHECK(std::abs(dist(c[i], c[j]) - 2.0) <= 1e-6);
  }
}

TEST_CASE("random packings never overlap and are deterministic") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> radii(1 + rng() % 60);
    for (auto& r : radii) r = radius(rng);
    const auto c = pack_siblings(radii);
    REQUIRE(c.size() == radii.size());
    CHECK(c[0].cx == 0.0);
    CHECK(c[0].cy == 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c[i].r == radii[i]);
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        const double overlap = c[i].r + c[j].r - dist(c[i], c[j]);
        CHECK(overlap <= 1e-6 * (c[i].r + c[j].r));
      }
    }
    CHECK(pack_siblings(radii) == c);
  }
}

TEST_CASE("enclosing circle of trivial inputs") {
  const std::vector<Circle> one{{3, 4, 2}};
  CHECK(enclosing_circle(one) == Circle{3, 4, 2});
  const std::vector<Circle> two{{-1, 0, 1}, {1, 0, 1}};
  const auto e = enclosing_circle(two);
  CHECK(e.r == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(e.cx) <= 1e-12);
  CHECK(std::abs(e.cy) <= 1e-12);
  CHECK_THROWS_AS(enclosing_circle(std::span<const Circle>{}), Error);
  const std::vector<Circle> nested{{0, 0, 5}, {1, 1, 1}};
  CHECK(enclosing_circle(nested) == Circle{0, 0, 5});
}

TEST_CASE("enclosing circle matches a brute-force search oracle") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> pos(-20, 20);
  std::uniform_real_distribution<double> rad(0.5, 8);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Circle> cs(5);
    for (auto& c : cs) c = {pos(rng), pos(rng), rad(rng)};
    const auto e = enclosing_circle(cs);
    for (const auto& c : cs) CHECK(dist(e, c) + c.r <= e.r + 1e-6);
    const double oracle = batchlens::testing::brute_enclosing_radius(cs);
    CHECK(e.r <= oracle * (1 + 1e-4));
    CHECK(e.r >= oracle * (1 - 1e-9));
  }
}
