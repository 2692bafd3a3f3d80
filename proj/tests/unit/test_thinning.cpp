#include <doctest.h>

#include "netgrab/thinning.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace netgrab;

namespace {

BinaryImage window_from_bits(std::uint8_t bits) {
  BinaryImage b(3, 3);
  b(1, 1) = 1;
  for (int i = 0; i < 8; ++i) {
    if ((bits >> i) & 1) b(1 + kNeighbors8[static_cast<std::size_t>(i)].x, 1 + kNeighbors8[static_cast<std::size_t>(i)].y) = 1;
  }
  return b;
}

bool is_subset(const BinaryImage& a, const BinaryImage& b) {
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a(x, y) && !b(x, y)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("neighbor bits follow the clockwise-from-north order") {
  BinaryImage b(3, 3);
  b(1, 0) = 1;  // N
  b(2, 1) = 1;  // E
  b(0, 0) = 1;  // NW
  CHECK(neighbor_bits(b, 1, 1) == 0b10000101);
  CHECK(neighbor_bits(b, 0, 0) == 0b00000100);  // E neighbour of the corner
}

TEST_CASE("lookup table agrees with the written-out rule on all 256 windows") {
  for (int bits = 0; bits < 256; ++bits) {
    const BinaryImage w = window_from_bits(static_cast<std::uint8_t>(bits));
    for (int sub = 0; sub < 2; ++sub) {
      CHECK_MESSAGE(guo_hall_deletable(static_cast<std::uint8_t>(bits), sub) == oracle::guo_hall_deletable(w, 1, 1, sub),
                    "bits=" << bits << " sub=" << sub);
    }
  }
}

TEST_CASE("isolated pixel survives") {
  BinaryImage b(5, 5);
  b(2, 2) = 1;
  const Skeleton s = guo_hall_thin(b);
  CHECK(s.mask == b);
  CHECK(s.iterations_run == 1);
}

TEST_CASE("one pixel wide line is already thin") {
  BinaryImage b(12, 5);
  for (int x = 1; x < 11; ++x) b(x, 2) = 1;
  const Skeleton s = guo_hall_thin(b);
  CHECK(s.mask == b);
  CHECK(s.iterations_run == 1);
  CHECK(serial::guo_hall_thin(b).iterations_run == 1);
}

TEST_CASE("solid 3x20 bar thins to its middle row") {
  BinaryImage b(22, 5);
  for (int y = 1; y <= 3; ++y) {
    for (int x = 1; x <= 20; ++x) b(x, y) = 1;
  }
  BinaryImage expect(22, 5);
  for (int x = 2; x <= 19; ++x) expect(x, 2) = 1;
  const Skeleton s = guo_hall_thin(b);
  CHECK(s.mask == expect);
  CHECK(serial::guo_hall_thin(b).mask == expect);
  CHECK(s.iterations_run == 2);
}

TEST_CASE("empty and full images") {
  const BinaryImage empty(6, 4);
  CHECK(guo_hall_thin(empty).mask == empty);
  const Skeleton full = guo_hall_thin(BinaryImage(9, 9, 1));
  CHECK(full.mask.count() >= 1);
  CHECK(oracle::count_components(full.mask) == 1);
}

TEST_CASE("thinning properties on random blobs") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const BinaryImage b = testsupport::perlin_blobs(64, 64, seed, 12.0);
    const Skeleton s = guo_hall_thin(b);
    CHECK(is_subset(s.mask, b));
    CHECK(oracle::count_components(s.mask) == oracle::count_components(b));
    CHECK(guo_hall_thin(s.mask).mask == s.mask);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (!s.mask(x, y)) continue;
        CHECK_FALSE(oracle::guo_hall_deletable(s.mask, x, y, 0));
        CHECK_FALSE(oracle::guo_hall_deletable(s.mask, x, y, 1));
      }
    }
    const Skeleton ref = serial::guo_hall_thin(b);
    CHECK(ref.mask == s.mask);
    CHECK(ref.iterations_run == s.iterations_run);
  }
}

TEST_CASE("thinning touches the image border safely") {
  const BinaryImage b = testsupport::random_mask(17, 9, 0.7, 3);
  const Skeleton s = guo_hall_thin(b);
  CHECK(serial::guo_hall_thin(b).mask == s.mask);
  CHECK(oracle::count_components(s.mask) == oracle::count_components(b));
}
