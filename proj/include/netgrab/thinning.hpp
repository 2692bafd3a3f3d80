#pragma once

#include <cstdint>

#include "netgrab/raster.hpp"

namespace netgrab {

struct Skeleton {
  BinaryImage mask;
  /// Full passes (two sub-iterations each), including the final pass that
  /// deleted nothing.
  int iterations_run = 0;
};

/// 8-neighbourhood packed as bits, bit i = neighbour i of kNeighbors8
/// (bit 0 = N, clockwise to bit 7 = NW). Off-image neighbours are 0.
std::uint8_t neighbor_bits(const BinaryImage& mask, int x, int y) noexcept;

/// Guo-Hall deletion test for a foreground pixel with the given
/// neighbourhood in sub-iteration 0 or 1.
bool guo_hall_deletable(std::uint8_t neighbors, int subiteration) noexcept;

/// Guo-Hall parallel thinning to a fixpoint. Each sub-iteration evaluates
/// every pixel against the state before it and deletes simultaneously, so
/// rows are processed concurrently.
Skeleton guo_hall_thin(const BinaryImage& mask);

namespace serial {

/// Direct rule evaluation, one pixel at a time, no lookup table.
Skeleton guo_hall_thin(const BinaryImage& mask);

}  // namespace serial
}  // namespace netgrab
