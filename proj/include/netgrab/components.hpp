#pragma once

#include "netgrab/raster.hpp"

namespace netgrab {

enum class Connectivity { Four = 4, Eight = 8 };

/// Label foreground components. Labels are 1..component_count, assigned in
/// the raster order in which each component is first encountered.
LabelImage connected_components(const BinaryImage& image, Connectivity connectivity = Connectivity::Eight);

}  // namespace netgrab
