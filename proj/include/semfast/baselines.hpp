#pragma once

#include "semfast/features.hpp"

#include <span>
#include <vector>

namespace semfast {

/// Every F_d-th frame starting at 0.
std::vector<FrameIndex> naive_sample(FrameIndex frame_count, int desired);

/// The floor(n / F_d) highest-scoring frames (ties go to the lower index),
/// returned in temporal order.
std::vector<FrameIndex> naive_faces_sample(std::span<const double> scores, int desired);

} // namespace semfast
