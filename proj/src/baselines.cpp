#include "semfast/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace semfast {

std::vector<FrameIndex> naive_sample(FrameIndex frame_count, int desired)
{
    if (desired < 1)
        throw ConfigError("speed-up must be at least 1");
    std::vector<FrameIndex> out;
    for (FrameIndex i = 0; i < frame_count; i += desired)
        out.push_back(i);
    return out;
}

std::vector<FrameIndex> naive_faces_sample(std::span<const double> scores, int desired)
{
    if (desired < 1)
        throw ConfigError("speed-up must be at least 1");
    const std::size_t keep = scores.size() / static_cast<std::size_t>(desired);
    std::vector<FrameIndex> order(scores.size());
    std::iota(order.begin(), order.end(), FrameIndex{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](FrameIndex a, FrameIndex b) {
                          const double sa = scores[static_cast<std::size_t>(a)];
                          const double sb = scores[static_cast<std::size_t>(b)];
                          return sa > sb || (sa == sb && a < b);
                      });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    return order;
}

} // namespace semfast
