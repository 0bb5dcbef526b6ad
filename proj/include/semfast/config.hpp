#pragma once

#include "semfast/semantic.hpp"
#include "semfast/skipgraph.hpp"
#include "semfast/speedup.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace semfast {

/// Every tunable of a run. Published defaults: F_d = 10, tau_max = 100,
/// epsilon = 1, theta = 10, zeta = 60, sigma = max(W/2, H/2). The other
/// defaults are ours (see README).
struct RunConfig
{
    // Scoring and segmentation.
    std::optional<double> sigma; ///< unset: max(W/2, H/2)
    double theta = 10.0;
    double zeta = 60.0;
    int persistence_window = 15;
    int persistence_min_hits = 5;
    double persistence_radius = 1.0;
    bool normalize_area = false;
    std::optional<double> smoothing_sigma;     ///< frames; unset: fps
    std::optional<FrameIndex> min_segment_len; ///< unset: 2 * speedup

    // Speed-up allocation.
    int speedup = 10;
    double lambda1 = 8.0;
    double lambda2 = 40.0;

    // Frame graph.
    int tau_max = 100;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double eta = 1.0;
    double epsilon = 1.0;

    std::string features;
    std::uint64_t seed = 0;

    /// Checks everything that does not depend on the video.
    void validate() const;

    ProfileParams profile_params(const VideoMeta& meta) const;
    SpeedupConfig speedup_config() const;
    GraphParams graph_params() const;
};

/// Applies the keys of a JSON object on top of `base`. Unknown keys and
/// wrongly typed values are errors.
RunConfig parse_config(std::string_view json_text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Every key, including resolved-later ones as null.
std::string config_to_json(const RunConfig& cfg);

} // namespace semfast
