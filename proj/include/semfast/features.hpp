#pragma once

#include "semfast/error.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace semfast {

using FrameIndex = std::int64_t;

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(Point2 a, Point2 b);

/// Axis-aligned box in pixels, (x, y) is the top-left corner.
struct BBox
{
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    Point2 center() const { return {x + 0.5 * w, y + 0.5 * h}; }
    double area() const { return w * h; }
    double diagonal() const;

    friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection
{
    BBox box;
    double confidence = 0.0; ///< Raw detector score.

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Features of one input frame. `foe` and `flow_mag` describe the transition
/// from this frame to the next one and are absent on the last frame.
struct FrameRecord
{
    FrameIndex index = 0;
    std::vector<Detection> detections;
    std::optional<Point2> foe;
    std::optional<double> flow_mag;
    std::vector<double> histogram;

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct VideoMeta
{
    int width = 0;
    int height = 0;
    double fps = 0.0;
    FrameIndex frame_count = 0;

    Point2 center() const { return {0.5 * width, 0.5 * height}; }
    double diagonal() const;

    friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

struct FeatureSet
{
    VideoMeta meta;
    std::vector<FrameRecord> frames;
};

/// Appearance signature layout: per-channel colour histograms, concatenated.
inline constexpr int kHistogramChannels = 3;
inline constexpr int kHistogramBinsPerChannel = 32;

/// Tolerance on the histogram mass after normalisation.
inline constexpr double kHistogramSumTolerance = 1e-6;

/// Checks every type invariant of the data model. Throws InvariantError
/// naming the offending frame and field, or Error for meta-level problems.
void validate_features(const VideoMeta& meta, std::span<const FrameRecord> frames);

/// Reads the JSON Lines feature format. Histograms are renormalised to unit
/// mass before validation; nothing else is repaired.
FeatureSet read_features(std::istream& in);
FeatureSet load_features(const std::filesystem::path& path);

/// Writes the JSON Lines feature format. Output is byte-stable.
void write_features(const VideoMeta& meta, std::span<const FrameRecord> frames, std::ostream& out);
void write_features(const VideoMeta& meta, std::span<const FrameRecord> frames,
                    const std::filesystem::path& path);

// Synthetic scenarios --------------------------------------------------------

/// Half-open frame range [start, end) in which a face is planted.
struct FaceBurst
{
    FrameIndex start = 0;
    FrameIndex end = 0;
};

struct ScenarioParams
{
    FrameIndex frame_count = 1000;
    int width = 640;
    int height = 480;
    double fps = 30.0;
    std::vector<FaceBurst> bursts; ///< sorted, non-overlapping
    double foe_noise = 0.0;        ///< std-dev of the FOE around the image centre, px
    double flow_mean = 4.0;        ///< px per transition
    double flow_noise = 0.5;
    double confidence_min = 40.0;
    double confidence_max = 100.0;
    double face_size_min = 90.0; ///< range of the per-burst peak face side, px
    double face_size_max = 140.0;
    double false_positive_rate = 0.0; ///< isolated low-confidence detections outside bursts
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deterministic feature generator. Frames inside a burst carry exactly one
/// face whose size follows a bell envelope over the burst; all other frames
/// carry no detections unless false_positive_rate > 0.
FeatureSet synth_features(const ScenarioParams& params);

/// Random scenario with 2 to 5 bursts covering a fraction of the frames drawn
/// uniformly from [min_coverage, max_coverage].
ScenarioParams random_scenario(std::uint64_t seed, FrameIndex frame_count, double min_coverage,
                               double max_coverage);

} // namespace semfast
