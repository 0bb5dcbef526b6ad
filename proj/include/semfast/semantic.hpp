#pragma once

#include "semfast/features.hpp"

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace semfast {

/// Detection filtering and scoring parameters.
struct ScoreParams
{
    double sigma = 1.0;  ///< spread of the centrality Gaussian, px
    double theta = 10.0; ///< detections below this confidence are dropped
    double zeta = 60.0;  ///< detections at or above this confidence are always kept
    int persistence_window = 15;
    int persistence_min_hits = 5;
    double persistence_radius = 1.0; ///< centre-distance gate, in bbox diagonals
    bool normalize_area = false;     ///< divide ROI area by W*H

    void validate() const;

    /// Defaults with sigma = max(W/2, H/2).
    static ScoreParams for_video(const VideoMeta& meta);
};

enum class SegmentLabel { non_semantic, semantic };

std::string_view to_string(SegmentLabel label);

/// Half-open frame range [start, end).
struct Segment
{
    FrameIndex start = 0;
    FrameIndex end = 0;
    SegmentLabel label = SegmentLabel::non_semantic;

    FrameIndex length() const { return end - start; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct SemanticProfile
{
    std::vector<double> raw_scores;
    std::vector<double> smoothed_scores;
    double threshold = 0.0;
    std::vector<Segment> segments;
};

/// Zero-mean isotropic 2-D normal density evaluated at `offset`.
double centrality_weight(Point2 offset, double sigma);

/// Sum over ROIs of confidence * centrality * area. Detections are used as
/// given; filter them first.
double frame_score(const FrameRecord& frame, const VideoMeta& meta, const ScoreParams& params);

/// Drops detections below theta, keeps those at or above zeta, and keeps a
/// mid-confidence detection only when enough frames in the window around it
/// hold a detection (confidence >= theta) whose centre lies within
/// persistence_radius bbox diagonals of its centre. The frame itself counts.
std::vector<FrameRecord> filter_detections(std::span<const FrameRecord> frames,
                                           const ScoreParams& params);

/// Gaussian convolution truncated at 3 sigma. The kernel is renormalised at
/// the edges so a constant signal is a fixed point.
std::vector<double> smooth_scores(std::span<const double> raw, double kernel_sigma);

/// Mean of the lowest and highest local maxima. A flat-topped maximum counts
/// as one peak. With fewer than two peaks, falls back to (min + max) / 2.
double segmentation_threshold(std::span<const double> smoothed);

/// Labels frames above `threshold` semantic, then absorbs runs shorter than
/// `min_segment_len` into their longer neighbour (ties go to the preceding
/// one), shortest run first.
std::vector<Segment> segment_video(std::span<const double> smoothed, double threshold,
                                   FrameIndex min_segment_len);

FrameIndex total_length(std::span<const Segment> segments, SegmentLabel label);

struct ProfileParams
{
    ScoreParams score;
    double kernel_sigma = 30.0;
    FrameIndex min_segment_len = 20;
};

/// filter -> score -> smooth -> threshold -> segment.
SemanticProfile build_profile(const FeatureSet& features, const ProfileParams& params);

/// index,raw,smoothed,threshold,label
void write_profile_csv(const SemanticProfile& profile, std::ostream& out);

/// start,end,label
void write_segments_csv(std::span<const Segment> segments, std::ostream& out);

} // namespace semfast
