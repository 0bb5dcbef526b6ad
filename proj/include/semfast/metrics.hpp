#pragma once

#include "semfast/features.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace semfast {

struct SelectionReport
{
    std::vector<FrameIndex> indices;
    double semantic_amount = 0.0;
    std::optional<double> jitter_amount; ///< needs at least three frames
    std::optional<double> jitter_improvement_pct;
    double achieved_speedup = 0.0;
    double speedup_deviation = 0.0;
    double deviation_pct_of_worst = 0.0;
};

/// Throws unless `indices` is strictly increasing inside [0, frame_count).
void check_selection(std::span<const FrameIndex> indices, FrameIndex frame_count);

double semantic_amount(std::span<const FrameIndex> indices, std::span<const double> scores);

/// FOE of each output transition (i_t, i_t+1): the mean of the per-frame FOEs
/// over [i_t, i_t+1). A missing FOE counts as the image centre.
std::vector<Point2> transition_foes(std::span<const FrameIndex> indices,
                                    std::span<const FrameRecord> frames, const VideoMeta& meta);

/// Mean distance between successive transition FOEs. Needs two or more.
double jitter_from_foes(std::span<const Point2> foes);

double jitter_amount(std::span<const FrameIndex> indices, std::span<const FrameRecord> frames,
                     const VideoMeta& meta);

/// 100 * (1 - jitter / diagonal), clamped to [0, 100].
double jitter_improvement(double jitter, const VideoMeta& meta);

struct SpeedupDeviation
{
    double deviation = 0.0;
    double pct_of_worst = 0.0;
};

/// |n / |indices| - F_d| and its complement relative to |tau_max - F_d|,
/// as a percentage clamped to [0, 100].
SpeedupDeviation speedup_deviation(std::span<const FrameIndex> indices, FrameIndex frame_count,
                                   int desired, int tau_max);

/// All metrics. When `pairwise_foes` is given (one FOE per output transition,
/// measured between the selected frames) it replaces the per-frame proxy.
SelectionReport evaluate_selection(std::span<const FrameIndex> indices,
                                   std::span<const double> scores, const FeatureSet& features,
                                   int desired, int tau_max,
                                   std::optional<std::span<const Point2>> pairwise_foes = {});

/// Reads `from,to,foe_x,foe_y` rows (with header) and checks that they match
/// the consecutive pairs of `indices`.
std::vector<Point2> read_pairwise_foes(std::istream& in, std::span<const FrameIndex> indices);

/// from,to,foe_x,foe_y
void write_transition_foes(std::span<const FrameIndex> indices, std::span<const Point2> foes,
                           std::ostream& out);

/// Newline-separated frame indices.
std::vector<FrameIndex> read_indices(std::istream& in);
void write_indices(std::span<const FrameIndex> indices, std::ostream& out);

std::string report_csv_header();
std::string report_csv_row(const std::string& label, FrameIndex frame_count,
                           const SelectionReport& report);

} // namespace semfast
