#pragma once

#include "semfast/semantic.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace semfast {

/// Search settings for the two-class speed-up allocation.
///
/// The lambda defaults are not taken from any published value. They were
/// picked so that, for videos of a few thousand frames, the allocator
/// actually slows down semantic parts while keeping the overall rate on
/// target. See README for the rationale.
struct SpeedupConfig
{
    int desired = 10;      ///< overall speed-up F_d
    double lambda1 = 8.0;  ///< weight of |F_ns - F_s|
    double lambda2 = 40.0; ///< weight of F_s
    int max_speedup = 100; ///< upper bound of the F_ns search, normally tau_max

    void validate() const;
};

struct SpeedupPlan
{
    int semantic = 1;     ///< F_s
    int non_semantic = 1; ///< F_ns
    double objective = 0.0;
    double deviation = 0.0; ///< D at the chosen pair
    FrameIndex semantic_length = 0;
    FrameIndex non_semantic_length = 0;

    friend bool operator==(const SpeedupPlan&, const SpeedupPlan&) = default;
};

/// |(L_s + L_ns)/F_d - L_s/F_s - L_ns/F_ns|, evaluated from an exact integer
/// numerator so the only rounding is the final division.
double deviation(int non_semantic, int semantic, FrameIndex semantic_length,
                 FrameIndex non_semantic_length, int desired);

/// D + lambda1 * |F_ns - F_s| + lambda2 * |F_s|
double allocation_objective(int semantic, int non_semantic, FrameIndex semantic_length,
                            FrameIndex non_semantic_length, const SpeedupConfig& cfg);

/// Exhaustive search of 1 <= F_s <= F_d <= F_ns <= max_speedup. Ties go to
/// the smaller D, then the smaller F_s, then the smaller F_ns.
SpeedupPlan optimize_speedups(FrameIndex semantic_length, FrameIndex non_semantic_length,
                              const SpeedupConfig& cfg);

/// Aggregates segment lengths per label. Without any semantic frame the
/// search is skipped and both rates are set to F_d.
SpeedupPlan plan_for_segments(std::span<const Segment> segments, const SpeedupConfig& cfg);

struct SurfaceCell
{
    int semantic;
    int non_semantic;
    double deviation;
    double objective;
};

/// Every feasible grid cell, F_s-major.
std::vector<SurfaceCell> objective_surface(FrameIndex semantic_length,
                                           FrameIndex non_semantic_length,
                                           const SpeedupConfig& cfg);

/// F_s,F_ns,D,objective
void write_surface_csv(std::span<const SurfaceCell> cells, std::ostream& out);

} // namespace semfast
