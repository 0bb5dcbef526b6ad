#include "semfast/speedup.hpp"

#include "format.hpp"

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <tuple>

namespace semfast {

void SpeedupConfig::validate() const
{
    if (desired < 1 || max_speedup < desired)
        throw ConfigError("speed-up must satisfy 1 <= F_d <= max_speedup");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) ||
        !std::isfinite(lambda2))
        throw ConfigError("lambda1 and lambda2 must be finite and non-negative");
}

double deviation(int non_semantic, int semantic, FrameIndex semantic_length,
                 FrameIndex non_semantic_length, int desired)
{
    if (semantic <= 0 || non_semantic <= 0 || desired <= 0)
        throw Error("speed-ups must be positive");
    if (semantic_length < 0 || non_semantic_length < 0)
        throw Error("segment lengths must be non-negative");
    // Common denominator F_d * F_s * F_ns.
    const std::int64_t fs = semantic;
    const std::int64_t fns = non_semantic;
    const std::int64_t fd = desired;
    const std::int64_t total = semantic_length + non_semantic_length;
    const std::int64_t numerator =
        total * fs * fns - fd * (semantic_length * fns + non_semantic_length * fs);
    return static_cast<double>(std::llabs(numerator)) / static_cast<double>(fd * fs * fns);
}

double allocation_objective(int semantic, int non_semantic, FrameIndex semantic_length,
                            FrameIndex non_semantic_length, const SpeedupConfig& cfg)
{
    const double d =
        deviation(non_semantic, semantic, semantic_length, non_semantic_length, cfg.desired);
    return d + cfg.lambda1 * std::abs(non_semantic - semantic) + cfg.lambda2 * std::abs(semantic);
}

SpeedupPlan optimize_speedups(FrameIndex semantic_length, FrameIndex non_semantic_length,
                              const SpeedupConfig& cfg)
{
    cfg.validate();
    if (semantic_length < 0 || non_semantic_length < 0)
        throw Error("segment lengths must be non-negative");
    if (semantic_length + non_semantic_length == 0)
        throw Error("cannot allocate speed-ups for an empty video");

    SpeedupPlan best;
    bool have = false;
    for (int fs = 1; fs <= cfg.desired; ++fs) {
        for (int fns = cfg.desired; fns <= cfg.max_speedup; ++fns) {
            const double d =
                deviation(fns, fs, semantic_length, non_semantic_length, cfg.desired);
            const double obj = d + cfg.lambda1 * (fns - fs) + cfg.lambda2 * fs;
            if (!have || std::tie(obj, d, fs, fns) < std::tie(best.objective, best.deviation,
                                                               best.semantic, best.non_semantic)) {
                best.semantic = fs;
                best.non_semantic = fns;
                best.objective = obj;
                best.deviation = d;
                have = true;
            }
        }
    }
    best.semantic_length = semantic_length;
    best.non_semantic_length = non_semantic_length;
    return best;
}

SpeedupPlan plan_for_segments(std::span<const Segment> segments, const SpeedupConfig& cfg)
{
    cfg.validate();
    const FrameIndex ls = total_length(segments, SegmentLabel::semantic);
    const FrameIndex lns = total_length(segments, SegmentLabel::non_semantic);
    if (ls + lns == 0)
        throw Error("cannot allocate speed-ups for an empty video");
    if (ls > 0)
        return optimize_speedups(ls, lns, cfg);
    SpeedupPlan plan;
    plan.semantic = cfg.desired;
    plan.non_semantic = cfg.desired;
    plan.deviation = deviation(cfg.desired, cfg.desired, ls, lns, cfg.desired);
    plan.objective = allocation_objective(cfg.desired, cfg.desired, ls, lns, cfg);
    plan.semantic_length = ls;
    plan.non_semantic_length = lns;
    return plan;
}

std::vector<SurfaceCell> objective_surface(FrameIndex semantic_length,
                                           FrameIndex non_semantic_length,
                                           const SpeedupConfig& cfg)
{
    cfg.validate();
    std::vector<SurfaceCell> cells;
    cells.reserve(static_cast<std::size_t>(cfg.desired) *
                  static_cast<std::size_t>(cfg.max_speedup - cfg.desired + 1));
    for (int fs = 1; fs <= cfg.desired; ++fs) {
        for (int fns = cfg.desired; fns <= cfg.max_speedup; ++fns) {
            const double d =
                deviation(fns, fs, semantic_length, non_semantic_length, cfg.desired);
            cells.push_back({fs, fns, d, d + cfg.lambda1 * (fns - fs) + cfg.lambda2 * fs});
        }
    }
    return cells;
}

void write_surface_csv(std::span<const SurfaceCell> cells, std::ostream& out)
{
    out << "F_s,F_ns,D,objective\n";
    for (const auto& c : cells)
        out << c.semantic << ',' << c.non_semantic << ',' << detail::fmt(c.deviation) << ','
            << detail::fmt(c.objective) << '\n';
}

} // namespace semfast
