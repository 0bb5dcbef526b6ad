#include "semfast/semantic.hpp"

#include "format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace semfast {

void ScoreParams::validate() const
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ConfigError("sigma must be positive");
    if (!std::isfinite(theta) || !std::isfinite(zeta) || theta > zeta)
        throw ConfigError("theta must not exceed zeta");
    if (persistence_min_hits < 1 || persistence_window < persistence_min_hits)
        throw ConfigError("persistence_window >= persistence_min_hits >= 1 is required");
    if (!(persistence_radius >= 0.0))
        throw ConfigError("persistence_radius must be non-negative");
}

ScoreParams ScoreParams::for_video(const VideoMeta& meta)
{
    ScoreParams p;
    p.sigma = std::max(0.5 * meta.width, 0.5 * meta.height);
    return p;
}

std::string_view to_string(SegmentLabel label)
{
    return label == SegmentLabel::semantic ? "semantic" : "non_semantic";
}

double centrality_weight(Point2 offset, double sigma)
{
    const double var = sigma * sigma;
    const double r2 = offset.x * offset.x + offset.y * offset.y;
    return std::exp(-r2 / (2.0 * var)) / (2.0 * std::numbers::pi * var);
}

double frame_score(const FrameRecord& frame, const VideoMeta& meta, const ScoreParams& params)
{
    const Point2 center = meta.center();
    const double area_scale =
        params.normalize_area ? 1.0 / (double(meta.width) * double(meta.height)) : 1.0;
    double score = 0.0;
    for (const auto& d : frame.detections) {
        const Point2 c = d.box.center();
        score += d.confidence * centrality_weight({c.x - center.x, c.y - center.y}, params.sigma) *
                 d.box.area() * area_scale;
    }
    return score;
}

std::vector<FrameRecord> filter_detections(std::span<const FrameRecord> frames,
                                           const ScoreParams& params)
{
    params.validate();
    const auto n = static_cast<std::ptrdiff_t>(frames.size());
    const std::ptrdiff_t before = (params.persistence_window - 1) / 2;

    auto supported = [&](std::ptrdiff_t t, const Detection& d) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - before);
        const std::ptrdiff_t hi = std::min(n - 1, t - before + params.persistence_window - 1);
        const Point2 c = d.box.center();
        const double radius = params.persistence_radius * d.box.diagonal();
        int hits = 0;
        for (std::ptrdiff_t u = lo; u <= hi; ++u) {
            const auto& dets = frames[static_cast<std::size_t>(u)].detections;
            const bool hit = std::any_of(dets.begin(), dets.end(), [&](const Detection& e) {
                return e.confidence >= params.theta && distance(e.box.center(), c) <= radius;
            });
            if (hit && ++hits >= params.persistence_min_hits)
                return true;
        }
        return false;
    };

    std::vector<FrameRecord> out(frames.begin(), frames.end());
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        const auto& src = frames[static_cast<std::size_t>(t)].detections;
        auto& dst = out[static_cast<std::size_t>(t)].detections;
        dst.clear();
        for (const auto& d : src) {
            if (d.confidence < params.theta)
                continue;
            if (d.confidence >= params.zeta || supported(t, d))
                dst.push_back(d);
        }
    }
    return out;
}

std::vector<double> smooth_scores(std::span<const double> raw, double kernel_sigma)
{
    if (raw.empty())
        throw Error("cannot smooth an empty score vector");
    if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma))
        throw ConfigError("kernel_sigma must be positive");

    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * kernel_sigma));
    std::vector<double> kernel(static_cast<std::size_t>(radius + 1));
    for (std::ptrdiff_t k = 0; k <= radius; ++k)
        kernel[k] = std::exp(-0.5 * double(k * k) / (kernel_sigma * kernel_sigma));

    const auto n = static_cast<std::ptrdiff_t>(raw.size());
    std::vector<double> out(raw.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - radius);
        const std::ptrdiff_t hi = std::min(n - 1, i + radius);
        double acc = 0.0;
        double norm = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            const double w = kernel[static_cast<std::size_t>(std::abs(j - i))];
            acc += w * raw[j];
            norm += w;
        }
        out[i] = acc / norm;
    }
    return out;
}

double segmentation_threshold(std::span<const double> smoothed)
{
    if (smoothed.size() < 3)
        throw Error("segmentation threshold needs at least 3 frames");

    double min_peak = std::numeric_limits<double>::infinity();
    double max_peak = -std::numeric_limits<double>::infinity();
    int peaks = 0;
    const std::size_t n = smoothed.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(smoothed[i] > smoothed[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && smoothed[j + 1] == smoothed[i])
            ++j;
        if (j + 1 < n && smoothed[j + 1] < smoothed[i]) {
            min_peak = std::min(min_peak, smoothed[i]);
            max_peak = std::max(max_peak, smoothed[i]);
            ++peaks;
        }
        i = j + 1;
    }
    if (peaks >= 2)
        return 0.5 * (min_peak + max_peak);
    const auto [lo, hi] = std::minmax_element(smoothed.begin(), smoothed.end());
    return 0.5 * (*lo + *hi);
}

std::vector<Segment> segment_video(std::span<const double> smoothed, double threshold,
                                   FrameIndex min_segment_len)
{
    if (min_segment_len < 1)
        throw ConfigError("min_segment_len must be at least 1");
    std::vector<Segment> runs;
    const auto n = static_cast<FrameIndex>(smoothed.size());
    for (FrameIndex i = 0; i < n; ++i) {
        const auto label =
            smoothed[i] > threshold ? SegmentLabel::semantic : SegmentLabel::non_semantic;
        if (!runs.empty() && runs.back().label == label)
            runs.back().end = i + 1;
        else
            runs.push_back({i, i + 1, label});
    }

    while (runs.size() > 1) {
        std::size_t shortest = runs.size();
        for (std::size_t k = 0; k < runs.size(); ++k) {
            if (runs[k].length() < min_segment_len &&
                (shortest == runs.size() || runs[k].length() < runs[shortest].length()))
                shortest = k;
        }
        if (shortest == runs.size())
            break;

        std::size_t into;
        if (shortest == 0)
            into = 1;
        else if (shortest + 1 == runs.size())
            into = shortest - 1;
        else
            into = runs[shortest + 1].length() > runs[shortest - 1].length() ? shortest + 1
                                                                              : shortest - 1;
        runs[shortest].label = runs[into].label;

        std::vector<Segment> merged;
        merged.reserve(runs.size());
        for (const auto& r : runs) {
            if (!merged.empty() && merged.back().label == r.label)
                merged.back().end = r.end;
            else
                merged.push_back(r);
        }
        runs = std::move(merged);
    }
    return runs;
}

FrameIndex total_length(std::span<const Segment> segments, SegmentLabel label)
{
    FrameIndex total = 0;
    for (const auto& s : segments)
        if (s.label == label)
            total += s.length();
    return total;
}

SemanticProfile build_profile(const FeatureSet& features, const ProfileParams& params)
{
    params.score.validate();
    const auto filtered = filter_detections(features.frames, params.score);
    SemanticProfile profile;
    profile.raw_scores.reserve(filtered.size());
    for (const auto& f : filtered)
        profile.raw_scores.push_back(frame_score(f, features.meta, params.score));
    profile.smoothed_scores = smooth_scores(profile.raw_scores, params.kernel_sigma);
    profile.threshold = segmentation_threshold(profile.smoothed_scores);
    profile.segments =
        segment_video(profile.smoothed_scores, profile.threshold, params.min_segment_len);
    return profile;
}

void write_profile_csv(const SemanticProfile& profile, std::ostream& out)
{
    out << "index,raw,smoothed,threshold,label\n";
    std::size_t seg = 0;
    for (std::size_t i = 0; i < profile.raw_scores.size(); ++i) {
        while (seg + 1 < profile.segments.size() &&
               profile.segments[seg].end <= static_cast<FrameIndex>(i))
            ++seg;
        out << i << ',' << detail::fmt(profile.raw_scores[i]) << ','
            << detail::fmt(profile.smoothed_scores[i]) << ',' << detail::fmt(profile.threshold)
            << ',' << to_string(profile.segments[seg].label) << '\n';
    }
}

void write_segments_csv(std::span<const Segment> segments, std::ostream& out)
{
    out << "start,end,label\n";
    for (const auto& s : segments)
        out << s.start << ',' << s.end << ',' << to_string(s.label) << '\n';
}

} // namespace semfast
