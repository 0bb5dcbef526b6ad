#include "semfast/features.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace semfast {

using nlohmann::json;
using nlohmann::ordered_json;

double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double BBox::diagonal() const
{
    return std::hypot(w, h);
}

double VideoMeta::diagonal() const
{
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

namespace {

void check_finite(double v, FrameIndex frame, const char* field)
{
    if (!std::isfinite(v))
        throw InvariantError(frame, field, std::string(field) + " is not finite");
}

void validate_meta(const VideoMeta& meta)
{
    if (meta.width <= 0 || meta.height <= 0)
        throw Error("width and height must be positive");
    if (!std::isfinite(meta.fps) || meta.fps <= 0.0)
        throw Error("fps must be positive");
    if (meta.frame_count <= 0)
        throw Error("frame_count must be positive");
}

void validate_frame(const VideoMeta& meta, const FrameRecord& f, std::size_t histogram_size)
{
    for (const auto& d : f.detections) {
        check_finite(d.confidence, f.index, "confidence");
        const auto& b = d.box;
        check_finite(b.x, f.index, "x");
        check_finite(b.y, f.index, "y");
        check_finite(b.w, f.index, "w");
        check_finite(b.h, f.index, "h");
        if (b.w <= 0.0 || b.h <= 0.0)
            throw InvariantError(f.index, "detections", "bbox must have positive size");
        if (b.x < 0.0 || b.y < 0.0 || b.x + b.w > meta.width || b.y + b.h > meta.height)
            throw InvariantError(f.index, "detections", "bbox outside frame bounds");
    }
    if (f.foe) {
        check_finite(f.foe->x, f.index, "foe");
        check_finite(f.foe->y, f.index, "foe");
    }
    if (f.flow_mag) {
        check_finite(*f.flow_mag, f.index, "flow_mag");
        if (*f.flow_mag < 0.0)
            throw InvariantError(f.index, "flow_mag", "flow_mag must be non-negative");
    }
    if (f.histogram.empty() || f.histogram.size() % kHistogramChannels != 0)
        throw InvariantError(f.index, "histogram",
                             "histogram length must be a positive multiple of " +
                                 std::to_string(kHistogramChannels));
    if (f.histogram.size() != histogram_size)
        throw InvariantError(f.index, "histogram", "histogram length differs from frame 0");
    double sum = 0.0;
    for (double v : f.histogram) {
        check_finite(v, f.index, "histogram");
        if (v < 0.0)
            throw InvariantError(f.index, "histogram", "histogram entries must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kHistogramSumTolerance)
        throw InvariantError(f.index, "histogram", "histogram does not sum to 1");
}

// JSON field access with line-numbered parse errors.

const json& require(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(line, std::string("missing field '") + key + "'");
    return *it;
}

double as_number(const json& v, const char* key, std::size_t line)
{
    if (!v.is_number())
        throw ParseError(line, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const char* key, std::size_t line)
{
    if (!v.is_number_integer())
        throw ParseError(line, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

VideoMeta parse_meta(const json& j, std::size_t line)
{
    if (!j.is_object())
        throw ParseError(line, "meta line must be a JSON object");
    VideoMeta meta;
    const auto width = as_integer(require(j, "width", line), "width", line);
    const auto height = as_integer(require(j, "height", line), "height", line);
    if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20))
        throw Error("width and height must be positive");
    meta.width = static_cast<int>(width);
    meta.height = static_cast<int>(height);
    meta.fps = as_number(require(j, "fps", line), "fps", line);
    meta.frame_count = as_integer(require(j, "frame_count", line), "frame_count", line);
    validate_meta(meta);
    return meta;
}

FrameRecord parse_frame(const json& j, std::size_t line)
{
    if (!j.is_object())
        throw ParseError(line, "frame line must be a JSON object");
    FrameRecord f;
    f.index = as_integer(require(j, "index", line), "index", line);

    if (auto it = j.find("detections"); it != j.end() && !it->is_null()) {
        if (!it->is_array())
            throw ParseError(line, "field 'detections' must be an array");
        for (const auto& d : *it) {
            if (!d.is_object())
                throw ParseError(line, "detection must be an object");
            Detection det;
            det.box.x = as_number(require(d, "x", line), "x", line);
            det.box.y = as_number(require(d, "y", line), "y", line);
            det.box.w = as_number(require(d, "w", line), "w", line);
            det.box.h = as_number(require(d, "h", line), "h", line);
            det.confidence = as_number(require(d, "confidence", line), "confidence", line);
            f.detections.push_back(det);
        }
    }

    if (auto it = j.find("foe"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 2)
            throw ParseError(line, "field 'foe' must be [x, y] or null");
        f.foe = Point2{as_number((*it)[0], "foe", line), as_number((*it)[1], "foe", line)};
    }

    if (auto it = j.find("flow_mag"); it != j.end() && !it->is_null())
        f.flow_mag = as_number(*it, "flow_mag", line);

    const auto& hist = require(j, "histogram", line);
    if (!hist.is_array())
        throw ParseError(line, "field 'histogram' must be an array");
    f.histogram.reserve(hist.size());
    for (const auto& v : hist)
        f.histogram.push_back(as_number(v, "histogram", line));
    return f;
}

void normalize_histogram(FrameRecord& f)
{
    double sum = 0.0;
    for (double v : f.histogram) {
        if (v < 0.0 || !std::isfinite(v))
            return; // rejected by validation
        sum += v;
    }
    if (sum <= 0.0)
        throw InvariantError(f.index, "histogram", "histogram has zero mass");
    for (double& v : f.histogram)
        v /= sum;
}

} // namespace

void validate_features(const VideoMeta& meta, std::span<const FrameRecord> frames)
{
    validate_meta(meta);
    if (static_cast<FrameIndex>(frames.size()) != meta.frame_count)
        throw Error("frame_count " + std::to_string(meta.frame_count) + " does not match " +
                    std::to_string(frames.size()) + " frame records");
    const std::size_t histogram_size = frames.front().histogram.size();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        if (f.index != static_cast<FrameIndex>(i))
            throw InvariantError(f.index, "index",
                                 "non-contiguous index at frame " + std::to_string(f.index));
        validate_frame(meta, f, histogram_size);
    }
}

FeatureSet read_features(std::istream& in)
{
    FeatureSet out;
    bool have_meta = false;
    std::size_t histogram_size = 0;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
            continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(line, std::string("invalid JSON: ") + e.what());
        }
        if (!have_meta) {
            out.meta = parse_meta(j, line);
            have_meta = true;
            continue;
        }
        FrameRecord f = parse_frame(j, line);
        const auto expected = static_cast<FrameIndex>(out.frames.size());
        if (f.index != expected)
            throw InvariantError(f.index, "index",
                                 "non-contiguous index at frame " + std::to_string(f.index));
        if (out.frames.empty())
            histogram_size = f.histogram.size();
        normalize_histogram(f);
        validate_frame(out.meta, f, histogram_size);
        out.frames.push_back(std::move(f));
    }
    if (!have_meta)
        throw ParseError(line, "missing meta line");
    if (static_cast<FrameIndex>(out.frames.size()) != out.meta.frame_count)
        throw Error("frame_count " + std::to_string(out.meta.frame_count) + " does not match " +
                    std::to_string(out.frames.size()) + " frame records");
    return out;
}

FeatureSet load_features(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open feature file " + path.string());
    return read_features(in);
}

void write_features(const VideoMeta& meta, std::span<const FrameRecord> frames, std::ostream& out)
{
    if (frames.empty() || meta.frame_count <= 0)
        throw Error("frame_count must be positive");
    validate_features(meta, frames);

    ordered_json m;
    m["width"] = meta.width;
    m["height"] = meta.height;
    m["fps"] = meta.fps;
    m["frame_count"] = meta.frame_count;
    out << m.dump() << '\n';

    for (const auto& f : frames) {
        ordered_json j;
        j["index"] = f.index;
        j["detections"] = ordered_json::array();
        for (const auto& d : f.detections) {
            j["detections"].push_back({{"x", d.box.x},
                                       {"y", d.box.y},
                                       {"w", d.box.w},
                                       {"h", d.box.h},
                                       {"confidence", d.confidence}});
        }
        j["foe"] = f.foe ? ordered_json::array({f.foe->x, f.foe->y}) : ordered_json(nullptr);
        j["flow_mag"] = f.flow_mag ? ordered_json(*f.flow_mag) : ordered_json(nullptr);
        j["histogram"] = f.histogram;
        out << j.dump() << '\n';
    }
    if (!out)
        throw Error("write failed");
}

void write_features(const VideoMeta& meta, std::span<const FrameRecord> frames,
                    const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    write_features(meta, frames, out);
}

// Synthetic scenarios --------------------------------------------------------

void ScenarioParams::validate() const
{
    if (frame_count <= 0)
        throw ConfigError("scenario frame_count must be positive");
    if (width <= 0 || height <= 0 || !(fps > 0.0))
        throw ConfigError("scenario width, height and fps must be positive");
    FrameIndex prev_end = 0;
    for (const auto& b : bursts) {
        if (b.start < prev_end || b.start >= b.end || b.end > frame_count)
            throw ConfigError("face bursts must be sorted, non-overlapping, non-empty and inside "
                              "[0, frame_count)");
        prev_end = b.end;
    }
    if (!(foe_noise >= 0.0) || !(flow_mean >= 0.0) || !(flow_noise >= 0.0))
        throw ConfigError("scenario noise levels must be non-negative");
    if (!(confidence_min <= confidence_max) || !(face_size_min > 0.0) ||
        !(face_size_min <= face_size_max))
        throw ConfigError("scenario confidence and face size ranges are invalid");
    if (face_size_max > std::min(width, height))
        throw ConfigError("face_size_max exceeds the frame");
    if (!(false_positive_rate >= 0.0 && false_positive_rate <= 1.0))
        throw ConfigError("false_positive_rate must lie in [0, 1]");
}

namespace {

struct FaceTrack
{
    Point2 start;
    Point2 drift; ///< px per frame
    double peak_size;
};

BBox clamp_box(Point2 center, double side, const ScenarioParams& p)
{
    BBox b{center.x - 0.5 * side, center.y - 0.5 * side, side, side};
    b.x = std::clamp(b.x, 0.0, p.width - side);
    b.y = std::clamp(b.y, 0.0, p.height - side);
    return b;
}

} // namespace

FeatureSet synth_features(const ScenarioParams& p)
{
    p.validate();
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    FeatureSet out;
    out.meta = {p.width, p.height, p.fps, p.frame_count};
    out.frames.resize(static_cast<std::size_t>(p.frame_count));
    const Point2 center = out.meta.center();

    // Appearance: one bump per channel whose position random-walks.
    constexpr int bins = kHistogramBinsPerChannel;
    std::array<double, kHistogramChannels> bump{};
    for (auto& c : bump)
        c = 8.0 + 16.0 * unit(rng);

    for (FrameIndex i = 0; i < p.frame_count; ++i) {
        auto& f = out.frames[static_cast<std::size_t>(i)];
        f.index = i;
        if (i + 1 < p.frame_count) {
            Point2 foe = center;
            if (p.foe_noise > 0.0) {
                foe.x = std::clamp(center.x + p.foe_noise * normal(rng), 0.0, double(p.width));
                foe.y = std::clamp(center.y + p.foe_noise * normal(rng), 0.0, double(p.height));
            }
            f.foe = foe;
            f.flow_mag = std::max(0.0, p.flow_mean + p.flow_noise * normal(rng));
        }
        f.histogram.assign(static_cast<std::size_t>(kHistogramChannels * bins), 0.0);
        for (int c = 0; c < kHistogramChannels; ++c) {
            bump[c] = std::clamp(bump[c] + 0.15 * normal(rng), 2.0, bins - 3.0);
            double mass = 0.0;
            for (int b = 0; b < bins; ++b) {
                const double z = (b - bump[c]) / 3.0;
                const double v = std::exp(-0.5 * z * z) + 0.01 + 0.005 * unit(rng);
                f.histogram[c * bins + b] = v;
                mass += v;
            }
            for (int b = 0; b < bins; ++b)
                f.histogram[c * bins + b] /= mass * kHistogramChannels;
        }
    }

    // Planted faces.
    for (const auto& burst : p.bursts) {
        FaceTrack track;
        track.start = {center.x + 0.25 * p.width * (unit(rng) - 0.5),
                       center.y + 0.25 * p.height * (unit(rng) - 0.5)};
        track.drift = {0.2 * (unit(rng) - 0.5), 0.1 * (unit(rng) - 0.5)};
        track.peak_size = p.face_size_min + (p.face_size_max - p.face_size_min) * unit(rng);
        const double len = static_cast<double>(burst.end - burst.start);
        for (FrameIndex i = burst.start; i < burst.end; ++i) {
            const double t = static_cast<double>(i - burst.start);
            const double envelope = 0.35 + 0.65 * std::sin(std::numbers::pi * (t + 0.5) / len);
            const double side = track.peak_size * envelope;
            const Point2 c{track.start.x + track.drift.x * t + 2.0 * normal(rng),
                           track.start.y + track.drift.y * t + 2.0 * normal(rng)};
            const double conf =
                p.confidence_min + (p.confidence_max - p.confidence_min) * unit(rng);
            out.frames[static_cast<std::size_t>(i)].detections.push_back(
                {clamp_box(c, side, p), conf});
        }
    }

    if (p.false_positive_rate > 0.0) {
        std::size_t next_burst = 0;
        for (FrameIndex i = 0; i < p.frame_count; ++i) {
            while (next_burst < p.bursts.size() && p.bursts[next_burst].end <= i)
                ++next_burst;
            const bool in_burst =
                next_burst < p.bursts.size() && p.bursts[next_burst].start <= i;
            if (in_burst || unit(rng) >= p.false_positive_rate)
                continue;
            const double side = 20.0 + 40.0 * unit(rng);
            const Point2 c{p.width * unit(rng), p.height * unit(rng)};
            const double conf = 2.0 + 28.0 * unit(rng);
            out.frames[static_cast<std::size_t>(i)].detections.push_back(
                {clamp_box(c, side, p), conf});
        }
    }
    return out;
}

ScenarioParams random_scenario(std::uint64_t seed, FrameIndex frame_count, double min_coverage,
                               double max_coverage)
{
    if (!(0.0 <= min_coverage && min_coverage <= max_coverage && max_coverage < 1.0))
        throw ConfigError("coverage range must satisfy 0 <= min <= max < 1");
    std::mt19937_64 rng(seed ^ 0x5eed5eed5eedULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ScenarioParams p;
    p.frame_count = frame_count;
    p.seed = seed;
    p.foe_noise = 12.0;
    p.false_positive_rate = 0.01;

    const int burst_count = 2 + static_cast<int>(rng() % 4);
    const double coverage = min_coverage + (max_coverage - min_coverage) * unit(rng);
    const auto covered = static_cast<FrameIndex>(std::llround(coverage * frame_count));
    const FrameIndex free = frame_count - covered;
    if (covered < burst_count || free < burst_count + 1)
        throw ConfigError("frame_count too small for a random scenario");

    auto split = [&](FrameIndex total, int parts, FrameIndex minimum) {
        std::vector<double> w(parts);
        for (auto& x : w)
            x = 0.5 + unit(rng);
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        const FrameIndex spare = total - minimum * parts;
        std::vector<FrameIndex> out(parts, minimum);
        FrameIndex used = 0;
        for (int k = 0; k + 1 < parts; ++k) {
            out[k] += static_cast<FrameIndex>(std::floor(spare * w[k] / sum));
            used += out[k];
        }
        out.back() = total - used;
        return out;
    };

    const FrameIndex min_burst = std::min<FrameIndex>(60, covered / burst_count);
    const FrameIndex min_gap = std::min<FrameIndex>(30, free / (burst_count + 1));
    const auto lengths = split(covered, burst_count, min_burst);
    const auto gaps = split(free, burst_count + 1, min_gap);
    FrameIndex cursor = 0;
    for (int k = 0; k < burst_count; ++k) {
        cursor += gaps[k];
        p.bursts.push_back({cursor, cursor + lengths[k]});
        cursor += lengths[k];
    }
    return p;
}

} // namespace semfast
