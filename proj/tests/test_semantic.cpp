#include "oracles.hpp"

#include "semfast/semantic.hpp"

#include <doctest.h>

#include <numbers>
#include <numeric>

using namespace semfast;

namespace {

const VideoMeta kMeta{640, 480, 30.0, 1};

Detection centred(double side, double confidence, Point2 offset = {})
{
    return {{320 - side / 2 + offset.x, 240 - side / 2 + offset.y, side, side}, confidence};
}

FrameRecord frame_with(std::vector<Detection> dets, FrameIndex index = 0)
{
    FrameRecord f;
    f.index = index;
    f.detections = std::move(dets);
    return f;
}

std::vector<FrameRecord> empty_frames(std::size_t n)
{
    std::vector<FrameRecord> frames(n);
    for (std::size_t i = 0; i < n; ++i)
        frames[i].index = static_cast<FrameIndex>(i);
    return frames;
}

} // namespace

TEST_CASE("frame score of an empty frame is zero")
{
    CHECK(frame_score(FrameRecord{}, kMeta, ScoreParams::for_video(kMeta)) == 0.0);
}

TEST_CASE("centred detection scores C * G(0) * area")
{
    const auto p = ScoreParams::for_video(kMeta);
    CHECK(p.sigma == 320.0);
    const double expected = 60.0 / (2 * std::numbers::pi * 320.0 * 320.0) * 10000.0;
    CHECK(std::abs(frame_score(frame_with({centred(100, 60)}), kMeta, p) - expected) <= 1e-9);
}

TEST_CASE("frame score is additive over detections")
{
    const auto p = ScoreParams::for_video(kMeta);
    const auto a = centred(80, 70, {40, -30});
    const auto b = centred(50, 20, {-100, 60});
    const double sa = frame_score(frame_with({a}), kMeta, p);
    const double sb = frame_score(frame_with({b}), kMeta, p);
    CHECK(std::abs(frame_score(frame_with({a, b}), kMeta, p) - (sa + sb)) <= 1e-9);
}

TEST_CASE("random detections match the straight-line oracle")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto fs = oracle::random_features(rng, 8);
        auto p = ScoreParams::for_video(fs.meta);
        for (auto f : fs.frames) {
            std::uniform_real_distribution<double> u(0, 1);
            if (u(rng) < 0.5)
                f.detections.push_back({{10, 20, 30, 40}, 100 * u(rng)});
            const double got = frame_score(f, fs.meta, p);
            const double want = oracle::frame_score(f, fs.meta, p.sigma);
            CHECK(got >= 0.0);
            CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, want));
        }
    }
}

TEST_CASE("normalised area divides by W * H")
{
    auto p = ScoreParams::for_video(kMeta);
    const auto f = frame_with({centred(100, 60, {12, 7})});
    const double raw = frame_score(f, kMeta, p);
    p.normalize_area = true;
    CHECK(frame_score(f, kMeta, p) == doctest::Approx(raw / (640.0 * 480.0)));
}

TEST_CASE("score does not increase along a ray from the centre")
{
    const auto p = ScoreParams::for_video(kMeta);
    for (const Point2 dir : {Point2{1, 0}, Point2{0, 1}, Point2{0.6, -0.8}, Point2{-0.7, -0.7}}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double r = 0; r <= 180; r += 5) {
            const double s = frame_score(frame_with({centred(40, 50, {r * dir.x, r * dir.y})}),
                                         kMeta, p);
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("scaling confidences scales the score")
{
    const auto p = ScoreParams::for_video(kMeta);
    auto f = frame_with({centred(60, 30, {50, 10}), centred(90, 80, {-20, 40})});
    const double base = frame_score(f, kMeta, p);
    for (auto& d : f.detections)
        d.confidence *= 3.5;
    CHECK(frame_score(f, kMeta, p) == doctest::Approx(3.5 * base).epsilon(1e-12));
}

TEST_CASE("detection filtering thresholds")
{
    const auto p = ScoreParams::for_video(kMeta);
    SUBCASE("isolated mid-confidence detection is dropped")
    {
        auto frames = empty_frames(40);
        frames[20].detections = {centred(60, 30)};
        const auto out = filter_detections(frames, p);
        CHECK(out[20].detections.empty());
    }
    SUBCASE("single high-confidence detection is kept")
    {
        auto frames = empty_frames(40);
        frames[20].detections = {centred(60, 61)};
        const auto out = filter_detections(frames, p);
        CHECK(out[20].detections.size() == 1);
    }
    SUBCASE("low confidence everywhere is dropped")
    {
        auto frames = empty_frames(40);
        for (auto& f : frames)
            f.detections = {centred(60, 9)};
        for (const auto& f : filter_detections(frames, p))
            CHECK(f.detections.empty());
    }
    SUBCASE("persistent mid-confidence detection is kept")
    {
        auto frames = empty_frames(40);
        for (int t = 18; t < 23; ++t)
            frames[t].detections = {centred(60, 30, {double(t - 18), 0})};
        const auto out = filter_detections(frames, p);
        for (int t = 18; t < 23; ++t)
            CHECK(out[t].detections.size() == 1);
    }
    SUBCASE("support far away does not count")
    {
        auto frames = empty_frames(40);
        frames[20].detections = {centred(40, 30)};
        for (int t = 16; t < 24; ++t)
            if (t != 20)
                frames[t].detections = {centred(40, 30, {200, 0})};
        const auto out = filter_detections(frames, p);
        CHECK(out[20].detections.empty());
    }
}

TEST_CASE("smoothing keeps a constant signal")
{
    const std::vector<double> c(100, 2.75);
    for (double sigma : {0.5, 3.0, 30.0, 200.0})
        for (double v : smooth_scores(c, sigma))
            CHECK(std::abs(v - 2.75) <= 1e-12);
}

TEST_CASE("smoothing an impulse gives a symmetric bell with the same mass")
{
    std::vector<double> x(201, 0.0);
    x[100] = 7.0;
    const auto y = smooth_scores(x, 5.0);
    CHECK(std::abs(std::accumulate(y.begin(), y.end(), 0.0) - 7.0) <= 1e-9);
    for (int k = 1; k < 40; ++k) {
        CHECK(std::abs(y[100 - k] - y[100 + k]) <= 1e-15);
        CHECK(y[100 + k] <= y[100 + k - 1]);
    }
    CHECK(y[100 + 16] == 0.0);
}

TEST_CASE("smoothing matches the direct convolution oracle")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> x(5 + trial * 7);
        for (auto& v : x)
            v = u(rng);
        const double sigma = 0.3 + trial * 0.9;
        const auto got = smooth_scores(x, sigma);
        const auto want = oracle::convolve(x, sigma);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(got[i] - want[i]) <= 1e-9);
    }
}

TEST_CASE("threshold sits between the lowest and highest peak")
{
    const std::vector<double> s{0, 2, 1, 0, 8, 3, 0};
    CHECK(segmentation_threshold(s) == 5.0);
}

TEST_CASE("monotone signal falls back to the range midpoint")
{
    const std::vector<double> s{1, 2, 3, 4, 9};
    CHECK(segmentation_threshold(s) == 5.0);
}

TEST_CASE("flat-topped maximum counts once")
{
    const std::vector<double> s{0, 4, 4, 4, 1, 6, 0};
    CHECK(segmentation_threshold(s) == 5.0);
}

TEST_CASE("threshold on two-bump signals matches the peak scan")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 60;
        std::vector<double> s(n);
        const double c1 = 5 + 20 * u(rng), c2 = 35 + 20 * u(rng);
        const double h1 = 1 + 9 * u(rng), h2 = 1 + 9 * u(rng);
        for (int i = 0; i < n; ++i)
            s[i] = h1 * std::exp(-(i - c1) * (i - c1) / 18) +
                   h2 * std::exp(-(i - c2) * (i - c2) / 18) + 0.05 * u(rng);
        CHECK(segmentation_threshold(s) == oracle::threshold(s));
    }
}

TEST_CASE("threshold needs three samples")
{
    CHECK_THROWS_AS(segmentation_threshold(std::vector<double>{1, 2}), Error);
}

TEST_CASE("all-zero scores give one non-semantic segment")
{
    const std::vector<double> s(80, 0.0);
    const double thr = segmentation_threshold(s);
    const auto segs = segment_video(s, thr, 20);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0] == Segment{0, 80, SegmentLabel::non_semantic});
}

TEST_CASE("scores above threshold in [20,40) give three segments")
{
    std::vector<double> s(100, 0.0);
    for (int i = 20; i < 40; ++i)
        s[i] = 1.0;
    const auto segs = segment_video(s, 0.5, 1);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0] == Segment{0, 20, SegmentLabel::non_semantic});
    CHECK(segs[1] == Segment{20, 40, SegmentLabel::semantic});
    CHECK(segs[2] == Segment{40, 100, SegmentLabel::non_semantic});
}

TEST_CASE("short blips are absorbed like the run-length oracle")
{
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 30 + trial % 90;
        std::vector<double> s(n, 0.0);
        // long base runs with 3-frame blips and random noise on top
        int i = 0;
        double level = u(rng) < 0.5 ? 1.0 : 0.0;
        while (i < n) {
            const int len = 1 + static_cast<int>(u(rng) * (trial % 3 == 0 ? 4 : 15));
            for (int k = 0; k < len && i < n; ++k, ++i)
                s[i] = level + 0.1 * u(rng);
            level = 1.0 - level;
            if (u(rng) < 0.5 && i + 3 < n)
                for (int k = 0; k < 3; ++k, ++i)
                    s[i] = (1.0 - level) + 0.1 * u(rng);
        }
        const FrameIndex min_len = 1 + trial % 7;
        const auto got = segment_video(s, 0.55, min_len);
        const auto want = oracle::merge_runs(s, 0.55, min_len);
        CHECK(got == want);

        REQUIRE_FALSE(got.empty());
        CHECK(got.front().start == 0);
        CHECK(got.back().end == n);
        for (std::size_t k = 1; k < got.size(); ++k) {
            CHECK(got[k].start == got[k - 1].end);
            CHECK(got[k].label != got[k - 1].label);
        }
        if (got.size() > 1)
            for (const auto& seg : got)
                CHECK(seg.length() >= min_len);
    }
}

TEST_CASE("short run between equal neighbours merges all three")
{
    std::vector<double> s{1, 1, 1, 1, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1};
    const auto segs = segment_video(s, 0.5, 3);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0] == Segment{0, 14, SegmentLabel::semantic});
}

TEST_CASE("shortest short run is merged first")
{
    // runs: 5 ns, 1 s, 2 ns, 8 s. The 1-run goes first and joins the 5-run,
    // leaving 8 ns | 8 s.
    std::vector<double> s{0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
    const auto segs = segment_video(s, 0.5, 3);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0] == Segment{0, 8, SegmentLabel::non_semantic});
    CHECK(segs[1] == Segment{8, 16, SegmentLabel::semantic});
}

TEST_CASE("profile of a synthetic burst")
{
    ScenarioParams sp;
    sp.frame_count = 600;
    sp.bursts = {{200, 320}};
    sp.seed = 4;
    const auto fs = synth_features(sp);
    ProfileParams pp;
    pp.score = ScoreParams::for_video(fs.meta);
    pp.kernel_sigma = fs.meta.fps;
    const auto prof = build_profile(fs, pp);
    CHECK(prof.raw_scores.size() == 600);
    for (double v : prof.raw_scores)
        CHECK(v >= 0.0);
    CHECK(total_length(prof.segments, SegmentLabel::semantic) +
              total_length(prof.segments, SegmentLabel::non_semantic) ==
          600);
    const auto sem = std::find_if(prof.segments.begin(), prof.segments.end(),
                                  [](const Segment& s) { return s.label == SegmentLabel::semantic; });
    REQUIRE(sem != prof.segments.end());
    CHECK(sem->start >= 180);
    CHECK(sem->end <= 340);
    for (const auto& seg : prof.segments) {
        if (seg.label != SegmentLabel::semantic)
            continue;
        double mean = 0;
        for (auto i = seg.start; i < seg.end; ++i)
            mean += prof.smoothed_scores[i];
        CHECK(mean / seg.length() > prof.threshold);
    }
}

TEST_CASE("invalid score parameters are rejected")
{
    auto p = ScoreParams::for_video(kMeta);
    SUBCASE("sigma") { p.sigma = 0; }
    SUBCASE("zeta below theta") { p.zeta = 5; }
    SUBCASE("window") { p.persistence_window = 0; }
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
