#include "oracles.hpp"

#include "semfast/baselines.hpp"
#include "semfast/metrics.hpp"

#include <doctest.h>

#include <numeric>
#include <sstream>

using namespace semfast;

namespace {

std::vector<FrameRecord> frames_with_foes(const std::vector<Point2>& foes)
{
    std::vector<FrameRecord> frames(foes.size() + 1);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        frames[i].index = static_cast<FrameIndex>(i);
        if (i < foes.size())
            frames[i].foe = foes[i];
        frames[i].histogram = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    }
    return frames;
}

std::vector<FrameIndex> sort_and_take(const std::vector<double>& s, int fd)
{
    std::vector<FrameIndex> idx(s.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](FrameIndex a, FrameIndex b) { return s[a] > s[b]; });
    idx.resize(s.size() / static_cast<std::size_t>(fd));
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

TEST_CASE("naive sampling")
{
    const auto a = naive_sample(100, 10);
    REQUIRE(a.size() == 10);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a[k] == FrameIndex(10 * k));
    const auto b = naive_sample(7, 1);
    CHECK(b == std::vector<FrameIndex>{0, 1, 2, 3, 4, 5, 6});
    CHECK(naive_sample(5, 10) == std::vector<FrameIndex>{0});
    CHECK_THROWS_AS(naive_sample(5, 0), Error);
}

TEST_CASE("naive faces sampling examples")
{
    CHECK(naive_faces_sample(std::vector<double>(25, 1.0), 5) ==
          std::vector<FrameIndex>{0, 1, 2, 3, 4});
    std::vector<double> dec(30);
    for (std::size_t i = 0; i < dec.size(); ++i)
        dec[i] = 100.0 - double(i);
    CHECK(naive_faces_sample(dec, 10) == std::vector<FrameIndex>{0, 1, 2});
    CHECK(naive_faces_sample(std::vector<double>{5, 1, 9, 3}, 2) == std::vector<FrameIndex>{0, 2});
}

TEST_CASE("naive faces matches sort-and-take and is optimal")
{
    std::mt19937_64 rng(15);
    std::uniform_int_distribution<int> len(1, 15), fd(1, 4), level(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> s(len(rng));
        for (auto& v : s)
            v = level(rng) * 0.5; // coarse levels force ties
        const int f = fd(rng);
        const auto got = naive_faces_sample(s, f);
        CHECK(got == sort_and_take(s, f));
        const double best = semantic_amount(got, s);

        // every subset of the same size scores no more
        const std::size_t k = got.size();
        const std::size_t n = s.size();
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (std::size_t(std::popcount(mask)) != k)
                continue;
            double total = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1u)
                    total += s[i];
            CHECK(total <= best + 1e-12);
        }
    }
}

TEST_CASE("baselines hit the speed-up exactly when F_d divides n")
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0, 1);
    for (int fd : {1, 2, 5, 10, 25}) {
        const FrameIndex n = 50L * fd;
        std::vector<double> s(static_cast<std::size_t>(n));
        for (auto& v : s)
            v = u(rng);
        for (const auto& sel : {naive_sample(n, fd), naive_faces_sample(s, fd)}) {
            CHECK_NOTHROW(check_selection(sel, n));
            CHECK(speedup_deviation(sel, n, fd, 100).deviation == 0.0);
        }
    }
}

TEST_CASE("semantic amount")
{
    const std::vector<double> s{1.5, 0, 2, 4};
    CHECK(semantic_amount(std::vector<FrameIndex>{}, s) == 0.0);
    CHECK(semantic_amount(std::vector<FrameIndex>{0, 1, 2, 3}, s) == 7.5);
    CHECK(semantic_amount(std::vector<FrameIndex>{0, 3}, s) == 5.5);
    CHECK_THROWS_AS(semantic_amount(std::vector<FrameIndex>{3, 1}, s), Error);
    CHECK_THROWS_AS(semantic_amount(std::vector<FrameIndex>{4}, s), Error);
}

TEST_CASE("any selection scores at most naive faces of the same size")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(60);
        for (auto& v : s)
            v = u(rng);
        std::vector<FrameIndex> sel;
        for (FrameIndex i = 0; i < 60; ++i)
            if (u(rng) < 0.2)
                sel.push_back(i);
        if (sel.empty())
            continue;
        // size k = floor(60 / fd) requires fd = 60 / k; compare with the top-k directly
        const auto top = sort_and_take(s, 1);
        std::vector<FrameIndex> topk(top.begin(), top.end());
        std::stable_sort(topk.begin(), topk.end(), [&](FrameIndex a, FrameIndex b) { return s[a] > s[b]; });
        topk.resize(sel.size());
        std::sort(topk.begin(), topk.end());
        CHECK(semantic_amount(sel, s) <= semantic_amount(topk, s) + 1e-12);
        if (60 % sel.size() == 0)
            CHECK(semantic_amount(sel, s) <=
                  semantic_amount(naive_faces_sample(s, int(60 / sel.size())), s) + 1e-12);
    }
}

TEST_CASE("jitter of a constant FOE is zero")
{
    const VideoMeta meta{640, 480, 30, 50};
    const auto frames = frames_with_foes(std::vector<Point2>(49, Point2{100, 200}));
    CHECK(jitter_amount(std::vector<FrameIndex>{0, 3, 9, 20, 49}, frames, meta) == 0.0);
}

TEST_CASE("alternating corners give the diagonal")
{
    const VideoMeta meta{640, 480, 30, 11};
    std::vector<Point2> foes;
    for (int i = 0; i < 10; ++i)
        foes.push_back(i % 2 == 0 ? Point2{0, 0} : Point2{640, 480});
    const auto frames = frames_with_foes(foes);
    std::vector<FrameIndex> all(11);
    std::iota(all.begin(), all.end(), 0);
    const double j = jitter_amount(all, frames, meta);
    CHECK(std::abs(j - 800.0) <= 1e-9);
    CHECK(jitter_improvement(j, meta) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jitter matches the direct recomputation")
{
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto fs = oracle::random_features(rng, 40);
        std::vector<FrameIndex> sel;
        for (FrameIndex i = 0; i < 40; ++i)
            if (u(rng) < 0.3)
                sel.push_back(i);
        if (sel.size() < 3)
            continue;
        std::vector<Point2> tf;
        for (std::size_t k = 0; k + 1 < sel.size(); ++k) {
            double x = 0, y = 0;
            for (auto t = sel[k]; t < sel[k + 1]; ++t) {
                const auto p = fs.frames[t].foe.value_or(Point2{160, 120});
                x += p.x;
                y += p.y;
            }
            const double c = double(sel[k + 1] - sel[k]);
            tf.push_back({x / c, y / c});
        }
        double want = 0;
        for (std::size_t k = 0; k + 1 < tf.size(); ++k)
            want += std::hypot(tf[k + 1].x - tf[k].x, tf[k + 1].y - tf[k].y);
        want /= double(tf.size() - 1);
        const double got = jitter_amount(sel, fs.frames, fs.meta);
        CHECK(std::abs(got - want) <= 1e-9);

        // common translation leaves it unchanged
        auto moved = fs.frames;
        for (auto& f : moved)
            f.foe = f.foe.value_or(Point2{160, 120});
        const double before = jitter_amount(sel, moved, fs.meta);
        for (auto& f : moved)
            f.foe = Point2{f.foe->x + 37.5, f.foe->y - 12.25};
        CHECK(std::abs(jitter_amount(sel, moved, fs.meta) - before) <= 1e-9);
    }
}

TEST_CASE("jitter needs three frames")
{
    const VideoMeta meta{64, 48, 30, 5};
    const auto frames = frames_with_foes(std::vector<Point2>(4, Point2{1, 1}));
    CHECK_THROWS_AS(jitter_amount(std::vector<FrameIndex>{0, 4}, frames, meta), Error);
}

TEST_CASE("jitter improvement examples")
{
    const VideoMeta meta{640, 480, 30, 1};
    CHECK(jitter_improvement(0, meta) == 100.0);
    CHECK(jitter_improvement(800, meta) == 0.0);
    CHECK(jitter_improvement(400, meta) == 50.0);
    CHECK(jitter_improvement(5000, meta) == 0.0);
    CHECK_THROWS_AS(jitter_improvement(-1, meta), Error);
}

TEST_CASE("speed-up deviation examples")
{
    auto sel = [](std::size_t k) {
        std::vector<FrameIndex> v(k);
        std::iota(v.begin(), v.end(), 0);
        return v;
    };
    auto a = speedup_deviation(sel(100), 1000, 10, 100);
    CHECK(a.deviation == 0.0);
    CHECK(a.pct_of_worst == 100.0);
    auto b = speedup_deviation(sel(10), 1000, 10, 100);
    CHECK(b.deviation == 90.0);
    CHECK(b.pct_of_worst == 0.0);
    auto c = speedup_deviation(sel(80), 1000, 10, 100);
    CHECK(c.deviation == 2.5);
    CHECK(c.pct_of_worst == doctest::Approx(97.2222222222).epsilon(1e-9));
    CHECK(std::abs(c.pct_of_worst - 100.0 * (1 - 2.5 / 90)) <= 1e-9);
    CHECK(speedup_deviation(sel(1), 1000, 10, 100).pct_of_worst == 0.0);
    CHECK_THROWS_AS(speedup_deviation(sel(0), 1000, 10, 100), Error);
}

TEST_CASE("percentages stay in range")
{
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> k(1, 500), fd(1, 50), extra(0, 60);
    std::uniform_real_distribution<double> j(0, 3000);
    const VideoMeta meta{640, 480, 30, 1};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<FrameIndex> sel(static_cast<std::size_t>(k(rng)));
        std::iota(sel.begin(), sel.end(), 0);
        const int f = fd(rng);
        const auto d = speedup_deviation(sel, 500, f, f + extra(rng));
        CHECK(d.pct_of_worst >= 0.0);
        CHECK(d.pct_of_worst <= 100.0);
        const double ji = jitter_improvement(j(rng), meta);
        CHECK(ji >= 0.0);
        CHECK(ji <= 100.0);
    }
}

TEST_CASE("pairwise FOE file")
{
    const std::vector<FrameIndex> sel{0, 10, 20, 30};
    SUBCASE("well formed")
    {
        std::istringstream in("from,to,foe_x,foe_y\n0,10,1.5,2\n10,20,3,4\n\n20,30,5,6\n");
        const auto foes = read_pairwise_foes(in, sel);
        REQUIRE(foes.size() == 3);
        CHECK(foes[0] == Point2{1.5, 2});
        CHECK(foes[2] == Point2{5, 6});
    }
    SUBCASE("wrong pair")
    {
        std::istringstream in("from,to,foe_x,foe_y\n0,10,1,2\n10,21,3,4\n20,30,5,6\n");
        try {
            read_pairwise_foes(in, sel);
            FAIL("expected an error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("missing rows")
    {
        std::istringstream in("from,to,foe_x,foe_y\n0,10,1,2\n");
        CHECK_THROWS_AS(read_pairwise_foes(in, sel), Error);
    }
    SUBCASE("bad number")
    {
        std::istringstream in("from,to,foe_x,foe_y\n0,10,x,2\n");
        CHECK_THROWS_AS(read_pairwise_foes(in, sel), ParseError);
    }
}

TEST_CASE("transition FOE export round-trips through the pairwise reader")
{
    std::mt19937_64 rng(20);
    const auto fs = oracle::random_features(rng, 30);
    const std::vector<FrameIndex> sel{1, 4, 9, 15, 29};
    const auto foes = transition_foes(sel, fs.frames, fs.meta);
    std::stringstream io;
    write_transition_foes(sel, foes, io);
    const auto back = read_pairwise_foes(io, sel);
    REQUIRE(back.size() == foes.size());
    for (std::size_t k = 0; k < foes.size(); ++k)
        CHECK(back[k] == foes[k]);

    const std::vector<double> scores(30, 1.0);
    const auto proxy = evaluate_selection(sel, scores, fs, 10, 100);
    const auto paired = evaluate_selection(sel, scores, fs, 10, 100, std::span<const Point2>(back));
    CHECK(proxy.jitter_amount == paired.jitter_amount);
}

TEST_CASE("evaluation report")
{
    std::mt19937_64 rng(21);
    const auto fs = oracle::random_features(rng, 100);
    std::vector<double> scores(100);
    for (std::size_t i = 0; i < 100; ++i)
        scores[i] = double(i % 7);
    const auto sel = naive_sample(100, 10);
    const auto r = evaluate_selection(sel, scores, fs, 10, 100);
    CHECK(r.indices == sel);
    CHECK(r.achieved_speedup == 10.0);
    CHECK(r.speedup_deviation == 0.0);
    CHECK(r.deviation_pct_of_worst == 100.0);
    CHECK(r.semantic_amount == semantic_amount(sel, scores));
    REQUIRE(r.jitter_amount.has_value());
    CHECK(*r.jitter_amount == jitter_amount(sel, fs.frames, fs.meta));

    const auto two = evaluate_selection(std::vector<FrameIndex>{0, 50}, scores, fs, 10, 100);
    CHECK_FALSE(two.jitter_amount.has_value());
    const auto row = report_csv_row("x", 100, two);
    CHECK(row.rfind("x,100,2,1,,,50,40,55.55", 0) == 0);
    const auto header = report_csv_header();
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("index lists")
{
    std::istringstream in("0\n5\n\n12\n");
    CHECK(read_indices(in) == std::vector<FrameIndex>{0, 5, 12});
    std::istringstream bad("0\nfive\n");
    CHECK_THROWS_AS(read_indices(bad), ParseError);
    std::ostringstream out;
    write_indices(std::vector<FrameIndex>{3, 4}, out);
    CHECK(out.str() == "3\n4\n");
}
