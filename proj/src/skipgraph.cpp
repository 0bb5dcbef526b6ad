#include "semfast/skipgraph.hpp"

#include "format.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

namespace semfast {

void GraphParams::validate() const
{
    if (tau_max < 1)
        throw ConfigError("tau_max must be at least 1");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ConfigError("epsilon must be positive");
    if (speedup < 1)
        throw ConfigError("graph speed-up must be at least 1");
    for (double w : {alpha, beta, gamma, eta})
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ConfigError("term weights must be finite and non-negative");
}

namespace {

void check_span(FrameIndex i, FrameIndex j, std::size_t n)
{
    if (i < 0 || j <= i || j >= static_cast<FrameIndex>(n))
        throw Error("invalid frame pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

std::vector<double> channel_cdfs(std::span<const double> hist)
{
    const std::size_t bins = hist.size() / kHistogramChannels;
    std::vector<double> cdf(hist.size());
    for (std::size_t c = 0; c < static_cast<std::size_t>(kHistogramChannels); ++c) {
        double acc = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            acc += hist[c * bins + b];
            cdf[c * bins + b] = acc;
        }
    }
    return cdf;
}

double cdf_distance(std::span<const double> a, std::span<const double> b)
{
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        total += std::abs(a[k] - b[k]);
    return total / kHistogramChannels;
}

} // namespace

double balance_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames,
                    const VideoMeta& meta)
{
    check_span(i, j, frames.size());
    const Point2 center = meta.center();
    const double half_diag = 0.5 * meta.diagonal();
    double total = 0.0;
    for (FrameIndex t = i; t < j; ++t) {
        const auto& foe = frames[static_cast<std::size_t>(t)].foe;
        if (foe)
            total += distance(*foe, center);
    }
    return total / static_cast<double>(j - i) / half_diag;
}

double velocity_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames,
                     const GraphParams& params, double target_flow)
{
    check_span(i, j, frames.size());
    if (!(target_flow > 0.0))
        throw Error("target_flow must be positive");
    double travelled = 0.0;
    for (FrameIndex t = i; t < j; ++t)
        travelled += frames[static_cast<std::size_t>(t)].flow_mag.value_or(0.0);
    const double expected = params.speedup * target_flow;
    return std::abs(travelled - expected) / expected;
}

double histogram_emd(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw Error("histogram length mismatch");
    if (a.empty() || a.size() % kHistogramChannels != 0)
        throw Error("histogram length must be a positive multiple of the channel count");
    const auto ca = channel_cdfs(a);
    const auto cb = channel_cdfs(b);
    return cdf_distance(ca, cb);
}

double appearance_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames)
{
    check_span(i, j, frames.size());
    return histogram_emd(frames[static_cast<std::size_t>(i)].histogram,
                         frames[static_cast<std::size_t>(j)].histogram);
}

double semantic_cost(double score_i, double score_j, double epsilon)
{
    return 1.0 / (score_i + score_j + epsilon);
}

double edge_weight(const EdgeCosts& costs, const GraphParams& params, FrameIndex skip)
{
    if (skip < 1 || skip > params.tau_max)
        throw Error("skip " + std::to_string(skip) + " outside [1, tau_max]");
    const FrameIndex f = params.speedup;
    const auto multiplier = static_cast<double>((skip + f - 1) / f);
    return (params.alpha * costs.balance + params.beta * costs.velocity +
            params.gamma * costs.appearance + params.eta * costs.semantic) *
           multiplier;
}

double median_flow(std::span<const FrameRecord> frames)
{
    std::vector<double> flows;
    for (const auto& f : frames)
        if (f.flow_mag)
            flows.push_back(*f.flow_mag);
    if (flows.empty())
        return 1e-6;
    const std::size_t mid = flows.size() / 2;
    std::nth_element(flows.begin(), flows.begin() + mid, flows.end());
    double median = flows[mid];
    if (flows.size() % 2 == 0) {
        const double lower = *std::max_element(flows.begin(), flows.begin() + mid);
        median = 0.5 * (lower + median);
    }
    return std::max(median, 1e-6);
}

SkipGraph::SkipGraph(Segment segment, int speedup, std::size_t connector_width,
                     std::vector<Edge> edges)
    : segment_(segment), speedup_(speedup), connector_width_(connector_width),
      edges_(std::move(edges))
{
    std::stable_sort(edges_.begin(), edges_.end(),
                     [](const Edge& a, const Edge& b) { return a.from < b.from; });
    offsets_.assign(node_count() + 1, 0);
    for (const auto& e : edges_) {
        assert(e.from < e.to && e.to < node_count());
        ++offsets_[e.from + 1];
    }
    for (std::size_t v = 0; v < node_count(); ++v)
        offsets_[v + 1] += offsets_[v];
}

std::span<const SkipGraph::Edge> SkipGraph::out_edges(Node v) const
{
    return std::span<const Edge>(edges_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
}

std::size_t SkipGraph::frame_edge_count() const
{
    return edges_.size() - 2 * connector_width_;
}

SkipGraph build_graph(const Segment& segment, std::span<const FrameRecord> frames,
                      const VideoMeta& meta, std::span<const double> scores,
                      const GraphParams& params, double target_flow)
{
    params.validate();
    if (segment.length() < 2)
        throw Error("segment [" + std::to_string(segment.start) + ", " +
                    std::to_string(segment.end) + ") is shorter than 2 frames");
    if (segment.start < 0 || segment.end > static_cast<FrameIndex>(frames.size()) ||
        scores.size() != frames.size())
        throw Error("segment or scores do not match the frame list");

    const auto n = static_cast<std::size_t>(segment.length());
    const auto tau = static_cast<std::size_t>(params.tau_max);
    const std::size_t width = std::min({static_cast<std::size_t>(params.speedup), n,
                                        static_cast<std::size_t>((params.tau_max + 1) / 2)});

    std::vector<std::vector<double>> cdfs(n);
    for (std::size_t k = 0; k < n; ++k)
        cdfs[k] = channel_cdfs(frames[static_cast<std::size_t>(segment.start) + k].histogram);

    std::vector<SkipGraph::Edge> edges;
    std::size_t frame_edges = 0;
    for (std::size_t d = 1; d <= std::min(tau, n - 1); ++d)
        frame_edges += n - d;
    edges.reserve(frame_edges + 2 * width);

    for (std::size_t k = 0; k < width; ++k)
        edges.push_back({0, k + 1, {}});
    for (std::size_t a = 0; a < n; ++a) {
        const FrameIndex i = segment.start + static_cast<FrameIndex>(a);
        for (std::size_t b = a + 1; b < n && b - a <= tau; ++b) {
            const FrameIndex j = segment.start + static_cast<FrameIndex>(b);
            if (cdfs[a].size() != cdfs[b].size())
                throw Error("histogram length mismatch");
            EdgeCosts c;
            c.balance = balance_cost(i, j, frames, meta);
            c.velocity = velocity_cost(i, j, frames, params, target_flow);
            c.appearance = cdf_distance(cdfs[a], cdfs[b]);
            c.semantic = semantic_cost(scores[static_cast<std::size_t>(i)],
                                       scores[static_cast<std::size_t>(j)], params.epsilon);
            c.weight = edge_weight(c, params, j - i);
            edges.push_back({a + 1, b + 1, c});
        }
        if (a + width >= n)
            edges.push_back({a + 1, n + 1, {}});
    }
    return SkipGraph(segment, params.speedup, width, std::move(edges));
}

namespace {

struct Label
{
    double cost = std::numeric_limits<double>::infinity();
    std::size_t hops = std::numeric_limits<std::size_t>::max();

    bool reached() const { return std::isfinite(cost); }
};

bool better(const Label& a, const Label& b)
{
    return a.cost < b.cost || (a.cost == b.cost && a.hops < b.hops);
}

} // namespace

SegmentPath shortest_path(const SkipGraph& graph)
{
    const std::size_t nodes = graph.node_count();
    std::vector<Label> dist(nodes);
    dist[graph.source()] = {0.0, 0};

    auto relax_all = [&]() {
        bool changed = false;
        for (const auto& e : graph.edges()) {
            const Label& from = dist[e.from];
            if (!from.reached())
                continue;
            const Label candidate{from.cost + e.costs.weight, from.hops + 1};
            if (better(candidate, dist[e.to])) {
                dist[e.to] = candidate;
                changed = true;
            }
        }
        return changed;
    };

    SegmentPath path;
    bool converged = false;
    for (std::size_t round = 1; round < nodes; ++round) {
        path.rounds = round;
        if (!relax_all()) {
            converged = true;
            break;
        }
    }
    // Weights are non-negative, so a further improvement would mean a bug.
    if (!converged && relax_all())
        throw Error("negative cycle in skip graph");
    if (!dist[graph.sink()].reached())
        throw Error("sink unreachable in skip graph");

    // An edge is tight when it realises its head's label. Among the tight
    // source-sink paths pick the lexicographically smallest frame sequence.
    auto tight = [&](const SkipGraph::Edge& e) {
        const Label& from = dist[e.from];
        return from.reached() && from.cost + e.costs.weight == dist[e.to].cost &&
               from.hops + 1 == dist[e.to].hops;
    };
    std::vector<char> reaches_sink(nodes, 0);
    reaches_sink[graph.sink()] = 1;
    for (std::size_t v = nodes - 1; v-- > 0;) {
        for (const auto& e : graph.out_edges(v)) {
            if (reaches_sink[e.to] && tight(e)) {
                reaches_sink[v] = 1;
                break;
            }
        }
    }

    SkipGraph::Node v = graph.source();
    while (v != graph.sink()) {
        SkipGraph::Node next = graph.sink();
        bool found = false;
        for (const auto& e : graph.out_edges(v)) {
            if (reaches_sink[e.to] && tight(e) && (!found || e.to < next)) {
                next = e.to;
                found = true;
            }
        }
        if (!found)
            throw Error("no tight path to sink");
        if (graph.is_frame(next))
            path.frames.push_back(graph.frame_of(next));
        v = next;
    }
    path.total_cost = dist[graph.sink()].cost;
    return path;
}

Selection select_frames(const SemanticProfile& profile, const SpeedupPlan& plan,
                        const FeatureSet& features, const GraphParams& params)
{
    params.validate();
    const auto& frames = features.frames;
    if (profile.raw_scores.size() != frames.size())
        throw Error("semantic profile does not match the feature set");
    FrameIndex covered = 0;
    for (const auto& s : profile.segments) {
        if (s.start != covered || s.end <= s.start)
            throw Error("segments do not partition the video");
        covered = s.end;
    }
    if (covered != static_cast<FrameIndex>(frames.size()))
        throw Error("segments do not partition the video");

    const double target_flow = median_flow(frames);

    auto solve = [&](const Segment& s) {
        if (s.length() == 1) {
            SegmentPath single;
            single.frames = {s.start};
            return single;
        }
        GraphParams p = params;
        p.speedup = s.label == SegmentLabel::semantic ? plan.semantic : plan.non_semantic;
        const auto graph =
            build_graph(s, frames, features.meta, profile.raw_scores, p, target_flow);
        return shortest_path(graph);
    };

    std::vector<std::future<SegmentPath>> pending;
    pending.reserve(profile.segments.size());
    for (const auto& s : profile.segments)
        pending.push_back(std::async(std::launch::async, solve, std::cref(s)));

    Selection out;
    for (auto& f : pending) {
        out.paths.push_back(f.get());
        const auto& p = out.paths.back().frames;
        out.indices.insert(out.indices.end(), p.begin(), p.end());
    }
    return out;
}

void write_graph_csv(const SkipGraph& graph, std::ostream& out, bool header)
{
    if (header)
        out << "i,j,B,V,A,S,W\n";
    for (const auto& e : graph.edges()) {
        if (!graph.is_frame(e.from) || !graph.is_frame(e.to))
            continue;
        const auto& c = e.costs;
        out << graph.frame_of(e.from) << ',' << graph.frame_of(e.to) << ','
            << detail::fmt(c.balance) << ',' << detail::fmt(c.velocity) << ','
            << detail::fmt(c.appearance) << ',' << detail::fmt(c.semantic) << ','
            << detail::fmt(c.weight) << '\n';
    }
}

} // namespace semfast
