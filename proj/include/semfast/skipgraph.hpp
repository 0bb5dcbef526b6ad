#pragma once

#include "semfast/semantic.hpp"
#include "semfast/speedup.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace semfast {

/// Parameters of one segment's frame graph.
struct GraphParams
{
    int tau_max = 100; ///< longest allowed skip, frames
    double alpha = 1.0; ///< balance weight
    double beta = 1.0;  ///< velocity weight
    double gamma = 1.0; ///< appearance weight
    double eta = 1.0;   ///< semantic weight
    double epsilon = 1.0;
    int speedup = 1; ///< target rate F of the segment

    void validate() const;
};

struct EdgeCosts
{
    double balance = 0.0;
    double velocity = 0.0;
    double appearance = 0.0;
    double semantic = 0.0;
    double weight = 0.0;
};

// Cost terms. Frame indices are positions in `frames`; every term describes
// the jump from frame i to frame j > i.

/// Mean distance of the transition FOEs in [i, j) from the image centre,
/// over the half diagonal. A missing FOE counts as the centre.
double balance_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames,
                    const VideoMeta& meta);

/// |sum of flow over [i, j) - F * target| / (F * target). Missing flow counts
/// as zero.
double velocity_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames,
                     const GraphParams& params, double target_flow);

/// Per-channel 1-D earth mover's distance (L1 distance of the channel CDFs),
/// averaged over channels.
double histogram_emd(std::span<const double> a, std::span<const double> b);

double appearance_cost(FrameIndex i, FrameIndex j, std::span<const FrameRecord> frames);

/// 1 / (S_i + S_j + epsilon)
double semantic_cost(double score_i, double score_j, double epsilon);

/// (alpha B + beta V + gamma A + eta S) * ceil(skip / F)
double edge_weight(const EdgeCosts& costs, const GraphParams& params, FrameIndex skip);

/// Median of the per-transition flow magnitudes, never below 1e-6.
double median_flow(std::span<const FrameRecord> frames);

/// Forward DAG over the frames of one segment plus a virtual source and sink.
/// Node 0 is the source, node k (1..n) is frame segment.start + k - 1 and
/// node n + 1 is the sink, so node order is a topological order.
class SkipGraph
{
public:
    using Node = std::size_t;

    struct Edge
    {
        Node from;
        Node to;
        EdgeCosts costs;
    };

    SkipGraph(Segment segment, int speedup, std::size_t connector_width,
              std::vector<Edge> edges);

    const Segment& segment() const { return segment_; }
    int speedup() const { return speedup_; }
    std::size_t frame_count() const { return static_cast<std::size_t>(segment_.length()); }
    std::size_t node_count() const { return frame_count() + 2; }
    Node source() const { return 0; }
    Node sink() const { return frame_count() + 1; }
    bool is_frame(Node v) const { return v != source() && v != sink(); }
    FrameIndex frame_of(Node v) const { return segment_.start + static_cast<FrameIndex>(v) - 1; }

    /// Number of source (and of sink) connectors.
    std::size_t connector_width() const { return connector_width_; }

    /// All edges, grouped by source node in node order.
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Edge> out_edges(Node v) const;

    /// Edges between two frames (excludes source and sink connectors).
    std::size_t frame_edge_count() const;

private:
    Segment segment_;
    int speedup_;
    std::size_t connector_width_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
};

/// Builds the graph for `segment`. `scores` are the per-frame semantic
/// scores of the whole video. Source and sink connect with zero cost to the
/// first and last min(F, n, (tau_max + 1) / 2) frames.
SkipGraph build_graph(const Segment& segment, std::span<const FrameRecord> frames,
                      const VideoMeta& meta, std::span<const double> scores,
                      const GraphParams& params, double target_flow);

struct SegmentPath
{
    std::vector<FrameIndex> frames;
    double total_cost = 0.0;
    std::size_t rounds = 0; ///< relaxation rounds until no update
};

/// Bellman-Ford from the source. Among minimum-cost paths the one with the
/// fewest frames wins, then the lexicographically smallest frame sequence.
SegmentPath shortest_path(const SkipGraph& graph);

struct Selection
{
    std::vector<FrameIndex> indices;
    std::vector<SegmentPath> paths; ///< one per segment, in temporal order
};

/// Runs the graph search on every segment with F = F_s or F_ns by label and
/// concatenates the paths. Segments are solved concurrently.
Selection select_frames(const SemanticProfile& profile, const SpeedupPlan& plan,
                        const FeatureSet& features, const GraphParams& params);

/// i,j,B,V,A,S,W for the frame-to-frame edges, in global frame indices.
void write_graph_csv(const SkipGraph& graph, std::ostream& out, bool header = true);

} // namespace semfast
