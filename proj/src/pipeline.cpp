#include "semfast/pipeline.hpp"

#include <ostream>

namespace semfast {

PipelineResult run_pipeline(const FeatureSet& features, const RunConfig& cfg)
{
    cfg.validate();
    PipelineResult r;
    r.profile = build_profile(features, cfg.profile_params(features.meta));
    r.plan = plan_for_segments(r.profile.segments, cfg.speedup_config());
    r.selection = select_frames(r.profile, r.plan, features, cfg.graph_params());
    r.report = evaluate_selection(r.selection.indices, r.profile.raw_scores, features, cfg.speedup,
                                  cfg.tau_max);
    return r;
}

} // namespace semfast

namespace semfast {

void write_selection_graphs(const SemanticProfile& profile, const SpeedupPlan& plan,
                            const FeatureSet& features, const GraphParams& params,
                            std::ostream& out)
{
    const double target_flow = median_flow(features.frames);
    bool header = true;
    for (const auto& s : profile.segments) {
        if (s.length() < 2)
            continue;
        GraphParams p = params;
        p.speedup = s.label == SegmentLabel::semantic ? plan.semantic : plan.non_semantic;
        const auto graph =
            build_graph(s, features.frames, features.meta, profile.raw_scores, p, target_flow);
        write_graph_csv(graph, out, header);
        header = false;
    }
}

} // namespace semfast
