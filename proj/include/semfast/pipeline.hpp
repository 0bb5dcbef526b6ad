#pragma once

#include "semfast/config.hpp"
#include "semfast/metrics.hpp"
#include "semfast/skipgraph.hpp"

#include <iosfwd>

namespace semfast {

struct PipelineResult
{
    SemanticProfile profile;
    SpeedupPlan plan;
    Selection selection;
    SelectionReport report;
};

/// Score, segment, allocate speed-ups, select frames, evaluate.
PipelineResult run_pipeline(const FeatureSet& features, const RunConfig& cfg);

/// Rebuilds every segment graph of a selection run and writes the
/// frame-to-frame edges as one CSV.
void write_selection_graphs(const SemanticProfile& profile, const SpeedupPlan& plan,
                            const FeatureSet& features, const GraphParams& params,
                            std::ostream& out);

} // namespace semfast
