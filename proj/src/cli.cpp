#include "semfast/cli.hpp"

#include "semfast/baselines.hpp"
#include "semfast/pipeline.hpp"

#include "format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

namespace semfast {

namespace {

using nlohmann::ordered_json;

class UsageError : public Error
{
public:
    using Error::Error;
};

using Applier = std::function<void(RunConfig&)>;

/// Registers a flag that, when given, overrides `field` after the config file
/// has been applied.
template <class T, class Field>
void add_override(CLI::App* sub, std::vector<Applier>& appliers, const std::string& name,
                  Field RunConfig::*field, const std::string& description)
{
    auto value = std::make_shared<T>();
    CLI::Option* opt = sub->add_option(name, *value, description);
    appliers.push_back([opt, value, field](RunConfig& cfg) {
        if (opt->count() > 0)
            cfg.*field = *value;
    });
}

struct CommonOptions
{
    std::string config_path;
    std::string features_path;
    std::vector<Applier> appliers;
};

void add_run_options(CLI::App* sub, CommonOptions& common)
{
    auto& ap = common.appliers;
    sub->add_option("--config", common.config_path, "JSON config file (flags take precedence)");
    sub->add_option("--features", common.features_path, "Feature file (JSON Lines)");
    add_override<int>(sub, ap, "--speedup", &RunConfig::speedup, "Desired overall speed-up F_d");
    add_override<int>(sub, ap, "--tau-max", &RunConfig::tau_max, "Longest allowed frame skip");
    add_override<double>(sub, ap, "--lambda1", &RunConfig::lambda1, "Weight of |F_ns - F_s|");
    add_override<double>(sub, ap, "--lambda2", &RunConfig::lambda2, "Weight of F_s");
    add_override<double>(sub, ap, "--alpha", &RunConfig::alpha, "Balance term weight");
    add_override<double>(sub, ap, "--beta", &RunConfig::beta, "Velocity term weight");
    add_override<double>(sub, ap, "--gamma", &RunConfig::gamma, "Appearance term weight");
    add_override<double>(sub, ap, "--eta", &RunConfig::eta, "Semantic term weight");
    add_override<double>(sub, ap, "--epsilon", &RunConfig::epsilon, "Semantic term offset");
    add_override<double>(sub, ap, "--theta", &RunConfig::theta, "Reject confidence threshold");
    add_override<double>(sub, ap, "--zeta", &RunConfig::zeta, "Accept confidence threshold");
    add_override<double>(sub, ap, "--sigma", &RunConfig::sigma, "Centrality Gaussian spread, px");
    add_override<double>(sub, ap, "--smoothing-sigma", &RunConfig::smoothing_sigma,
                         "Score smoothing spread, frames");
    add_override<FrameIndex>(sub, ap, "--min-segment-len", &RunConfig::min_segment_len,
                             "Shortest kept segment, frames");
    add_override<int>(sub, ap, "--persistence-window", &RunConfig::persistence_window,
                      "Window of the persistence rule, frames");
    add_override<int>(sub, ap, "--persistence-min-hits", &RunConfig::persistence_min_hits,
                      "Hits required by the persistence rule");
    add_override<double>(sub, ap, "--persistence-radius", &RunConfig::persistence_radius,
                         "Persistence gate radius, bbox diagonals");
    auto flag = std::make_shared<bool>(false);
    auto* opt = sub->add_flag("--normalize-area", *flag, "Divide ROI area by W*H");
    ap.push_back([opt, flag](RunConfig& cfg) {
        if (opt->count() > 0)
            cfg.normalize_area = *flag;
    });
}

RunConfig resolve_config(const CommonOptions& common)
{
    RunConfig cfg;
    if (!common.config_path.empty())
        cfg = load_config(common.config_path, cfg);
    for (const auto& apply : common.appliers)
        apply(cfg);
    if (!common.features_path.empty())
        cfg.features = common.features_path;
    cfg.validate();
    return cfg;
}

FeatureSet load_input(const RunConfig& cfg)
{
    if (cfg.features.empty())
        throw UsageError("--features is required");
    return load_features(cfg.features);
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& body)
{
    if (path.empty()) {
        body(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw Error("cannot open " + path + " for writing");
    body(file);
    if (!file)
        throw Error("write to " + path + " failed");
}

ordered_json plan_json(const SpeedupPlan& plan, const SpeedupConfig& cfg)
{
    return {{"F_d", cfg.desired},
            {"F_s", plan.semantic},
            {"F_ns", plan.non_semantic},
            {"D", plan.deviation},
            {"objective", plan.objective},
            {"L_s", plan.semantic_length},
            {"L_ns", plan.non_semantic_length},
            {"lambda1", cfg.lambda1},
            {"lambda2", cfg.lambda2},
            {"max_speedup", cfg.max_speedup}};
}

ordered_json metrics_json(const SelectionReport& r)
{
    auto opt = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    return {{"selected", r.indices.size()},
            {"semantic_amount", r.semantic_amount},
            {"jitter_amount", opt(r.jitter_amount)},
            {"jitter_improvement_pct", opt(r.jitter_improvement_pct)},
            {"achieved_speedup", r.achieved_speedup},
            {"speedup_deviation", r.speedup_deviation},
            {"deviation_pct_of_worst", r.deviation_pct_of_worst}};
}

ordered_json config_json(const RunConfig& cfg)
{
    return ordered_json::parse(config_to_json(cfg));
}

FaceBurst parse_burst(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("--burst expects START:END, got '" + text + "'");
    try {
        std::size_t used = 0;
        const auto start = std::stoll(text.substr(0, colon), &used);
        if (used != colon)
            throw std::invalid_argument(text);
        const auto rest = text.substr(colon + 1);
        const auto end = std::stoll(rest, &used);
        if (used != rest.size())
            throw std::invalid_argument(text);
        return {start, end};
    } catch (const std::logic_error&) {
        throw UsageError("--burst expects START:END, got '" + text + "'");
    }
}

std::string one_line(std::string text)
{
    for (char& c : text)
        if (c == '\n' || c == '\r')
            c = ' ';
    return text;
}

} // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Semantic fast-forward frame selection for egocentric video", "semfast"};
    app.require_subcommand(1);

    // synth
    ScenarioParams scenario;
    std::vector<std::string> bursts;
    bool random_bursts = false;
    double coverage_min = 0.2;
    double coverage_max = 0.4;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic feature file");
    synth->add_option("--out", synth_out, "Output feature file")->required();
    synth->add_option("--frames", scenario.frame_count, "Frame count");
    synth->add_option("--width", scenario.width, "Frame width, px");
    synth->add_option("--height", scenario.height, "Frame height, px");
    synth->add_option("--fps", scenario.fps, "Frame rate");
    synth->add_option("--seed", scenario.seed, "Random seed");
    synth->add_option("--burst", bursts, "Face burst START:END (repeatable)");
    synth->add_option("--foe-noise", scenario.foe_noise, "FOE std-dev around the centre, px");
    synth->add_option("--flow-mean", scenario.flow_mean, "Mean flow magnitude, px");
    synth->add_option("--flow-noise", scenario.flow_noise, "Flow magnitude std-dev, px");
    synth->add_option("--fp-rate", scenario.false_positive_rate,
                      "Rate of isolated low-confidence detections");
    synth->add_flag("--random-bursts", random_bursts,
                    "Draw bursts, FOE noise and false positives from the seed");
    synth->add_option("--coverage-min", coverage_min, "Lowest burst coverage (random bursts)");
    synth->add_option("--coverage-max", coverage_max, "Highest burst coverage (random bursts)");

    // score
    CommonOptions score_opts;
    std::string score_out;
    auto* score = app.add_subcommand("score", "Per-frame semantic scores as CSV");
    add_run_options(score, score_opts);
    score->add_option("--out", score_out, "Output CSV (default stdout)");

    // segment
    CommonOptions segment_opts;
    std::string segment_out;
    std::string profile_out;
    auto* segment = app.add_subcommand("segment", "Semantic / non-semantic segments as CSV");
    add_run_options(segment, segment_opts);
    segment->add_option("--out", segment_out, "Segments CSV (default stdout)");
    segment->add_option("--profile-out", profile_out, "Per-frame profile CSV");

    // plan
    CommonOptions plan_opts;
    FrameIndex semantic_length = -1;
    FrameIndex non_semantic_length = -1;
    std::string plan_out;
    std::string surface_out;
    auto* plan = app.add_subcommand("plan", "Allocate semantic / non-semantic speed-ups");
    add_run_options(plan, plan_opts);
    plan->add_option("--semantic-length", semantic_length, "L_s, instead of --features");
    plan->add_option("--non-semantic-length", non_semantic_length, "L_ns, instead of --features");
    plan->add_option("--out", plan_out, "Plan JSON (default stdout)");
    plan->add_option("--surface", surface_out, "Objective surface CSV");

    // select
    CommonOptions select_opts;
    std::string select_out;
    std::string select_report;
    std::string graph_dump;
    auto* select = app.add_subcommand("select", "Run the full frame selection");
    add_run_options(select, select_opts);
    select->add_option("--out", select_out, "Selected frame indices (default stdout)");
    select->add_option("--report", select_report, "Report JSON");
    select->add_option("--graph-dump", graph_dump, "Edge costs CSV of every segment graph");

    // baseline
    CommonOptions baseline_opts;
    std::string method;
    std::string baseline_out;
    std::string baseline_report;
    auto* baseline = app.add_subcommand("baseline", "Reference selectors");
    add_run_options(baseline, baseline_opts);
    baseline->add_option("--method", method, "naive or naive-faces")
        ->required()
        ->check(CLI::IsMember({"naive", "naive-faces"}));
    baseline->add_option("--out", baseline_out, "Selected frame indices (default stdout)");
    baseline->add_option("--report", baseline_report, "Report JSON");

    // evaluate
    CommonOptions eval_opts;
    std::string indices_path;
    std::string pairwise_path;
    std::string eval_out;
    std::string csv_row_out;
    std::string label = "selection";
    std::string foe_out;
    auto* evaluate = app.add_subcommand("evaluate", "Metrics of a frame selection");
    add_run_options(evaluate, eval_opts);
    evaluate->add_option("--indices", indices_path, "Selected frame indices")->required();
    evaluate->add_option("--pairwise-foe", pairwise_path,
                         "CSV of FOEs measured between selected pairs");
    evaluate->add_option("--out", eval_out, "Report JSON (default stdout)");
    evaluate->add_option("--csv-row", csv_row_out, "Report as a CSV header plus one row");
    evaluate->add_option("--label", label, "Row label for --csv-row");
    evaluate->add_option("--transition-foe-out", foe_out, "Per-transition proxy FOEs as CSV");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {
                app.exit(e, out, err);
                return exit_ok;
            }
            err << "error: usage: " << one_line(e.what()) << '\n';
            return exit_usage;
        }

        if (synth->parsed()) {
            if (random_bursts) {
                const auto drawn =
                    random_scenario(scenario.seed, scenario.frame_count, coverage_min, coverage_max);
                scenario.bursts = drawn.bursts;
                scenario.foe_noise = drawn.foe_noise;
                scenario.false_positive_rate = drawn.false_positive_rate;
            }
            for (const auto& b : bursts)
                scenario.bursts.push_back(parse_burst(b));
            const auto fs = synth_features(scenario);
            write_features(fs.meta, fs.frames, synth_out);
            return exit_ok;
        }

        if (score->parsed()) {
            const auto cfg = resolve_config(score_opts);
            const auto fs = load_input(cfg);
            const auto params = cfg.profile_params(fs.meta);
            const auto filtered = filter_detections(fs.frames, params.score);
            emit(score_out, out, [&](std::ostream& os) {
                os << "index,score\n";
                for (const auto& f : filtered)
                    os << f.index << ',' << detail::fmt(frame_score(f, fs.meta, params.score))
                       << '\n';
            });
            return exit_ok;
        }

        if (segment->parsed()) {
            const auto cfg = resolve_config(segment_opts);
            const auto fs = load_input(cfg);
            const auto profile = build_profile(fs, cfg.profile_params(fs.meta));
            emit(segment_out, out,
                 [&](std::ostream& os) { write_segments_csv(profile.segments, os); });
            if (!profile_out.empty())
                emit(profile_out, out, [&](std::ostream& os) { write_profile_csv(profile, os); });
            return exit_ok;
        }

        if (plan->parsed()) {
            const auto cfg = resolve_config(plan_opts);
            const auto scfg = cfg.speedup_config();
            const bool lengths_given = semantic_length >= 0 || non_semantic_length >= 0;
            SpeedupPlan result;
            if (lengths_given) {
                if (semantic_length < 0 || non_semantic_length < 0)
                    throw UsageError(
                        "--semantic-length and --non-semantic-length must be given together");
                result = plan_for_segments(
                    std::vector<Segment>{{0, semantic_length, SegmentLabel::semantic},
                                         {semantic_length, semantic_length + non_semantic_length,
                                          SegmentLabel::non_semantic}},
                    scfg);
            } else {
                const auto fs = load_input(cfg);
                const auto profile = build_profile(fs, cfg.profile_params(fs.meta));
                result = plan_for_segments(profile.segments, scfg);
            }
            emit(plan_out, out,
                 [&](std::ostream& os) { os << plan_json(result, scfg).dump(2) << '\n'; });
            if (!surface_out.empty()) {
                const auto cells = objective_surface(result.semantic_length,
                                                     result.non_semantic_length, scfg);
                emit(surface_out, out, [&](std::ostream& os) { write_surface_csv(cells, os); });
            }
            return exit_ok;
        }

        if (select->parsed()) {
            const auto cfg = resolve_config(select_opts);
            const auto fs = load_input(cfg);
            const auto result = run_pipeline(fs, cfg);
            emit(select_out, out,
                 [&](std::ostream& os) { write_indices(result.selection.indices, os); });
            if (!select_report.empty()) {
                ordered_json segments = ordered_json::array();
                for (std::size_t k = 0; k < result.profile.segments.size(); ++k) {
                    const auto& s = result.profile.segments[k];
                    segments.push_back(
                        {{"start", s.start},
                         {"end", s.end},
                         {"label", to_string(s.label)},
                         {"speedup", s.label == SegmentLabel::semantic ? result.plan.semantic
                                                                       : result.plan.non_semantic},
                         {"selected", result.selection.paths[k].frames.size()},
                         {"path_cost", result.selection.paths[k].total_cost}});
                }
                ordered_json report{{"method", "semantic"},
                                    {"frame_count", fs.meta.frame_count},
                                    {"threshold", result.profile.threshold},
                                    {"plan", plan_json(result.plan, cfg.speedup_config())},
                                    {"segments", segments},
                                    {"metrics", metrics_json(result.report)},
                                    {"config", config_json(cfg)}};
                emit(select_report, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
            }
            if (!graph_dump.empty())
                emit(graph_dump, out, [&](std::ostream& os) {
                    write_selection_graphs(result.profile, result.plan, fs, cfg.graph_params(), os);
                });
            return exit_ok;
        }

        if (baseline->parsed()) {
            const auto cfg = resolve_config(baseline_opts);
            const auto fs = load_input(cfg);
            const auto profile = build_profile(fs, cfg.profile_params(fs.meta));
            const auto indices = method == "naive"
                                     ? naive_sample(fs.meta.frame_count, cfg.speedup)
                                     : naive_faces_sample(profile.raw_scores, cfg.speedup);
            if (indices.empty())
                throw Error("baseline selected no frames");
            emit(baseline_out, out, [&](std::ostream& os) { write_indices(indices, os); });
            if (!baseline_report.empty()) {
                const auto r = evaluate_selection(indices, profile.raw_scores, fs, cfg.speedup,
                                                  cfg.tau_max);
                ordered_json report{{"method", method},
                                    {"frame_count", fs.meta.frame_count},
                                    {"metrics", metrics_json(r)},
                                    {"config", config_json(cfg)}};
                emit(baseline_report, out,
                     [&](std::ostream& os) { os << report.dump(2) << '\n'; });
            }
            return exit_ok;
        }

        if (evaluate->parsed()) {
            const auto cfg = resolve_config(eval_opts);
            const auto fs = load_input(cfg);
            std::ifstream idx(indices_path);
            if (!idx)
                throw Error("cannot open " + indices_path);
            const auto indices = read_indices(idx);
            if (indices.empty())
                throw Error("selection is empty");
            check_selection(indices, fs.meta.frame_count);
            const auto profile = build_profile(fs, cfg.profile_params(fs.meta));

            std::optional<std::vector<Point2>> pairwise;
            if (!pairwise_path.empty()) {
                std::ifstream in(pairwise_path);
                if (!in)
                    throw Error("cannot open " + pairwise_path);
                pairwise = read_pairwise_foes(in, indices);
            }
            std::optional<std::span<const Point2>> pairwise_view;
            if (pairwise)
                pairwise_view = std::span<const Point2>(*pairwise);
            const auto r = evaluate_selection(indices, profile.raw_scores, fs, cfg.speedup,
                                              cfg.tau_max, pairwise_view);
            ordered_json report{{"method", label},
                                {"frame_count", fs.meta.frame_count},
                                {"jitter_source", pairwise ? "pairwise" : "proxy"},
                                {"metrics", metrics_json(r)}};
            emit(eval_out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
            if (!csv_row_out.empty())
                emit(csv_row_out, out, [&](std::ostream& os) {
                    os << report_csv_header() << '\n'
                       << report_csv_row(label, fs.meta.frame_count, r) << '\n';
                });
            if (!foe_out.empty()) {
                const auto foes = transition_foes(indices, fs.frames, fs.meta);
                emit(foe_out, out,
                     [&](std::ostream& os) { write_transition_foes(indices, foes, os); });
            }
            return exit_ok;
        }
    } catch (const UsageError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: runtime: " << one_line(e.what()) << '\n';
        return exit_runtime;
    }
    return exit_usage;
}

} // namespace semfast
