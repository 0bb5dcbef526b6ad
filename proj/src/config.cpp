#include "semfast/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace semfast {

using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const
{
    if (sigma && !(*sigma > 0.0))
        throw ConfigError("sigma must be positive");
    if (smoothing_sigma && !(*smoothing_sigma > 0.0))
        throw ConfigError("smoothing_sigma must be positive");
    if (min_segment_len && *min_segment_len < 1)
        throw ConfigError("min_segment_len must be at least 1");
    if (tau_max < speedup)
        throw ConfigError("tau_max must be at least the speed-up");
    ScoreParams score;
    score.theta = theta;
    score.zeta = zeta;
    score.persistence_window = persistence_window;
    score.persistence_min_hits = persistence_min_hits;
    score.persistence_radius = persistence_radius;
    score.validate();
    speedup_config().validate();
    graph_params().validate();
}

ProfileParams RunConfig::profile_params(const VideoMeta& meta) const
{
    ProfileParams p;
    p.score = ScoreParams::for_video(meta);
    if (sigma)
        p.score.sigma = *sigma;
    p.score.theta = theta;
    p.score.zeta = zeta;
    p.score.persistence_window = persistence_window;
    p.score.persistence_min_hits = persistence_min_hits;
    p.score.persistence_radius = persistence_radius;
    p.score.normalize_area = normalize_area;
    p.kernel_sigma = smoothing_sigma.value_or(meta.fps);
    p.min_segment_len = min_segment_len.value_or(2 * static_cast<FrameIndex>(speedup));
    return p;
}

SpeedupConfig RunConfig::speedup_config() const
{
    return {speedup, lambda1, lambda2, tau_max};
}

GraphParams RunConfig::graph_params() const
{
    GraphParams g;
    g.tau_max = tau_max;
    g.alpha = alpha;
    g.beta = beta;
    g.gamma = gamma;
    g.eta = eta;
    g.epsilon = epsilon;
    g.speedup = speedup;
    return g;
}

namespace {

template <class T>
void read_value(const json& v, const std::string& key, T& out)
{
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw ConfigError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw ConfigError("");
        } else {
            if (!v.is_string())
                throw ConfigError("");
        }
        out = v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

template <class T>
void read_optional(const json& v, const std::string& key, std::optional<T>& out)
{
    if (v.is_null()) {
        out.reset();
        return;
    }
    T value{};
    read_value(v, key, value);
    out = value;
}

} // namespace

RunConfig parse_config(std::string_view json_text, RunConfig cfg)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    for (const auto& [key, v] : j.items()) {
        if (key == "sigma") read_optional(v, key, cfg.sigma);
        else if (key == "theta") read_value(v, key, cfg.theta);
        else if (key == "zeta") read_value(v, key, cfg.zeta);
        else if (key == "persistence_window") read_value(v, key, cfg.persistence_window);
        else if (key == "persistence_min_hits") read_value(v, key, cfg.persistence_min_hits);
        else if (key == "persistence_radius") read_value(v, key, cfg.persistence_radius);
        else if (key == "normalize_area") read_value(v, key, cfg.normalize_area);
        else if (key == "smoothing_sigma") read_optional(v, key, cfg.smoothing_sigma);
        else if (key == "min_segment_len") read_optional(v, key, cfg.min_segment_len);
        else if (key == "speedup") read_value(v, key, cfg.speedup);
        else if (key == "lambda1") read_value(v, key, cfg.lambda1);
        else if (key == "lambda2") read_value(v, key, cfg.lambda2);
        else if (key == "tau_max") read_value(v, key, cfg.tau_max);
        else if (key == "alpha") read_value(v, key, cfg.alpha);
        else if (key == "beta") read_value(v, key, cfg.beta);
        else if (key == "gamma") read_value(v, key, cfg.gamma);
        else if (key == "eta") read_value(v, key, cfg.eta);
        else if (key == "epsilon") read_value(v, key, cfg.epsilon);
        else if (key == "features") read_value(v, key, cfg.features);
        else if (key == "seed") read_value(v, key, cfg.seed);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base));
}

std::string config_to_json(const RunConfig& cfg)
{
    auto opt = [](const auto& o) { return o ? ordered_json(*o) : ordered_json(nullptr); };
    ordered_json j;
    j["sigma"] = opt(cfg.sigma);
    j["theta"] = cfg.theta;
    j["zeta"] = cfg.zeta;
    j["persistence_window"] = cfg.persistence_window;
    j["persistence_min_hits"] = cfg.persistence_min_hits;
    j["persistence_radius"] = cfg.persistence_radius;
    j["normalize_area"] = cfg.normalize_area;
    j["smoothing_sigma"] = opt(cfg.smoothing_sigma);
    j["min_segment_len"] = opt(cfg.min_segment_len);
    j["speedup"] = cfg.speedup;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["tau_max"] = cfg.tau_max;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["gamma"] = cfg.gamma;
    j["eta"] = cfg.eta;
    j["epsilon"] = cfg.epsilon;
    j["features"] = cfg.features;
    j["seed"] = cfg.seed;
    return j.dump(2);
}

} // namespace semfast
