#include "graphrl/config.hpp"

#include <set>

#include "json.hpp"

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

namespace {

using nlohmann::json;

void require_known_keys(const json& object, const std::set<std::string>& known,
                        const std::string& section) {
    for (const auto& [key, value] : object.items()) {
        if (known.count(key) == 0) {
            throw ConfigError("unknown config key '" + section + key + "'");
        }
    }
}

template <class T>
void read_field(const json& object, const char* key, T& out, const std::string& section) {
    if (!object.contains(key)) return;
    try {
        out = object.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + section + key + "': " + e.what());
    }
}

void parse_data(const json& j, DataConfig& out) {
    require_known_keys(j, {"series_csv", "adjacency_csv", "train_fraction"}, "data.");
    read_field(j, "series_csv", out.series_csv, "data.");
    read_field(j, "adjacency_csv", out.adjacency_csv, "data.");
    read_field(j, "train_fraction", out.train_fraction, "data.");
}

void parse_synthetic(const json& j, SyntheticSpec& out) {
    require_known_keys(j,
                       {"kind", "nodes", "length", "noise", "diffusion", "extra_edges",
                        "init_lo", "init_hi", "walk_step", "walk_lo", "walk_hi",
                        "step_seconds"},
                       "synthetic.");
    std::string kind = generator_kind_name(out.kind);
    read_field(j, "kind", kind, "synthetic.");
    out.kind = generator_kind_from_name(kind);
    read_field(j, "nodes", out.nodes, "synthetic.");
    read_field(j, "length", out.length, "synthetic.");
    read_field(j, "noise", out.noise, "synthetic.");
    read_field(j, "diffusion", out.diffusion, "synthetic.");
    read_field(j, "extra_edges", out.extra_edges, "synthetic.");
    read_field(j, "init_lo", out.init_lo, "synthetic.");
    read_field(j, "init_hi", out.init_hi, "synthetic.");
    read_field(j, "walk_step", out.walk_step, "synthetic.");
    read_field(j, "walk_lo", out.walk_lo, "synthetic.");
    read_field(j, "walk_hi", out.walk_hi, "synthetic.");
    read_field(j, "step_seconds", out.step_seconds, "synthetic.");
}

void parse_forecast(const json& j, ForecastConfig& out) {
    require_known_keys(j,
                       {"kind", "window", "hidden", "gcn_hidden", "horizons", "lambda",
                        "learning_rate", "epochs", "batch_size", "checkpoint",
                        "eval_checkpoints", "include_persistence"},
                       "forecast.");
    read_field(j, "kind", out.kind, "forecast.");
    model_kind_from_name(out.kind); // validate early
    read_field(j, "window", out.model.window, "forecast.");
    read_field(j, "hidden", out.model.hidden, "forecast.");
    read_field(j, "gcn_hidden", out.model.gcn_hidden, "forecast.");
    read_field(j, "horizons", out.model.horizons, "forecast.");
    read_field(j, "lambda", out.model.lambda, "forecast.");
    read_field(j, "learning_rate", out.model.learning_rate, "forecast.");
    read_field(j, "epochs", out.model.epochs, "forecast.");
    read_field(j, "batch_size", out.model.batch_size, "forecast.");
    read_field(j, "checkpoint", out.checkpoint, "forecast.");
    read_field(j, "eval_checkpoints", out.eval_checkpoints, "forecast.");
    read_field(j, "include_persistence", out.include_persistence, "forecast.");
}

void parse_env(const json& j, EnvSectionConfig& out) {
    require_known_keys(j,
                       {"band_table_csv", "action_labels", "reward", "monitor_length", "source",
                        "monitored_node", "context", "forecast_checkpoint"},
                       "env.");
    read_field(j, "band_table_csv", out.band_table_csv, "env.");
    read_field(j, "action_labels", out.action_labels, "env.");
    read_field(j, "reward", out.reward, "env.");
    read_field(j, "monitor_length", out.monitor_length, "env.");
    read_field(j, "source", out.source, "env.");
    if (out.source != "replay" && out.source != "forecast") {
        throw ConfigError("env.source must be 'replay' or 'forecast', got '" + out.source + "'");
    }
    read_field(j, "monitored_node", out.monitored_node, "env.");
    read_field(j, "context", out.context, "env.");
    read_field(j, "forecast_checkpoint", out.forecast_checkpoint, "env.");
}

void parse_agent(const json& j, AgentSectionConfig& out) {
    require_known_keys(j,
                       {"gamma", "epsilon", "epsilon_decay", "epsilon_min", "batch_size",
                        "memory_capacity", "learning_rate", "hidden1", "hidden2",
                        "state_scale", "use_frozen_target", "trunk", "checkpoint"},
                       "agent.");
    read_field(j, "gamma", out.agent.gamma, "agent.");
    read_field(j, "epsilon", out.agent.epsilon, "agent.");
    read_field(j, "epsilon_decay", out.agent.epsilon_decay, "agent.");
    read_field(j, "epsilon_min", out.agent.epsilon_min, "agent.");
    read_field(j, "batch_size", out.agent.batch_size, "agent.");
    read_field(j, "memory_capacity", out.agent.memory_capacity, "agent.");
    read_field(j, "learning_rate", out.agent.learning_rate, "agent.");
    read_field(j, "hidden1", out.agent.hidden1, "agent.");
    read_field(j, "hidden2", out.agent.hidden2, "agent.");
    read_field(j, "state_scale", out.agent.state_scale, "agent.");
    read_field(j, "use_frozen_target", out.agent.use_frozen_target, "agent.");
    read_field(j, "trunk", out.trunk, "agent.");
    if (out.trunk != "dense" && out.trunk != "graph") {
        throw ConfigError("agent.trunk must be 'dense' or 'graph', got '" + out.trunk + "'");
    }
    read_field(j, "checkpoint", out.checkpoint, "agent.");
}

void parse_run(const json& j, RunSectionConfig& out) {
    require_known_keys(
        j, {"episodes", "step_budget", "eval_episodes", "write_transcripts", "eval_epsilon"},
        "run.");
    read_field(j, "episodes", out.episodes, "run.");
    read_field(j, "step_budget", out.step_budget, "run.");
    read_field(j, "eval_episodes", out.eval_episodes, "run.");
    read_field(j, "write_transcripts", out.write_transcripts, "run.");
    read_field(j, "eval_epsilon", out.eval_epsilon, "run.");
}

void parse_tune(const json& j, TuneSectionConfig& out) {
    require_known_keys(j, {"target", "budget", "space"}, "tune.");
    read_field(j, "target", out.target, "tune.");
    if (out.target != "forecast" && out.target != "agent") {
        throw ConfigError("tune.target must be 'forecast' or 'agent', got '" + out.target + "'");
    }
    read_field(j, "budget", out.budget, "tune.");
    if (j.contains("space")) {
        out.space.clear();
        for (const auto& dim : j.at("space")) {
            require_known_keys(dim, {"name", "lower", "upper", "scale"}, "tune.space[].");
            SearchDim d;
            read_field(dim, "name", d.name, "tune.space.");
            read_field(dim, "lower", d.lower, "tune.space.");
            read_field(dim, "upper", d.upper, "tune.space.");
            std::string scale = "linear";
            read_field(dim, "scale", scale, "tune.space.");
            if (scale == "linear") {
                d.scale = SearchDim::Scale::Linear;
            } else if (scale == "log10") {
                d.scale = SearchDim::Scale::Log10;
            } else {
                throw ConfigError("tune.space scale must be 'linear' or 'log10', got '" + scale +
                                  "'");
            }
            out.space.push_back(std::move(d));
        }
    }
}

} // namespace

FullConfig parse_config_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse config " + origin + ": " + e.what());
    }
    require_known_keys(
        j, {"seed", "out_dir", "data", "synthetic", "forecast", "env", "agent", "run", "tune"},
        "");
    FullConfig config;
    read_field(j, "seed", config.seed, "");
    read_field(j, "out_dir", config.out_dir, "");
    if (j.contains("data")) parse_data(j.at("data"), config.data);
    if (j.contains("synthetic")) parse_synthetic(j.at("synthetic"), config.synthetic);
    if (j.contains("forecast")) parse_forecast(j.at("forecast"), config.forecast);
    if (j.contains("env")) parse_env(j.at("env"), config.env);
    if (j.contains("agent")) parse_agent(j.at("agent"), config.agent);
    if (j.contains("run")) parse_run(j.at("run"), config.run);
    if (j.contains("tune")) parse_tune(j.at("tune"), config.tune);
    return config;
}

FullConfig load_config(const std::string& path) {
    return parse_config_json(read_text_file(path), path);
}

std::string config_snapshot_json(const FullConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["data"] = {{"series_csv", c.data.series_csv},
                 {"adjacency_csv", c.data.adjacency_csv},
                 {"train_fraction", c.data.train_fraction}};
    j["synthetic"] = {{"kind", generator_kind_name(c.synthetic.kind)},
                      {"nodes", c.synthetic.nodes},
                      {"length", c.synthetic.length},
                      {"noise", c.synthetic.noise},
                      {"diffusion", c.synthetic.diffusion},
                      {"extra_edges", c.synthetic.extra_edges},
                      {"init_lo", c.synthetic.init_lo},
                      {"init_hi", c.synthetic.init_hi},
                      {"walk_step", c.synthetic.walk_step},
                      {"walk_lo", c.synthetic.walk_lo},
                      {"walk_hi", c.synthetic.walk_hi},
                      {"step_seconds", c.synthetic.step_seconds}};
    j["forecast"] = {{"kind", c.forecast.kind},
                     {"window", c.forecast.model.window},
                     {"hidden", c.forecast.model.hidden},
                     {"gcn_hidden", c.forecast.model.gcn_hidden},
                     {"horizons", c.forecast.model.horizons},
                     {"lambda", c.forecast.model.lambda},
                     {"learning_rate", c.forecast.model.learning_rate},
                     {"epochs", c.forecast.model.epochs},
                     {"batch_size", c.forecast.model.batch_size},
                     {"checkpoint", c.forecast.checkpoint},
                     {"eval_checkpoints", c.forecast.eval_checkpoints},
                     {"include_persistence", c.forecast.include_persistence}};
    j["env"] = {{"band_table_csv", c.env.band_table_csv},
                {"action_labels", c.env.action_labels},
                {"reward", c.env.reward},
                {"monitor_length", c.env.monitor_length},
                {"source", c.env.source},
                {"monitored_node", c.env.monitored_node},
                {"context", c.env.context},
                {"forecast_checkpoint", c.env.forecast_checkpoint}};
    j["agent"] = {{"gamma", c.agent.agent.gamma},
                  {"epsilon", c.agent.agent.epsilon},
                  {"epsilon_decay", c.agent.agent.epsilon_decay},
                  {"epsilon_min", c.agent.agent.epsilon_min},
                  {"batch_size", c.agent.agent.batch_size},
                  {"memory_capacity", c.agent.agent.memory_capacity},
                  {"learning_rate", c.agent.agent.learning_rate},
                  {"hidden1", c.agent.agent.hidden1},
                  {"hidden2", c.agent.agent.hidden2},
                  {"state_scale", c.agent.agent.state_scale},
                  {"use_frozen_target", c.agent.agent.use_frozen_target},
                  {"trunk", c.agent.trunk},
                  {"checkpoint", c.agent.checkpoint}};
    j["run"] = {{"episodes", c.run.episodes},
                {"step_budget", c.run.step_budget},
                {"eval_episodes", c.run.eval_episodes},
                {"write_transcripts", c.run.write_transcripts},
                {"eval_epsilon", c.run.eval_epsilon}};
    json space = json::array();
    for (const auto& d : c.tune.space) {
        space.push_back({{"name", d.name},
                         {"lower", d.lower},
                         {"upper", d.upper},
                         {"scale", d.scale == SearchDim::Scale::Log10 ? "log10" : "linear"}});
    }
    j["tune"] = {{"target", c.tune.target}, {"budget", c.tune.budget}, {"space", space}};
    return j.dump(2);
}

} // namespace graphrl
