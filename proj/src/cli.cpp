#include "graphrl/cli.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphrl/config.hpp"
#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"
#include "graphrl/orchestrator.hpp"
#include "graphrl/sha256.hpp"

namespace graphrl {

namespace {

namespace fs = std::filesystem;

constexpr const char* kArtifactVersion = "0.1.0";

std::string join_path(const std::string& dir, const std::string& name) {
    if (fs::path(name).is_absolute()) return name;
    return (fs::path(dir) / name).string();
}

std::string require_input_file(const std::string& path, const std::string& what) {
    if (path.empty()) {
        throw ConfigError("missing config value: " + what);
    }
    if (!fs::exists(path)) {
        throw ConfigError(what + " file does not exist: " + path);
    }
    return path;
}

/// Run manifest: written before the heavy work starts, rewritten with the
/// final output list when the command finishes.
class ManifestWriter {
public:
    ManifestWriter(std::string out_dir, std::string command, const FullConfig& config)
        : path_(join_path(out_dir, "manifest.json")), command_(std::move(command)) {
        body_["artifact"] = "graphrl";
        body_["version"] = kArtifactVersion;
        body_["manifest_format"] = "graphrl-manifest-v1";
        body_["command"] = command_;
        body_["seed"] = config.seed;
        body_["config"] = nlohmann::json::parse(config_snapshot_json(config));
        body_["inputs"] = nlohmann::json::object();
        body_["outputs"] = nlohmann::json::array();
        body_["started_at_unix"] = static_cast<std::int64_t>(std::time(nullptr));
    }

    void add_input(const std::string& path) {
        body_["inputs"][path] = "sha256:" + sha256_file_hex(path);
    }

    void write_started() { write_text_file(path_, body_.dump(2) + "\n"); }

    void add_output(const std::string& path) { outputs_.push_back(path); }

    void write_finished() {
        body_["outputs"] = outputs_;
        body_["finished_at_unix"] = static_cast<std::int64_t>(std::time(nullptr));
        write_text_file(path_, body_.dump(2) + "\n");
    }

private:
    std::string path_;
    std::string command_;
    nlohmann::json body_;
    std::vector<std::string> outputs_;
};

struct ForecastData {
    TimeSeries series;
    Matrix adjacency;
    std::unique_ptr<NormalizedGraph> graph;
    MinMaxScaler scaler;
    WindowedDataset train;
    WindowedDataset test;
};

ForecastData prepare_forecast_data(const FullConfig& config, ManifestWriter& manifest) {
    ForecastData data;
    data.series = load_series_csv(
        require_input_file(config.data.series_csv, "data.series_csv"));
    data.adjacency = load_adjacency_csv(
        require_input_file(config.data.adjacency_csv, "data.adjacency_csv"));
    manifest.add_input(config.data.series_csv);
    manifest.add_input(config.data.adjacency_csv);
    data.graph = std::make_unique<NormalizedGraph>(
        NormalizedGraph::from_adjacency(data.adjacency));

    const std::size_t split =
        chronological_split_point(data.series.length(), config.data.train_fraction);
    const Matrix train_rows = matrix_rows(data.series.values, 0, split);
    const Matrix test_rows = matrix_rows(data.series.values, split, data.series.length());
    data.scaler = MinMaxScaler::fit(train_rows);
    const auto& horizons = config.forecast.model.horizons;
    const std::size_t w = config.forecast.model.window;
    data.train = build_windows(data.scaler.apply(train_rows), w, horizons,
                               data.series.step_seconds);
    data.test = build_windows(data.scaler.apply(test_rows), w, horizons,
                              data.series.step_seconds);
    return data;
}

TgcnConfig resolved_model_config(const FullConfig& config, std::size_t n_nodes) {
    TgcnConfig model = config.forecast.model;
    model.n_nodes = n_nodes;
    model.seed = config.seed;
    model.validate();
    return model;
}

BandTable load_band_table(const FullConfig& config, ManifestWriter& manifest) {
    if (config.env.band_table_csv.empty()) {
        return BandTable::default_heart_rate();
    }
    const auto path = require_input_file(config.env.band_table_csv, "env.band_table_csv");
    manifest.add_input(path);
    return BandTable::load_csv(path);
}

struct EnvBundle {
    TimeSeries series;
    std::unique_ptr<NormalizedGraph> graph;       // only for forecast source / graph trunk
    std::unique_ptr<ForecastModel> model;         // only for forecast source
    std::unique_ptr<MonitorEnv> env;
};

EnvBundle build_env(const FullConfig& config, ManifestWriter& manifest) {
    EnvBundle bundle;
    bundle.series = load_series_csv(
        require_input_file(config.data.series_csv, "data.series_csv"));
    manifest.add_input(config.data.series_csv);

    EnvConfig env_config;
    env_config.bands = load_band_table(config, manifest);
    env_config.action_labels = config.env.action_labels;
    env_config.reward_magnitude = config.env.reward;
    env_config.monitor_length = config.env.monitor_length;
    env_config.monitored_node = config.env.monitored_node;
    env_config.context_size = config.env.context;

    if (config.env.source == "forecast") {
        env_config.source = StateSource::Forecast;
        const auto ckpt =
            require_input_file(config.env.forecast_checkpoint, "env.forecast_checkpoint");
        manifest.add_input(ckpt);
        const auto adj_path =
            require_input_file(config.data.adjacency_csv, "data.adjacency_csv");
        manifest.add_input(adj_path);
        bundle.graph = std::make_unique<NormalizedGraph>(
            NormalizedGraph::from_adjacency(load_adjacency_csv(adj_path)));
        bundle.model =
            std::make_unique<ForecastModel>(ForecastModel::load(ckpt, bundle.graph.get()));
        bundle.env = std::make_unique<MonitorEnv>(env_config, bundle.series, bundle.model.get());
    } else {
        env_config.source = StateSource::Replay;
        bundle.env = std::make_unique<MonitorEnv>(env_config, bundle.series);
    }
    return bundle;
}

DqnAgent build_agent(const FullConfig& config, const MonitorEnv& env,
                     const NormalizedGraph* graph) {
    AgentConfig agent_config = config.agent.agent;
    agent_config.seed = config.seed;
    agent_config.n_actions = env.action_count();
    agent_config.state_dim = env.state_dim();
    QNetwork net = [&] {
        if (config.agent.trunk == "graph") {
            if (graph == nullptr) {
                throw ConfigError("agent.trunk=graph requires data.adjacency_csv");
            }
            if (graph->node_count() != env.state_dim()) {
                throw ConfigError("graph trunk needs observation length " +
                                  std::to_string(graph->node_count()) + ", env produces " +
                                  std::to_string(env.state_dim()));
            }
            return QNetwork::graph(graph, agent_config.hidden1, agent_config.hidden2,
                                   agent_config.n_actions, agent_config.seed);
        }
        return QNetwork::dense(agent_config.state_dim, agent_config.hidden1,
                               agent_config.hidden2, agent_config.n_actions,
                               agent_config.seed);
    }();
    return DqnAgent(agent_config, std::move(net));
}

void write_transcripts(const std::string& out_dir, const std::string& prefix,
                       const std::vector<std::vector<TranscriptRow>>& transcripts,
                       ManifestWriter& manifest) {
    const auto dir = fs::path(out_dir) / "transcripts";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_ep%03zu.csv", prefix.c_str(), i);
        const auto path = (dir / name).string();
        save_transcript_csv(path, transcripts[i]);
        manifest.add_output(path);
    }
}

std::optional<double> eval_epsilon_override(const FullConfig& config) {
    if (config.run.eval_epsilon >= 0.0) return config.run.eval_epsilon;
    return std::nullopt;
}

// --- subcommand bodies ------------------------------------------------------

int cmd_gen_synthetic(FullConfig config, const std::string& out_dir) {
    config.synthetic.seed = config.seed;
    ManifestWriter manifest(out_dir, "gen-synthetic", config);
    manifest.write_started();
    const auto output = synthesize(config.synthetic);
    const auto series_path = join_path(out_dir, "series.csv");
    const auto adjacency_path = join_path(out_dir, "adjacency.csv");
    save_series_csv(series_path, output.series);
    save_adjacency_csv(adjacency_path, output.adjacency);
    manifest.add_output(series_path);
    manifest.add_output(adjacency_path);
    manifest.write_finished();
    std::cout << "wrote " << series_path << " and " << adjacency_path << "\n";
    return 0;
}

int cmd_train_forecast(const FullConfig& config, const std::string& out_dir) {
    ManifestWriter manifest(out_dir, "train-forecast", config);
    auto data = prepare_forecast_data(config, manifest);
    manifest.write_started();

    const ModelKind kind = model_kind_from_name(config.forecast.kind);
    const TgcnConfig model_config = resolved_model_config(config, data.series.node_count());
    auto model = ForecastModel::create(kind, model_config, data.graph.get(), data.scaler);

    if (kind != ModelKind::Persistence) {
        const auto result = train_forecaster(model, data.train);
        std::string trace = "epoch,loss\n";
        for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
            trace += std::to_string(i) + "," + format_double(result.loss_trace[i]) + "\n";
        }
        const auto trace_path = join_path(out_dir, "loss_trace.csv");
        write_text_file(trace_path, trace);
        manifest.add_output(trace_path);
    }
    const auto checkpoint_path = join_path(out_dir, config.forecast.checkpoint);
    model.save(checkpoint_path);
    manifest.add_output(checkpoint_path);

    std::vector<std::pair<std::string, const ForecastModel*>> models;
    models.emplace_back(model_kind_name(kind), &model);
    std::unique_ptr<ForecastModel> persistence;
    if (config.forecast.include_persistence && kind != ModelKind::Persistence) {
        persistence = std::make_unique<ForecastModel>(ForecastModel::create(
            ModelKind::Persistence, model_config, nullptr, data.scaler));
        models.emplace_back("persistence", persistence.get());
    }
    const auto report = forecast_report(models, data.test, data.scaler);
    const auto metrics_path = join_path(out_dir, "metrics.json");
    write_metrics_json(metrics_path, &report, nullptr);
    manifest.add_output(metrics_path);
    manifest.write_finished();
    std::cout << "trained " << model_kind_name(kind) << "; metrics in " << metrics_path << "\n";
    return 0;
}

int cmd_eval_forecast(const FullConfig& config, const std::string& out_dir) {
    ManifestWriter manifest(out_dir, "eval-forecast", config);
    auto data = prepare_forecast_data(config, manifest);

    std::vector<std::string> checkpoint_paths;
    checkpoint_paths.push_back(
        require_input_file(config.forecast.checkpoint, "forecast.checkpoint"));
    for (const auto& extra : config.forecast.eval_checkpoints) {
        checkpoint_paths.push_back(require_input_file(extra, "forecast.eval_checkpoints"));
    }
    for (const auto& p : checkpoint_paths) manifest.add_input(p);
    manifest.write_started();

    std::vector<std::unique_ptr<ForecastModel>> loaded;
    std::vector<std::pair<std::string, const ForecastModel*>> models;
    for (const auto& path : checkpoint_paths) {
        loaded.push_back(
            std::make_unique<ForecastModel>(ForecastModel::load(path, data.graph.get())));
        std::string name = model_kind_name(loaded.back()->kind());
        // keep names unique when several checkpoints share a kind
        for (const auto& [existing, ptr] : models) {
            if (existing == name) {
                name += "_" + std::to_string(models.size());
                break;
            }
        }
        models.emplace_back(name, loaded.back().get());
    }
    std::unique_ptr<ForecastModel> persistence;
    if (config.forecast.include_persistence) {
        persistence = std::make_unique<ForecastModel>(ForecastModel::create(
            ModelKind::Persistence, loaded.front()->config(), nullptr, data.scaler));
        models.emplace_back("persistence", persistence.get());
    }
    const auto report = forecast_report(models, data.test, data.scaler);
    const auto metrics_path = join_path(out_dir, "metrics.json");
    write_metrics_json(metrics_path, &report, nullptr);
    manifest.add_output(metrics_path);
    manifest.write_finished();
    std::cout << "evaluated " << models.size() << " model(s); metrics in " << metrics_path
              << "\n";
    return 0;
}

int cmd_train_agent(const FullConfig& config, const std::string& out_dir) {
    ManifestWriter manifest(out_dir, "train-agent", config);
    auto bundle = build_env(config, manifest);
    manifest.write_started();

    // the graph trunk may also use an adjacency with a replay source
    std::unique_ptr<NormalizedGraph> trunk_graph;
    const NormalizedGraph* graph = bundle.graph.get();
    if (graph == nullptr && config.agent.trunk == "graph") {
        const auto adj_path =
            require_input_file(config.data.adjacency_csv, "data.adjacency_csv");
        manifest.add_input(adj_path);
        trunk_graph = std::make_unique<NormalizedGraph>(
            NormalizedGraph::from_adjacency(load_adjacency_csv(adj_path)));
        graph = trunk_graph.get();
    }
    DqnAgent agent = build_agent(config, *bundle.env, graph);

    RunConfig run;
    run.episodes = config.run.episodes;
    run.step_budget = config.run.step_budget;
    run.eval_episodes = config.run.eval_episodes;
    run.seed = config.seed;

    std::vector<std::vector<TranscriptRow>> train_transcripts;
    const auto records = run_training(*bundle.env, agent, run,
                                      config.run.write_transcripts ? &train_transcripts
                                                                   : nullptr);
    const auto rewards_path = join_path(out_dir, "rewards.csv");
    write_rewards_csv(rewards_path, records);
    manifest.add_output(rewards_path);

    const auto epsilon_path = join_path(out_dir, "epsilon_trace.csv");
    std::string eps_csv = "episode,epsilon\n";
    for (const auto& r : records) {
        eps_csv += std::to_string(r.index) + "," + format_double(r.final_epsilon) + "\n";
    }
    write_text_file(epsilon_path, eps_csv);
    manifest.add_output(epsilon_path);

    const auto checkpoint_path = join_path(out_dir, config.agent.checkpoint);
    agent.save(checkpoint_path);
    manifest.add_output(checkpoint_path);

    Rng eval_rng = Rng::substream(config.seed, "eval");
    std::vector<std::vector<TranscriptRow>> eval_transcripts;
    const auto eval_report = evaluate_agent(*bundle.env, agent, config.run.eval_episodes,
                                            eval_rng, eval_epsilon_override(config),
                                            config.run.write_transcripts ? &eval_transcripts
                                                                         : nullptr);
    const auto metrics_path = join_path(out_dir, "metrics.json");
    write_metrics_json(metrics_path, nullptr, &eval_report);
    manifest.add_output(metrics_path);

    if (config.run.write_transcripts) {
        write_transcripts(out_dir, "train", train_transcripts, manifest);
        write_transcripts(out_dir, "eval", eval_transcripts, manifest);
    }
    manifest.write_finished();
    std::cout << "trained agent for " << records.size() << " episodes; eval total "
              << format_double(eval_report.total) << "\n";
    return 0;
}

int cmd_eval_agent(const FullConfig& config, const std::string& out_dir) {
    ManifestWriter manifest(out_dir, "eval-agent", config);
    auto bundle = build_env(config, manifest);
    const auto ckpt = require_input_file(config.agent.checkpoint, "agent.checkpoint");
    manifest.add_input(ckpt);
    manifest.write_started();

    std::unique_ptr<NormalizedGraph> trunk_graph;
    const NormalizedGraph* graph = bundle.graph.get();
    if (graph == nullptr && config.agent.trunk == "graph") {
        const auto adj_path =
            require_input_file(config.data.adjacency_csv, "data.adjacency_csv");
        trunk_graph = std::make_unique<NormalizedGraph>(
            NormalizedGraph::from_adjacency(load_adjacency_csv(adj_path)));
        graph = trunk_graph.get();
    }
    const DqnAgent agent = DqnAgent::load(ckpt, graph);

    Rng eval_rng = Rng::substream(config.seed, "eval");
    std::vector<std::vector<TranscriptRow>> transcripts;
    const auto report = evaluate_agent(*bundle.env, agent, config.run.eval_episodes, eval_rng,
                                       eval_epsilon_override(config),
                                       config.run.write_transcripts ? &transcripts : nullptr);
    const auto rewards_path = join_path(out_dir, "rewards.csv");
    write_rewards_csv(rewards_path, report.episode_scores);
    manifest.add_output(rewards_path);
    const auto metrics_path = join_path(out_dir, "metrics.json");
    write_metrics_json(metrics_path, nullptr, &report);
    manifest.add_output(metrics_path);
    if (config.run.write_transcripts) {
        write_transcripts(out_dir, "eval", transcripts, manifest);
    }
    manifest.write_finished();
    std::cout << "evaluated agent over " << report.episode_scores.size()
              << " episodes; total " << format_double(report.total) << "\n";
    return 0;
}

SearchSpace tune_space_for(const FullConfig& config) {
    SearchSpace space;
    if (!config.tune.space.empty()) {
        space.dims = config.tune.space;
    } else if (config.tune.target == "forecast") {
        space.dims = {{"learning_rate", 1e-4, 1e-1, SearchDim::Scale::Log10},
                      {"lambda", 1e-8, 1e-2, SearchDim::Scale::Log10}};
    } else {
        space.dims = {{"learning_rate", 1e-4, 5e-2, SearchDim::Scale::Log10},
                      {"gamma", 0.01, 0.99, SearchDim::Scale::Linear},
                      {"epsilon_decay", 0.8, 0.999, SearchDim::Scale::Linear}};
    }
    space.validate();
    const std::set<std::string> forecast_keys = {"learning_rate", "lambda"};
    const std::set<std::string> agent_keys = {"learning_rate", "gamma", "epsilon_decay"};
    const auto& valid = config.tune.target == "forecast" ? forecast_keys : agent_keys;
    for (const auto& dim : space.dims) {
        if (valid.count(dim.name) == 0) {
            std::string names;
            for (const auto& v : valid) names += (names.empty() ? "" : ", ") + v;
            throw ConfigError("tune.space name '" + dim.name + "' is not tunable for target " +
                              config.tune.target + " (expected one of: " + names + ")");
        }
    }
    return space;
}

int cmd_tune(const FullConfig& config, const std::string& out_dir) {
    ManifestWriter manifest(out_dir, "tune", config);
    const SearchSpace space = tune_space_for(config);

    std::function<double(const std::vector<double>&)> objective;
    std::unique_ptr<ForecastData> fdata;
    std::unique_ptr<TimeSeries> series;
    std::unique_ptr<BandTable> bands;

    if (config.tune.target == "forecast") {
        fdata = std::make_unique<ForecastData>(prepare_forecast_data(config, manifest));
        // validation split carved chronologically out of the training windows
        const std::size_t fit_count = (fdata->train.size() * 4) / 5;
        if (fit_count == 0 || fit_count == fdata->train.size()) {
            throw ConfigError("training set too small to carve out a validation split");
        }
        objective = [&config, &fdata, fit_count, &space](const std::vector<double>& point) {
            FullConfig trial = config;
            for (std::size_t d = 0; d < space.dims.size(); ++d) {
                if (space.dims[d].name == "learning_rate") {
                    trial.forecast.model.learning_rate = point[d];
                } else if (space.dims[d].name == "lambda") {
                    trial.forecast.model.lambda = point[d];
                }
            }
            const TgcnConfig model_config =
                resolved_model_config(trial, fdata->series.node_count());
            auto model = ForecastModel::create(model_kind_from_name(trial.forecast.kind),
                                               model_config, fdata->graph.get(), fdata->scaler);
            WindowedDataset fit = fdata->train;
            fit.windows.resize(fit_count);
            fit.targets.resize(fit_count);
            train_forecaster(model, fit);
            double mse = 0.0;
            for (std::size_t i = fit_count; i < fdata->train.size(); ++i) {
                mse += mean_squared_error(model.predict_scaled(fdata->train.windows[i]),
                                          fdata->train.targets[i]);
            }
            return mse / static_cast<double>(fdata->train.size() - fit_count);
        };
    } else {
        series = std::make_unique<TimeSeries>(load_series_csv(
            require_input_file(config.data.series_csv, "data.series_csv")));
        manifest.add_input(config.data.series_csv);
        bands = std::make_unique<BandTable>(load_band_table(config, manifest));
        objective = [&config, &series, &bands, &space](const std::vector<double>& point) {
            FullConfig trial = config;
            for (std::size_t d = 0; d < space.dims.size(); ++d) {
                if (space.dims[d].name == "learning_rate") {
                    trial.agent.agent.learning_rate = point[d];
                } else if (space.dims[d].name == "gamma") {
                    trial.agent.agent.gamma = point[d];
                } else if (space.dims[d].name == "epsilon_decay") {
                    trial.agent.agent.epsilon_decay = point[d];
                }
            }
            EnvConfig env_config;
            env_config.bands = *bands;
            env_config.action_labels = trial.env.action_labels;
            env_config.reward_magnitude = trial.env.reward;
            env_config.monitor_length = trial.env.monitor_length;
            env_config.monitored_node = trial.env.monitored_node;
            env_config.context_size = trial.env.context;
            MonitorEnv env(env_config, *series);
            DqnAgent agent = build_agent(trial, env, nullptr);
            RunConfig run;
            run.episodes = trial.run.episodes;
            run.step_budget = trial.run.step_budget;
            run.seed = trial.seed;
            run_training(env, agent, run);
            Rng eval_rng = Rng::substream(trial.seed, "tune-eval");
            const auto report = evaluate_agent(env, agent, trial.run.eval_episodes, eval_rng,
                                               eval_epsilon_override(trial));
            return -report.total / static_cast<double>(trial.run.eval_episodes);
        };
    }
    manifest.write_started();

    const TuneResult result = tune(objective, space, config.tune.budget, config.seed);

    const auto log_path = join_path(out_dir, "tuning_log.csv");
    save_tune_log_csv(log_path, space, result);
    manifest.add_output(log_path);

    nlohmann::json best;
    best["best_objective"] = result.best_objective;
    best["seed"] = result.seed;
    nlohmann::json point = nlohmann::json::object();
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
        point[space.dims[d].name] = result.best_point[d];
    }
    best["best_point"] = std::move(point);
    const auto best_path = join_path(out_dir, "tune_result.json");
    write_text_file(best_path, best.dump(2) + "\n");
    manifest.add_output(best_path);
    manifest.write_finished();
    std::cout << "tuned " << config.tune.target << ": best objective "
              << format_double(result.best_objective) << "\n";
    return 0;
}

int dispatch(const std::string& command, const FullConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (command == "gen-synthetic") return cmd_gen_synthetic(config, out_dir);
    if (command == "train-forecast") return cmd_train_forecast(config, out_dir);
    if (command == "eval-forecast") return cmd_eval_forecast(config, out_dir);
    if (command == "train-agent") return cmd_train_agent(config, out_dir);
    if (command == "eval-agent") return cmd_eval_agent(config, out_dir);
    if (command == "tune") return cmd_tune(config, out_dir);
    throw ConfigError("unknown command: " + command);
}

int run_one(const std::string& command, FullConfig config, const std::string& out_dir) {
    try {
        return dispatch(command, config, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"GraphRL toolkit: temporal graph forecasting with a monitoring RL agent"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_override;
    unsigned jobs = 1;

    const std::vector<std::string> commands = {"gen-synthetic", "train-forecast",
                                               "eval-forecast", "train-agent", "eval-agent",
                                               "tune"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Path to the JSON run config")
            ->required();
        sub->add_option("--seed", seeds,
                        "Root seed override; repeat for a multi-seed sweep");
        sub->add_option("--out", out_override, "Output directory override");
        sub->add_option("--jobs", jobs, "Parallel workers for multi-seed sweeps")
            ->check(CLI::PositiveNumber);
    }

    std::vector<const char*> argv;
    argv.push_back("graphrl");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();

    FullConfig base;
    try {
        base = load_config(config_path);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (!out_override.empty()) base.out_dir = out_override;
    if (seeds.empty()) seeds.push_back(base.seed);

    if (seeds.size() == 1) {
        FullConfig config = base;
        config.seed = seeds[0];
        return run_one(command, config, config.out_dir);
    }

    // multi-seed sweep: independent runs in per-seed directories
    std::vector<int> codes(seeds.size(), 0);
    std::size_t next = 0;
    while (next < seeds.size()) {
        const std::size_t wave = std::min<std::size_t>(jobs, seeds.size() - next);
        std::vector<std::thread> workers;
        for (std::size_t k = 0; k < wave; ++k) {
            const std::size_t idx = next + k;
            workers.emplace_back([&, idx] {
                FullConfig config = base;
                config.seed = seeds[idx];
                const std::string dir =
                    (fs::path(base.out_dir) / ("seed_" + std::to_string(seeds[idx]))).string();
                codes[idx] = run_one(command, config, dir);
            });
        }
        for (auto& w : workers) w.join();
        next += wave;
    }
    int worst = 0;
    for (const int c : codes) worst = std::max(worst, c);
    return worst;
}

} // namespace graphrl
