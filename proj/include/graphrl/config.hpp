#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphrl/bayes_tune.hpp"
#include "graphrl/dqn.hpp"
#include "graphrl/forecaster.hpp"
#include "graphrl/synthetic.hpp"

namespace graphrl {

struct DataConfig {
    std::string series_csv;
    std::string adjacency_csv;
    double train_fraction = 0.8;
};

struct ForecastConfig {
    std::string kind = "tgcn"; // tgcn | gru_only | persistence
    TgcnConfig model;
    std::string checkpoint = "forecast_model.json";
    /// Extra checkpoints to include in eval-forecast reports.
    std::vector<std::string> eval_checkpoints;
    bool include_persistence = true;
};

struct EnvSectionConfig {
    std::string band_table_csv; // empty: built-in heart-rate default
    std::vector<std::string> action_labels = {"no-action", "review", "urgent-team",
                                              "critical-team"};
    double reward = 10.0;
    std::size_t monitor_length = 500;
    std::string source = "replay"; // replay | forecast
    std::size_t monitored_node = 0;
    std::size_t context = 4;
    std::string forecast_checkpoint; // required when source == forecast
};

struct AgentSectionConfig {
    AgentConfig agent;
    std::string trunk = "dense"; // dense | graph
    std::string checkpoint = "agent.json";
};

struct RunSectionConfig {
    std::size_t episodes = 50;
    std::size_t step_budget = 0;
    std::size_t eval_episodes = 10;
    bool write_transcripts = true;
    /// Exploration rate during evaluation; negative means "use epsilon_min".
    double eval_epsilon = -1.0;
};

struct TuneSectionConfig {
    std::string target = "forecast"; // forecast | agent
    std::size_t budget = 20;
    std::vector<SearchDim> space;
};

/// Fully resolved run configuration: one JSON file with a section per module.
/// Unknown keys anywhere are a hard error, so typos cannot silently change a
/// run.
struct FullConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "run";
    DataConfig data;
    SyntheticSpec synthetic;
    ForecastConfig forecast;
    EnvSectionConfig env;
    AgentSectionConfig agent;
    RunSectionConfig run;
    TuneSectionConfig tune;
};

FullConfig load_config(const std::string& path);
FullConfig parse_config_json(const std::string& text, const std::string& origin);

/// Resolved snapshot of every field (defaults filled in), as embedded in the
/// run manifest.
std::string config_snapshot_json(const FullConfig& config);

} // namespace graphrl
