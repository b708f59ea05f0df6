#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphrl/dqn.hpp"
#include "graphrl/errors.hpp"
#include "graphrl/forecaster.hpp"
#include "graphrl/metrics.hpp"
#include "graphrl/monitor_env.hpp"
#include "graphrl/rng.hpp"

namespace graphrl {

struct RunConfig {
    std::size_t episodes = 50;     // training episodes
    std::size_t step_budget = 0;   // 0: use the env's monitor length
    std::size_t eval_episodes = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (episodes < 1) throw ConfigError("run: episodes must be >= 1");
        if (eval_episodes < 1) throw ConfigError("run: eval_episodes must be >= 1");
    }
};

struct EpisodeRecord {
    std::size_t index = 0;
    double score = 0.0;
    std::size_t steps = 0;
    double final_epsilon = 0.0;
    double wall_seconds = 0.0;
    bool truncated = false; // data ran out before the monitor length
};

/// One training episode loop: reset, then act / step / memorize until done or
/// the step budget runs out; replay fires exactly once, after the episode.
/// Works with any agent exposing act/memorize/replay/epsilon.
template <class AgentT>
std::vector<EpisodeRecord> run_training(MonitorEnv& env, AgentT& agent, const RunConfig& run,
                                        std::vector<std::vector<TranscriptRow>>* transcripts =
                                            nullptr) {
    run.validate();
    const std::size_t budget =
        run.step_budget > 0 ? run.step_budget : env.config().monitor_length;
    std::vector<EpisodeRecord> records;
    records.reserve(run.episodes);
    for (std::size_t episode = 0; episode < run.episodes; ++episode) {
        const auto start = std::chrono::steady_clock::now();
        EpisodeRecord record;
        record.index = episode;
        std::vector<double> observation = env.reset();
        for (std::size_t t = 0; t < budget; ++t) {
            const int action = agent.act(observation);
            const StepOutcome outcome = env.step(action);
            Transition transition;
            transition.state = observation;
            transition.action = action;
            transition.reward = outcome.reward;
            transition.next_state = outcome.next_observation;
            transition.done = outcome.done;
            agent.memorize(std::move(transition));
            record.score += outcome.reward;
            ++record.steps;
            observation = outcome.next_observation;
            if (outcome.done) {
                record.truncated = outcome.data_exhausted;
                break;
            }
        }
        agent.replay();
        record.final_epsilon = agent.epsilon();
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (transcripts != nullptr) transcripts->push_back(env.transcript());
        records.push_back(record);
    }
    return records;
}

struct AgentEvalReport {
    std::vector<double> episode_scores;
    double total = 0.0;
};

/// Runs episodes with a fixed exploration rate and no learning: no memorize,
/// no replay, agent state untouched. Exploration randomness comes from the
/// caller's rng, not the agent's stream.
template <class PolicyT>
AgentEvalReport evaluate_policy(MonitorEnv& env, const PolicyT& policy, std::size_t episodes,
                                double epsilon, Rng& rng,
                                std::vector<std::vector<TranscriptRow>>* transcripts = nullptr) {
    AgentEvalReport report;
    const std::size_t n_actions = env.action_count();
    for (std::size_t episode = 0; episode < episodes; ++episode) {
        std::vector<double> observation = env.reset();
        double score = 0.0;
        while (true) {
            int action;
            if (epsilon > 0.0 && rng.uniform() < epsilon) {
                action = static_cast<int>(rng.uniform_index(n_actions));
            } else {
                action = policy.greedy_action(observation);
            }
            const StepOutcome outcome = env.step(action);
            score += outcome.reward;
            observation = outcome.next_observation;
            if (outcome.done) break;
        }
        if (transcripts != nullptr) transcripts->push_back(env.transcript());
        report.episode_scores.push_back(score);
        report.total += score;
    }
    return report;
}

/// Evaluation with epsilon pinned to the agent's floor (or an explicit
/// override, e.g. 0 for fully greedy scoring).
AgentEvalReport evaluate_agent(MonitorEnv& env, const DqnAgent& agent, std::size_t episodes,
                               Rng& rng, std::optional<double> epsilon_override = std::nullopt,
                               std::vector<std::vector<TranscriptRow>>* transcripts = nullptr);

/// MAE/MAPE/RMSE per model per horizon, in original units.
struct ForecastReport {
    std::vector<int> horizons;
    std::map<std::string, std::map<int, Metrics>> table; // model -> horizon -> metrics
};

ForecastReport forecast_report(
    const std::vector<std::pair<std::string, const ForecastModel*>>& models,
    const WindowedDataset& test_scaled, const MinMaxScaler& scaler);

/// metrics.json with top-level `forecast` and/or `agent` sections.
void write_metrics_json(const std::string& path, const ForecastReport* forecast,
                        const AgentEvalReport* agent);

/// rewards.csv: `episode,score`, one row per episode, in order.
void write_rewards_csv(const std::string& path, const std::vector<EpisodeRecord>& records);
void write_rewards_csv(const std::string& path, const std::vector<double>& scores);

/// Rebuilds episode scores from saved transcripts; feeding these back into
/// write_rewards_csv reproduces the original file byte-for-byte.
std::vector<double> scores_from_transcripts(const std::vector<std::vector<TranscriptRow>>& runs);

} // namespace graphrl
