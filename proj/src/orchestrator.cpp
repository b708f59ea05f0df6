#include "graphrl/orchestrator.hpp"

#include <sstream>

#include "json.hpp"

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

AgentEvalReport evaluate_agent(MonitorEnv& env, const DqnAgent& agent, std::size_t episodes,
                               Rng& rng, std::optional<double> epsilon_override,
                               std::vector<std::vector<TranscriptRow>>* transcripts) {
    const double epsilon = epsilon_override.value_or(agent.config().epsilon_min);
    return evaluate_policy(env, agent, episodes, epsilon, rng, transcripts);
}

ForecastReport forecast_report(
    const std::vector<std::pair<std::string, const ForecastModel*>>& models,
    const WindowedDataset& test_scaled, const MinMaxScaler& scaler) {
    if (models.empty()) {
        throw ConfigError("forecast report needs at least one model");
    }
    if (test_scaled.size() == 0) {
        throw ValidationError("forecast report needs a non-empty test set");
    }
    ForecastReport report;
    report.horizons = test_scaled.horizons;
    for (const auto& [name, model] : models) {
        if (model->kind() != ModelKind::Persistence &&
            model->config().horizons != test_scaled.horizons) {
            throw ConfigError("model '" + name + "' has different horizons than the test set");
        }
    }

    const std::size_t n = test_scaled.node_count;
    const std::size_t windows = test_scaled.size();
    for (const auto& [name, model] : models) {
        std::map<int, Metrics> per_horizon;
        // one pass over the windows, filling every horizon's rows
        std::vector<Matrix> preds(report.horizons.size(), Matrix(windows, n));
        std::vector<Matrix> actuals(report.horizons.size(), Matrix(windows, n));
        for (std::size_t i = 0; i < windows; ++i) {
            const Matrix pred_scaled = model->predict_scaled(test_scaled.windows[i]);
            const Matrix pred_original = scaler.invert(pred_scaled);
            const Matrix actual_original = scaler.invert(test_scaled.targets[i]);
            for (std::size_t k = 0; k < report.horizons.size(); ++k) {
                for (std::size_t j = 0; j < n; ++j) {
                    preds[k](i, j) = pred_original(k, j);
                    actuals[k](i, j) = actual_original(k, j);
                }
            }
        }
        for (std::size_t k = 0; k < report.horizons.size(); ++k) {
            per_horizon[report.horizons[k]] = compute_metrics(preds[k], actuals[k]);
        }
        report.table[name] = std::move(per_horizon);
    }
    return report;
}

void write_metrics_json(const std::string& path, const ForecastReport* forecast,
                        const AgentEvalReport* agent) {
    nlohmann::json j = nlohmann::json::object();
    if (forecast != nullptr) {
        nlohmann::json f = nlohmann::json::object();
        for (const auto& [model, horizons] : forecast->table) {
            nlohmann::json h = nlohmann::json::object();
            for (const auto& [horizon, metrics] : horizons) {
                h[std::to_string(horizon)] = {
                    {"mae", metrics.mae}, {"mape", metrics.mape}, {"rmse", metrics.rmse}};
            }
            f[model] = std::move(h);
        }
        j["forecast"] = std::move(f);
    }
    if (agent != nullptr) {
        j["agent"] = {{"episodes", agent->episode_scores}, {"total", agent->total}};
    }
    write_text_file(path, j.dump(2) + "\n");
}

void write_rewards_csv(const std::string& path, const std::vector<EpisodeRecord>& records) {
    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto& r : records) scores.push_back(r.score);
    write_rewards_csv(path, scores);
}

void write_rewards_csv(const std::string& path, const std::vector<double>& scores) {
    std::ostringstream out;
    out << "episode,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << i << ',' << format_double(scores[i]) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<double> scores_from_transcripts(const std::vector<std::vector<TranscriptRow>>& runs) {
    std::vector<double> scores;
    scores.reserve(runs.size());
    for (const auto& rows : runs) {
        double total = 0.0;
        for (const auto& row : rows) total += row.reward;
        scores.push_back(total);
    }
    return scores;
}

} // namespace graphrl
