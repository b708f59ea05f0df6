#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphrl/dataset.hpp"
#include "graphrl/forecaster.hpp"

namespace graphrl {

/// One alert band: half-open value range [lo, hi) mapped to the action that
/// is considered correct inside it.
struct Band {
    double lo = 0.0;
    double hi = 0.0;
    int action = 0;
    std::string label;
};

/// Ordered, contiguous, non-overlapping bands over the monitored value.
/// Lookups outside the covered range clamp to the nearest edge band.
class BandTable {
public:
    explicit BandTable(std::vector<Band> bands);

    struct Lookup {
        int action = 0;
        bool clamped = false;
    };
    Lookup lookup(double value) const;
    int correct_action(double value) const { return lookup(value).action; }

    const std::vector<Band>& bands() const { return bands_; }
    int distinct_action_count() const { return distinct_actions_; }
    double range_lo() const { return bands_.front().lo; }
    double range_hi() const { return bands_.back().hi; }

    static BandTable load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

    /// Heart-rate escalation table used as the default configuration. These
    /// bands are deliberately configurable; they are not a published standard.
    static BandTable default_heart_rate();

private:
    std::vector<Band> bands_;
    int distinct_actions_ = 0;
};

enum class StateSource { Replay, Forecast };

struct EnvConfig {
    BandTable bands = BandTable::default_heart_rate();
    std::vector<std::string> action_labels = {"no-action", "review", "urgent-team",
                                              "critical-team"};
    double reward_magnitude = 10.0; // rho
    std::size_t monitor_length = 500;
    StateSource source = StateSource::Replay;
    std::size_t monitored_node = 0;
    /// Number of context values after the current one (replay mode history,
    /// or the forecast horizon count in forecast mode).
    std::size_t context_size = 4;

    void validate() const;
};

struct StepOutcome {
    std::vector<double> next_observation;
    double reward = 0.0;
    bool done = false;
    int correct_action = 0;   // diagnostic: what the band table held correct
    bool data_exhausted = false;
};

struct TranscriptRow {
    std::size_t step = 0;
    double value = 0.0;
    int action = 0;
    int correct_action = 0;
    double reward = 0.0;
    bool done = false;
};

void save_transcript_csv(const std::string& path, const std::vector<TranscriptRow>& rows);
std::vector<TranscriptRow> load_transcript_csv(const std::string& path);

/// Predictive monitoring environment. Observations are vectors whose first
/// element is the current monitored value; the remaining elements are recent
/// history (replay mode) or the model's horizon forecasts (forecast mode).
/// The action is judged against the band containing the current value:
/// matching the band pays +rho, anything else pays -rho. An episode ends
/// after monitor_length steps or when the data stream runs out.
class MonitorEnv {
public:
    MonitorEnv(EnvConfig config, TimeSeries series);
    MonitorEnv(EnvConfig config, TimeSeries series, const ForecastModel* model);

    std::vector<double> reset();
    StepOutcome step(int action);

    bool done() const { return done_; }
    std::size_t steps_taken() const { return steps_taken_; }
    double current_value() const;
    std::size_t state_dim() const { return config_.context_size + 1; }
    std::size_t action_count() const { return config_.action_labels.size(); }
    const EnvConfig& config() const { return config_; }
    std::size_t range_warnings() const { return range_warnings_; }

    /// Rows recorded since the last reset(), one per step.
    const std::vector<TranscriptRow>& transcript() const { return transcript_; }

private:
    std::vector<double> observation_at(std::size_t index) const;
    std::size_t first_index() const;
    std::size_t last_usable_index() const;

    EnvConfig config_;
    TimeSeries series_;
    const ForecastModel* model_ = nullptr;
    std::size_t cursor_ = 0;
    std::size_t steps_taken_ = 0;
    bool done_ = true;
    bool started_ = false;
    std::size_t range_warnings_ = 0;
    std::vector<TranscriptRow> transcript_;
};

} // namespace graphrl
