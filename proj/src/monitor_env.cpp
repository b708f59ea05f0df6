#include "graphrl/monitor_env.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

BandTable::BandTable(std::vector<Band> bands) : bands_(std::move(bands)) {
    if (bands_.empty()) {
        throw ValidationError("band table must contain at least one band");
    }
    std::set<int> actions;
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        const Band& b = bands_[i];
        if (!(b.lo < b.hi)) {
            throw ValidationError("band " + std::to_string(i) + " has empty range [" +
                                  format_double(b.lo) + "," + format_double(b.hi) + ")");
        }
        if (b.action < 0) {
            throw ValidationError("band " + std::to_string(i) + " has negative action id");
        }
        if (i > 0 && bands_[i - 1].hi != b.lo) {
            throw ValidationError("bands must be contiguous: band " + std::to_string(i - 1) +
                                  " ends at " + format_double(bands_[i - 1].hi) + ", band " +
                                  std::to_string(i) + " starts at " + format_double(b.lo));
        }
        actions.insert(b.action);
    }
    distinct_actions_ = static_cast<int>(actions.size());
}

BandTable::Lookup BandTable::lookup(double value) const {
    if (!std::isfinite(value)) {
        throw DomainError("band lookup requires a finite value");
    }
    if (value < range_lo()) {
        return {bands_.front().action, true};
    }
    if (value >= range_hi()) {
        return {bands_.back().action, true};
    }
    for (const Band& b : bands_) {
        if (value >= b.lo && value < b.hi) {
            return {b.action, false};
        }
    }
    // unreachable given contiguity
    return {bands_.back().action, true};
}

BandTable BandTable::load_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::vector<Band> bands;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string context = path + " row " + std::to_string(row);
        if (fields.size() != 4) {
            throw ValidationError(context + ": expected lo,hi,action_id,label");
        }
        Band b;
        b.lo = parse_double_field(fields[0], context);
        b.hi = parse_double_field(fields[1], context);
        b.action = static_cast<int>(parse_int_field(fields[2], context));
        b.label = fields[3];
        bands.push_back(std::move(b));
        ++row;
    }
    return BandTable(std::move(bands));
}

void BandTable::save_csv(const std::string& path) const {
    std::ostringstream out;
    for (const Band& b : bands_) {
        out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.action << ','
            << b.label << '\n';
    }
    write_text_file(path, out.str());
}

BandTable BandTable::default_heart_rate() {
    return BandTable({{0.0, 40.0, 3, "critical-low"},
                      {40.0, 51.0, 1, "review-low"},
                      {51.0, 101.0, 0, "normal"},
                      {101.0, 111.0, 1, "review-high"},
                      {111.0, 130.0, 2, "urgent"},
                      {130.0, 250.0, 3, "critical-high"}});
}

void EnvConfig::validate() const {
    if (action_labels.empty()) {
        throw ConfigError("env: action_labels must not be empty");
    }
    if (!(reward_magnitude > 0.0)) {
        throw ConfigError("env: reward magnitude must be positive");
    }
    if (monitor_length < 1) {
        throw ConfigError("env: monitor_length must be >= 1");
    }
    if (static_cast<int>(action_labels.size()) != bands.distinct_action_count()) {
        throw ConfigError("env: " + std::to_string(action_labels.size()) +
                          " action labels but the band table uses " +
                          std::to_string(bands.distinct_action_count()) + " distinct actions");
    }
    for (const Band& b : bands.bands()) {
        if (b.action >= static_cast<int>(action_labels.size())) {
            throw ConfigError("env: band action id " + std::to_string(b.action) +
                              " out of range for " + std::to_string(action_labels.size()) +
                              " labels");
        }
    }
}

void save_transcript_csv(const std::string& path, const std::vector<TranscriptRow>& rows) {
    std::ostringstream out;
    out << "step,value,action,correct_action,reward,done\n";
    for (const TranscriptRow& r : rows) {
        out << r.step << ',' << format_double(r.value) << ',' << r.action << ','
            << r.correct_action << ',' << format_double(r.reward) << ',' << (r.done ? 1 : 0)
            << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<TranscriptRow> load_transcript_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("step,", 0) != 0) {
        throw ValidationError("bad transcript header in " + path);
    }
    std::vector<TranscriptRow> rows;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string context = path + " row " + std::to_string(index);
        if (fields.size() != 6) {
            throw ValidationError(context + ": expected 6 fields");
        }
        TranscriptRow r;
        r.step = static_cast<std::size_t>(parse_int_field(fields[0], context));
        r.value = parse_double_field(fields[1], context);
        r.action = static_cast<int>(parse_int_field(fields[2], context));
        r.correct_action = static_cast<int>(parse_int_field(fields[3], context));
        r.reward = parse_double_field(fields[4], context);
        r.done = parse_int_field(fields[5], context) != 0;
        rows.push_back(r);
        ++index;
    }
    return rows;
}

MonitorEnv::MonitorEnv(EnvConfig config, TimeSeries series)
    : MonitorEnv(std::move(config), std::move(series), nullptr) {}

MonitorEnv::MonitorEnv(EnvConfig config, TimeSeries series, const ForecastModel* model)
    : config_(std::move(config)), series_(std::move(series)), model_(model) {
    config_.validate();
    if (series_.length() == 0 || series_.node_count() == 0) {
        throw ConfigError("env: data source is empty");
    }
    if (config_.monitored_node >= series_.node_count()) {
        throw ConfigError("env: monitored node " + std::to_string(config_.monitored_node) +
                          " out of range for " + std::to_string(series_.node_count()) + " nodes");
    }
    if (config_.source == StateSource::Forecast) {
        if (model_ == nullptr) {
            throw ConfigError("env: forecast source requires a model");
        }
        if (model_->config().n_nodes != series_.node_count()) {
            throw ConfigError("env: model expects " + std::to_string(model_->config().n_nodes) +
                              " nodes, series has " + std::to_string(series_.node_count()));
        }
        if (model_->config().horizons.size() != config_.context_size) {
            throw ConfigError("env: context_size must equal the model horizon count");
        }
    }
    if (first_index() > last_usable_index()) {
        throw ConfigError("env: series too short to build a single observation (need " +
                          std::to_string(first_index() + 1) + " rows, have " +
                          std::to_string(series_.length()) + ")");
    }
}

std::size_t MonitorEnv::first_index() const {
    if (config_.source == StateSource::Forecast) {
        return model_->config().window - 1;
    }
    return config_.context_size;
}

std::size_t MonitorEnv::last_usable_index() const {
    return series_.length() - 1;
}

double MonitorEnv::current_value() const {
    return series_.values(cursor_, config_.monitored_node);
}

std::vector<double> MonitorEnv::observation_at(std::size_t index) const {
    std::vector<double> obs;
    obs.reserve(state_dim());
    obs.push_back(series_.values(index, config_.monitored_node));
    if (config_.source == StateSource::Replay) {
        for (std::size_t k = 1; k <= config_.context_size; ++k) {
            obs.push_back(series_.values(index - k, config_.monitored_node));
        }
    } else {
        const std::size_t w = model_->config().window;
        const Matrix window = matrix_rows(series_.values, index + 1 - w, index + 1);
        const Matrix pred = model_->predict_original(window);
        for (std::size_t k = 0; k < config_.context_size; ++k) {
            obs.push_back(pred(k, config_.monitored_node));
        }
    }
    return obs;
}

std::vector<double> MonitorEnv::reset() {
    cursor_ = first_index();
    steps_taken_ = 0;
    done_ = false;
    started_ = true;
    transcript_.clear();
    return observation_at(cursor_);
}

StepOutcome MonitorEnv::step(int action) {
    if (!started_ || done_) {
        throw ContractError("step() called on a finished episode; call reset() first");
    }
    if (action < 0 || action >= static_cast<int>(action_count())) {
        throw DomainError("unknown action id " + std::to_string(action) + " (have " +
                          std::to_string(action_count()) + " actions)");
    }
    const double value = current_value();
    const auto looked_up = config_.bands.lookup(value);
    if (looked_up.clamped) ++range_warnings_;

    StepOutcome outcome;
    outcome.correct_action = looked_up.action;
    outcome.reward = action == looked_up.action ? config_.reward_magnitude
                                                : -config_.reward_magnitude;
    ++steps_taken_;
    ++cursor_;
    outcome.data_exhausted = cursor_ > last_usable_index();
    outcome.done = steps_taken_ >= config_.monitor_length || outcome.data_exhausted;
    done_ = outcome.done;
    outcome.next_observation = observation_at(std::min(cursor_, last_usable_index()));

    transcript_.push_back({steps_taken_ - 1, value, action, outcome.correct_action,
                           outcome.reward, outcome.done});
    return outcome;
}

} // namespace graphrl
