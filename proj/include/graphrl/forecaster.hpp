#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphrl/dataset.hpp"
#include "graphrl/graph.hpp"
#include "graphrl/optim.hpp"
#include "graphrl/rng.hpp"
#include "graphrl/tape.hpp"

namespace graphrl {

/// Forecaster hyperparameters. `gcn_hidden` is the width of both spatial
/// layers; `hidden` is the recurrent state width.
struct TgcnConfig {
    std::size_t n_nodes = 0;
    std::size_t window = 12;
    std::size_t hidden = 8;
    std::size_t gcn_hidden = 8;
    std::vector<int> horizons = {1, 2, 3, 4};
    double lambda = 1e-5; // L2 regularization weight
    double learning_rate = 0.01;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ModelKind { Tgcn, GruOnly, Persistence };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// GRU gate weights over the concatenated [spatial features, hidden state].
struct GruWeights {
    Matrix update_w, update_b;
    Matrix reset_w, reset_b;
    Matrix candidate_w, candidate_b;
};

// Tape building blocks (training path).
Var gcn_forward(Tape& tape, Var x, Var propagation, Var layer1_w, Var layer2_w);
struct GruVars {
    Var update_w, update_b, reset_w, reset_b, candidate_w, candidate_b;
};
Var gru_step(Tape& tape, Var spatial, Var h_prev, const GruVars& w);

// Plain forms of the same computations (inference and unit tests).
Matrix gcn_forward(const Matrix& x, const NormalizedGraph& graph, const Matrix& layer1_w,
                   const Matrix& layer2_w);
Matrix gru_step(const Matrix& spatial, const Matrix& h_prev, const GruWeights& w);

/// Last observed row repeated for every horizon: the naive baseline.
Matrix persistence_predict(const Matrix& window, std::size_t horizon_count);

/// A trained (or untrained) forecaster: spatial encoder + GRU + linear head
/// for Tgcn, a per-node dense layer + GRU + head for GruOnly, or the
/// parameterless persistence baseline. Predictions come back as
/// |horizons| x n matrices.
class ForecastModel {
public:
    static ForecastModel create(ModelKind kind, const TgcnConfig& config,
                                const NormalizedGraph* graph, MinMaxScaler scaler);

    ModelKind kind() const { return kind_; }
    const TgcnConfig& config() const { return config_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const MinMaxScaler& scaler() const { return scaler_; }
    const NormalizedGraph* graph() const { return graph_; }
    void set_graph(const NormalizedGraph* graph);

    /// Builds the forward pass for one scaled window on `tape`; the returned
    /// node is n x |horizons| (transposed relative to predict_scaled).
    Var forward(Tape& tape, const Matrix& window_scaled) const;

    Matrix predict_scaled(const Matrix& window_scaled) const;   // |horizons| x n
    Matrix predict_original(const Matrix& window_original) const;

    void save(const std::string& path) const;
    static ForecastModel load(const std::string& path, const NormalizedGraph* graph);

private:
    ForecastModel() = default;
    ModelKind kind_ = ModelKind::Persistence;
    TgcnConfig config_;
    ParamStore params_;
    MinMaxScaler scaler_;
    const NormalizedGraph* graph_ = nullptr;
};

/// Data term (mean squared error) plus lambda times the L2 penalty over the
/// store's weight matrices, built on the tape so it can be differentiated.
Var train_loss(Tape& tape, Var pred, const Matrix& target, double lambda);

/// Plain evaluation of the same quantity for reporting.
double train_loss_value(const ForecastModel& model, const Matrix& pred_scaled,
                        const Matrix& target_scaled, double lambda);

struct TrainResult {
    /// loss_trace[0] is the untrained full-train loss; entry k >= 1 is the
    /// mean batch loss observed during epoch k.
    std::vector<double> loss_trace;
};

/// Mini-batch Adam on the regularized loss for config.epochs epochs.
/// Throws TrainingError (with the epoch) if the loss turns non-finite.
TrainResult train_forecaster(ForecastModel& model, const WindowedDataset& train_data);

} // namespace graphrl
