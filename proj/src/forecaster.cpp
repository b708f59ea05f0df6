#include "graphrl/forecaster.hpp"

#include <cmath>

#include "json.hpp"

#include "graphrl/errors.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

namespace {

constexpr const char* kCheckpointFormat = "graphrl-forecast-v1";

// Parameter names; creation order below fixes the RNG draw order.
constexpr const char* kGcnLayer1 = "gcn.layer1.w";
constexpr const char* kGcnLayer2 = "gcn.layer2.w";
constexpr const char* kDense = "dense.w";
constexpr const char* kGruUpdateW = "gru.update.w";
constexpr const char* kGruUpdateB = "gru.update.b";
constexpr const char* kGruResetW = "gru.reset.w";
constexpr const char* kGruResetB = "gru.reset.b";
constexpr const char* kGruCandW = "gru.candidate.w";
constexpr const char* kGruCandB = "gru.candidate.b";
constexpr const char* kHeadW = "head.w";
constexpr const char* kHeadB = "head.b";

Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-limit, limit);
    return m;
}

nlohmann::json matrix_to_json(const Matrix& m, ParamKind kind) {
    return nlohmann::json{{"rows", m.rows()},
                          {"cols", m.cols()},
                          {"kind", kind == ParamKind::Bias ? "bias" : "weight"},
                          {"data", m.data()}};
}

std::pair<Matrix, ParamKind> matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.size()) {
        throw ValidationError("checkpoint matrix data length mismatch");
    }
    m.data() = data;
    const ParamKind kind =
        j.at("kind").get<std::string>() == "bias" ? ParamKind::Bias : ParamKind::Weight;
    return {std::move(m), kind};
}

} // namespace

void TgcnConfig::validate() const {
    if (n_nodes == 0) throw ConfigError("n_nodes must be positive");
    if (window == 0) throw ConfigError("window must be positive");
    if (hidden == 0) throw ConfigError("hidden must be positive");
    if (gcn_hidden == 0) throw ConfigError("gcn_hidden must be positive");
    if (horizons.empty()) throw ConfigError("at least one horizon is required");
    int prev = 0;
    for (const int h : horizons) {
        if (h < 1 || h <= prev) {
            throw ConfigError("horizons must be strictly increasing and >= 1");
        }
        prev = h;
    }
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Tgcn: return "tgcn";
        case ModelKind::GruOnly: return "gru_only";
        case ModelKind::Persistence: return "persistence";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "tgcn") return ModelKind::Tgcn;
    if (name == "gru_only") return ModelKind::GruOnly;
    if (name == "persistence") return ModelKind::Persistence;
    throw ConfigError("unknown forecast model kind: " + name);
}

Var gcn_forward(Tape& tape, Var x, Var propagation, Var layer1_w, Var layer2_w) {
    Var hidden = tape.relu(tape.matmul(tape.matmul(propagation, x), layer1_w));
    return tape.sigmoid(tape.matmul(tape.matmul(propagation, hidden), layer2_w));
}

Var gru_step(Tape& tape, Var spatial, Var h_prev, const GruVars& w) {
    Var joint = tape.concat_cols(spatial, h_prev);
    Var update = tape.sigmoid(tape.add(tape.matmul(joint, w.update_w), w.update_b));
    Var reset = tape.sigmoid(tape.add(tape.matmul(joint, w.reset_w), w.reset_b));
    Var gated = tape.concat_cols(spatial, tape.hadamard(reset, h_prev));
    Var candidate = tape.tanh(tape.add(tape.matmul(gated, w.candidate_w), w.candidate_b));
    // h = z*h + (1-z)*candidate, written as z*h + candidate - z*candidate
    Var kept = tape.hadamard(update, h_prev);
    Var removed = tape.scale(tape.hadamard(update, candidate), -1.0);
    return tape.add(kept, tape.add(candidate, removed));
}

Matrix gcn_forward(const Matrix& x, const NormalizedGraph& graph, const Matrix& layer1_w,
                   const Matrix& layer2_w) {
    if (x.rows() != graph.node_count()) {
        throw DimensionError("gcn input has " + std::to_string(x.rows()) + " rows, graph has " +
                             std::to_string(graph.node_count()) + " nodes");
    }
    Tape tape;
    Var out = gcn_forward(tape, tape.constant(x), tape.constant(graph.propagation()),
                          tape.constant(layer1_w), tape.constant(layer2_w));
    return tape.value(out);
}

Matrix gru_step(const Matrix& spatial, const Matrix& h_prev, const GruWeights& w) {
    Tape tape;
    const GruVars vars{tape.constant(w.update_w),    tape.constant(w.update_b),
                       tape.constant(w.reset_w),     tape.constant(w.reset_b),
                       tape.constant(w.candidate_w), tape.constant(w.candidate_b)};
    Var out = gru_step(tape, tape.constant(spatial), tape.constant(h_prev), vars);
    return tape.value(out);
}

Matrix persistence_predict(const Matrix& window, std::size_t horizon_count) {
    Matrix out(horizon_count, window.cols());
    const std::size_t last = window.rows() - 1;
    for (std::size_t k = 0; k < horizon_count; ++k) {
        for (std::size_t j = 0; j < window.cols(); ++j) out(k, j) = window(last, j);
    }
    return out;
}

ForecastModel ForecastModel::create(ModelKind kind, const TgcnConfig& config,
                                    const NormalizedGraph* graph, MinMaxScaler scaler) {
    config.validate();
    ForecastModel model;
    model.kind_ = kind;
    model.config_ = config;
    model.scaler_ = std::move(scaler);
    model.set_graph(graph);
    if (kind == ModelKind::Persistence) {
        return model;
    }

    Rng rng = Rng::substream(config.seed, "init");
    const std::size_t feat = config.gcn_hidden;
    const std::size_t hidden = config.hidden;
    const std::size_t outputs = config.horizons.size();
    ParamStore& p = model.params_;
    if (kind == ModelKind::Tgcn) {
        p.add(kGcnLayer1, xavier_uniform(1, feat, rng));
        p.add(kGcnLayer2, xavier_uniform(feat, feat, rng));
    } else {
        p.add(kDense, xavier_uniform(1, feat, rng));
    }
    p.add(kGruUpdateW, xavier_uniform(feat + hidden, hidden, rng));
    p.add(kGruUpdateB, Matrix(1, hidden), ParamKind::Bias);
    p.add(kGruResetW, xavier_uniform(feat + hidden, hidden, rng));
    p.add(kGruResetB, Matrix(1, hidden), ParamKind::Bias);
    p.add(kGruCandW, xavier_uniform(feat + hidden, hidden, rng));
    p.add(kGruCandB, Matrix(1, hidden), ParamKind::Bias);
    p.add(kHeadW, xavier_uniform(hidden, outputs, rng));
    p.add(kHeadB, Matrix(1, outputs), ParamKind::Bias);
    return model;
}

void ForecastModel::set_graph(const NormalizedGraph* graph) {
    if (kind_ == ModelKind::Tgcn) {
        if (graph == nullptr) {
            throw ConfigError("tgcn model requires a graph");
        }
        if (graph->node_count() != config_.n_nodes) {
            throw DimensionError("graph has " + std::to_string(graph->node_count()) +
                                 " nodes, config expects " + std::to_string(config_.n_nodes));
        }
    }
    graph_ = graph;
}

Var ForecastModel::forward(Tape& tape, const Matrix& window_scaled) const {
    if (kind_ == ModelKind::Persistence) {
        throw ContractError("persistence model has no differentiable forward pass");
    }
    if (window_scaled.rows() != config_.window || window_scaled.cols() != config_.n_nodes) {
        throw DimensionError("window shape " + window_scaled.shape_str() + ", expected " +
                             std::to_string(config_.window) + "x" +
                             std::to_string(config_.n_nodes));
    }
    if (tape.params() != &params_) {
        throw ContractError("tape must be bound to this model's parameter store");
    }

    const GruVars gru{tape.param(kGruUpdateW), tape.param(kGruUpdateB),
                      tape.param(kGruResetW),  tape.param(kGruResetB),
                      tape.param(kGruCandW),   tape.param(kGruCandB)};
    Var propagation{};
    Var layer1{}, layer2{}, dense{};
    if (kind_ == ModelKind::Tgcn) {
        propagation = tape.constant(graph_->propagation());
        layer1 = tape.param(kGcnLayer1);
        layer2 = tape.param(kGcnLayer2);
    } else {
        dense = tape.param(kDense);
    }

    Var h = tape.constant(Matrix(config_.n_nodes, config_.hidden));
    for (std::size_t t = 0; t < config_.window; ++t) {
        Matrix x_t(config_.n_nodes, 1);
        for (std::size_t j = 0; j < config_.n_nodes; ++j) x_t(j, 0) = window_scaled(t, j);
        Var x = tape.constant(std::move(x_t));
        Var spatial = kind_ == ModelKind::Tgcn
                          ? gcn_forward(tape, x, propagation, layer1, layer2)
                          : tape.sigmoid(tape.matmul(x, dense));
        h = gru_step(tape, spatial, h, gru);
    }
    return tape.add(tape.matmul(h, tape.param(kHeadW)), tape.param(kHeadB));
}

Matrix ForecastModel::predict_scaled(const Matrix& window_scaled) const {
    if (kind_ == ModelKind::Persistence) {
        return persistence_predict(window_scaled, config_.horizons.size());
    }
    // The tape mutates nothing in the store; const_cast keeps the public
    // prediction API const.
    Tape tape(const_cast<ParamStore&>(params_));
    Var pred = forward(tape, window_scaled);
    return tape.value(pred).transposed();
}

Matrix ForecastModel::predict_original(const Matrix& window_original) const {
    const Matrix pred_scaled = predict_scaled(scaler_.apply(window_original));
    return scaler_.invert(pred_scaled);
}

void ForecastModel::save(const std::string& path) const {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["kind"] = model_kind_name(kind_);
    j["config"] = {{"n_nodes", config_.n_nodes},
                   {"window", config_.window},
                   {"hidden", config_.hidden},
                   {"gcn_hidden", config_.gcn_hidden},
                   {"horizons", config_.horizons},
                   {"lambda", config_.lambda},
                   {"learning_rate", config_.learning_rate},
                   {"epochs", config_.epochs},
                   {"batch_size", config_.batch_size},
                   {"seed", config_.seed}};
    j["scaler"] = {{"mins", scaler_.mins()}, {"maxs", scaler_.maxs()}};
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, entry] : params_.entries()) {
        params[name] = matrix_to_json(entry.value, entry.kind);
    }
    j["params"] = std::move(params);
    write_text_file(path, j.dump(2) + "\n");
}

ForecastModel ForecastModel::load(const std::string& path, const NormalizedGraph* graph) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cannot parse checkpoint " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"].get<std::string>() != kCheckpointFormat) {
        throw ValidationError("incompatible checkpoint format in " + path + " (expected " +
                              std::string(kCheckpointFormat) + ")");
    }
    ForecastModel model;
    model.kind_ = model_kind_from_name(j.at("kind").get<std::string>());
    const auto& c = j.at("config");
    model.config_.n_nodes = c.at("n_nodes").get<std::size_t>();
    model.config_.window = c.at("window").get<std::size_t>();
    model.config_.hidden = c.at("hidden").get<std::size_t>();
    model.config_.gcn_hidden = c.at("gcn_hidden").get<std::size_t>();
    model.config_.horizons = c.at("horizons").get<std::vector<int>>();
    model.config_.lambda = c.at("lambda").get<double>();
    model.config_.learning_rate = c.at("learning_rate").get<double>();
    model.config_.epochs = c.at("epochs").get<std::size_t>();
    model.config_.batch_size = c.at("batch_size").get<std::size_t>();
    model.config_.seed = c.at("seed").get<std::uint64_t>();
    model.config_.validate();
    model.scaler_ = MinMaxScaler::from_bounds(j.at("scaler").at("mins").get<std::vector<double>>(),
                                              j.at("scaler").at("maxs").get<std::vector<double>>());
    for (const auto& [name, param] : j.at("params").items()) {
        auto [value, kind] = matrix_from_json(param);
        model.params_.add(name, std::move(value), kind);
    }
    model.set_graph(graph);
    return model;
}

namespace {

// lambda * sum of squared weight entries, built on the tape; invalid Var when
// there is nothing to penalize.
Var weight_penalty(Tape& tape, double lambda) {
    ParamStore* store = tape.params();
    if (lambda <= 0.0 || store == nullptr) return Var{};
    Var penalty{};
    bool first = true;
    for (const auto& [name, entry] : store->entries()) {
        if (entry.kind != ParamKind::Weight) continue;
        Var term = tape.sum_squares(tape.param(name));
        penalty = first ? term : tape.add(penalty, term);
        first = false;
    }
    if (first) return Var{};
    return tape.scale(penalty, lambda);
}

} // namespace

Var train_loss(Tape& tape, Var pred, const Matrix& target, double lambda) {
    Var loss = tape.mean_squared_error(pred, tape.constant(target));
    const Var penalty = weight_penalty(tape, lambda);
    if (penalty.tape != nullptr) {
        loss = tape.add(loss, penalty);
    }
    return loss;
}

double train_loss_value(const ForecastModel& model, const Matrix& pred_scaled,
                        const Matrix& target_scaled, double lambda) {
    return mean_squared_error(pred_scaled, target_scaled) + lambda * l2_penalty(model.params());
}

TrainResult train_forecaster(ForecastModel& model, const WindowedDataset& train_data) {
    if (model.kind() == ModelKind::Persistence) {
        throw ContractError("persistence baseline has nothing to train");
    }
    if (train_data.size() == 0) {
        throw ValidationError("training dataset is empty");
    }
    const TgcnConfig& config = model.config();
    const double lambda = config.lambda;

    TrainResult result;
    // Untrained full-train loss: the bookkeeping anchor for the trace.
    {
        double total = 0.0;
        for (std::size_t i = 0; i < train_data.size(); ++i) {
            const Matrix pred = model.predict_scaled(train_data.windows[i]);
            total += mean_squared_error(pred, train_data.targets[i]);
        }
        result.loss_trace.push_back(total / static_cast<double>(train_data.size()) +
                                    lambda * l2_penalty(model.params()));
    }

    Rng order_rng = Rng::substream(config.seed, "train");
    AdamOptimizer adam;
    std::vector<std::size_t> indices(train_data.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        order_rng.shuffle(indices);
        double epoch_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t begin = 0; begin < indices.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, indices.size());
            Tape tape(model.params());
            Var batch_mse{};
            bool first = true;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = indices[k];
                Var pred = model.forward(tape, train_data.windows[i]);
                Var window_mse =
                    tape.mean_squared_error(pred, tape.constant(train_data.targets[i].transposed()));
                batch_mse = first ? window_mse : tape.add(batch_mse, window_mse);
                first = false;
            }
            Var loss = tape.scale(batch_mse, 1.0 / static_cast<double>(end - begin));
            const Var penalty = weight_penalty(tape, lambda);
            if (penalty.tape != nullptr) {
                loss = tape.add(loss, penalty);
            }
            const double loss_value = tape.scalar_value(loss);
            if (!std::isfinite(loss_value)) {
                throw TrainingError("training loss is non-finite", epoch);
            }
            epoch_sum += loss_value * static_cast<double>(end - begin);
            seen += end - begin;
            tape.backward(loss);
            adam.step(model.params(), config.learning_rate);
        }
        result.loss_trace.push_back(epoch_sum / static_cast<double>(seen));
    }
    return result;
}

} // namespace graphrl
