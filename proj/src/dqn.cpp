#include "graphrl/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "json.hpp"

#include "graphrl/errors.hpp"
#include "graphrl/forecaster.hpp"
#include "graphrl/io_util.hpp"

namespace graphrl {

namespace {

constexpr const char* kCheckpointFormat = "graphrl-agent-v1";

constexpr const char* kLayer1W = "trunk.layer1.w";
constexpr const char* kLayer1B = "trunk.layer1.b";
constexpr const char* kLayer2W = "trunk.layer2.w";
constexpr const char* kLayer2B = "trunk.layer2.b";
constexpr const char* kGcnLayer1 = "gcn.layer1.w";
constexpr const char* kGcnLayer2 = "gcn.layer2.w";
constexpr const char* kGruUpdateW = "gru.update.w";
constexpr const char* kGruUpdateB = "gru.update.b";
constexpr const char* kGruResetW = "gru.reset.w";
constexpr const char* kGruResetB = "gru.reset.b";
constexpr const char* kGruCandW = "gru.candidate.w";
constexpr const char* kGruCandB = "gru.candidate.b";
constexpr const char* kReadout = "readout.w";
constexpr const char* kHeadW = "head.w";
constexpr const char* kHeadB = "head.b";

Matrix xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-limit, limit);
    return m;
}

} // namespace

void AgentConfig::validate() const {
    if (!(gamma > 0.0) || !(gamma < 1.0)) throw ConfigError("agent: gamma must be in (0,1)");
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("agent: epsilon must be in [0,1]");
    if (!(epsilon_decay > 0.0) || epsilon_decay > 1.0) {
        throw ConfigError("agent: epsilon_decay must be in (0,1]");
    }
    if (epsilon_min < 0.0 || epsilon_min > epsilon) {
        throw ConfigError("agent: epsilon_min must be in [0, epsilon]");
    }
    if (batch_size == 0) throw ConfigError("agent: batch_size must be positive");
    if (memory_capacity == 0) throw ConfigError("agent: memory_capacity must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("agent: learning_rate must be positive");
    if (n_actions < 2) throw ConfigError("agent: need at least 2 actions");
    if (state_dim == 0) throw ConfigError("agent: state_dim must be positive");
    if (hidden1 == 0 || hidden2 == 0) throw ConfigError("agent: hidden sizes must be positive");
    if (!(state_scale > 0.0)) throw ConfigError("agent: state_scale must be positive");
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) {
        throw ConfigError("replay memory capacity must be positive");
    }
}

void ReplayMemory::push(Transition t) {
    buffer_.push_back(std::move(t));
    if (buffer_.size() > capacity_) {
        buffer_.pop_front();
    }
}

QNetwork QNetwork::dense(std::size_t state_dim, std::size_t hidden1, std::size_t hidden2,
                         std::size_t n_actions, std::uint64_t seed) {
    QNetwork net;
    net.trunk_ = Trunk::Dense;
    net.state_dim_ = state_dim;
    net.n_actions_ = n_actions;
    net.hidden1_ = hidden1;
    net.hidden2_ = hidden2;
    Rng rng = Rng::substream(seed, "agent-init");
    net.params_.add(kLayer1W, xavier_uniform(state_dim, hidden1, rng));
    net.params_.add(kLayer1B, Matrix(1, hidden1), ParamKind::Bias);
    net.params_.add(kLayer2W, xavier_uniform(hidden1, hidden2, rng));
    net.params_.add(kLayer2B, Matrix(1, hidden2), ParamKind::Bias);
    net.params_.add(kHeadW, xavier_uniform(hidden2, n_actions, rng));
    net.params_.add(kHeadB, Matrix(1, n_actions), ParamKind::Bias);
    return net;
}

QNetwork QNetwork::graph(const NormalizedGraph* graph, std::size_t gcn_hidden,
                         std::size_t gru_hidden, std::size_t n_actions, std::uint64_t seed) {
    if (graph == nullptr) {
        throw ConfigError("graph trunk requires a graph");
    }
    QNetwork net;
    net.trunk_ = Trunk::Graph;
    net.state_dim_ = graph->node_count();
    net.n_actions_ = n_actions;
    net.hidden1_ = gcn_hidden;
    net.hidden2_ = gru_hidden;
    net.graph_ = graph;
    Rng rng = Rng::substream(seed, "agent-init");
    ParamStore& p = net.params_;
    p.add(kGcnLayer1, xavier_uniform(1, gcn_hidden, rng));
    p.add(kGcnLayer2, xavier_uniform(gcn_hidden, gcn_hidden, rng));
    p.add(kGruUpdateW, xavier_uniform(gcn_hidden + gru_hidden, gru_hidden, rng));
    p.add(kGruUpdateB, Matrix(1, gru_hidden), ParamKind::Bias);
    p.add(kGruResetW, xavier_uniform(gcn_hidden + gru_hidden, gru_hidden, rng));
    p.add(kGruResetB, Matrix(1, gru_hidden), ParamKind::Bias);
    p.add(kGruCandW, xavier_uniform(gcn_hidden + gru_hidden, gru_hidden, rng));
    p.add(kGruCandB, Matrix(1, gru_hidden), ParamKind::Bias);
    Matrix readout(1, graph->node_count());
    for (double& v : readout.data()) v = 1.0 / static_cast<double>(graph->node_count());
    p.add(kReadout, std::move(readout));
    p.add(kHeadW, xavier_uniform(gru_hidden, n_actions, rng));
    p.add(kHeadB, Matrix(1, n_actions), ParamKind::Bias);
    return net;
}

void QNetwork::set_graph(const NormalizedGraph* graph) {
    if (trunk_ != Trunk::Graph) return;
    if (graph == nullptr || graph->node_count() != state_dim_) {
        throw ConfigError("graph trunk needs a graph with " + std::to_string(state_dim_) +
                          " nodes");
    }
    graph_ = graph;
}

Var QNetwork::forward(Tape& tape, const std::vector<double>& state, double state_scale) const {
    if (state.size() != state_dim_) {
        throw DimensionError("state has " + std::to_string(state.size()) + " entries, expected " +
                             std::to_string(state_dim_));
    }
    std::vector<double> scaled(state);
    for (double& v : scaled) v *= state_scale;
    if (trunk_ == Trunk::Dense) {
        Var x = tape.constant(Matrix::row_vector(scaled));
        Var h1 = tape.relu(tape.add(tape.matmul(x, tape.param(kLayer1W)), tape.param(kLayer1B)));
        Var h2 = tape.relu(tape.add(tape.matmul(h1, tape.param(kLayer2W)), tape.param(kLayer2B)));
        return tape.add(tape.matmul(h2, tape.param(kHeadW)), tape.param(kHeadB));
    }
    if (graph_ == nullptr) {
        throw ContractError("graph trunk has no graph attached");
    }
    Var x = tape.constant(Matrix::column_vector(scaled));
    Var spatial = gcn_forward(tape, x, tape.constant(graph_->propagation()),
                              tape.param(kGcnLayer1), tape.param(kGcnLayer2));
    const GruVars gru{tape.param(kGruUpdateW), tape.param(kGruUpdateB),
                      tape.param(kGruResetW),  tape.param(kGruResetB),
                      tape.param(kGruCandW),   tape.param(kGruCandB)};
    Var h = gru_step(tape, spatial, tape.constant(Matrix(state_dim_, hidden2_)), gru);
    Var pooled = tape.matmul(tape.param(kReadout), h); // 1 x hidden
    return tape.add(tape.matmul(pooled, tape.param(kHeadW)), tape.param(kHeadB));
}

std::vector<double> QNetwork::q_values(const std::vector<double>& state,
                                       double state_scale) const {
    Tape tape(const_cast<ParamStore&>(params_));
    Var q = forward(tape, state, state_scale);
    return tape.value(q).data();
}

double td_target(const Transition& t, const QNetwork& network, double gamma,
                 double state_scale) {
    if (t.done) {
        return t.reward;
    }
    const auto q_next = network.q_values(t.next_state, state_scale);
    double best = q_next[0];
    for (const double q : q_next) best = std::max(best, q);
    return t.reward + gamma * best;
}

DqnAgent::DqnAgent(AgentConfig config, QNetwork network)
    : config_(config),
      network_(std::move(network)),
      memory_(config.memory_capacity),
      rng_(Rng::substream(config.seed, "agent")),
      epsilon_(config.epsilon) {
    config_.validate();
    if (network_.action_count() != config_.n_actions) {
        throw ConfigError("agent: network emits " + std::to_string(network_.action_count()) +
                          " actions, config expects " + std::to_string(config_.n_actions));
    }
}

int DqnAgent::act(const std::vector<double>& state) {
    if (rng_.uniform() < epsilon_) {
        return static_cast<int>(rng_.uniform_index(config_.n_actions));
    }
    return greedy_action(state);
}

int DqnAgent::greedy_action(const std::vector<double>& state) const {
    const auto q = q_values(state);
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a) {
        if (q[a] > q[best]) best = a; // ties keep the lowest action id
    }
    return best;
}

void DqnAgent::memorize(Transition t) {
    if (t.action < 0 || t.action >= static_cast<int>(config_.n_actions)) {
        throw DomainError("transition action id out of range");
    }
    memory_.push(std::move(t));
}

std::vector<double> DqnAgent::q_values(const std::vector<double>& state) const {
    return network_.q_values(state, config_.state_scale);
}

double DqnAgent::td_target_for(const Transition& t) const {
    return td_target(t, network_, config_.gamma, config_.state_scale);
}

ReplayResult DqnAgent::replay() {
    ReplayResult result;
    result.epsilon_after = epsilon_;
    if (memory_.size() < config_.batch_size) {
        result.skipped = true;
        return result;
    }
    const auto indices = rng_.sample_without_replacement(memory_.size(), config_.batch_size);

    // Optional frozen-copy mode: bootstrap targets from parameters captured
    // at the start of this replay instead of the live network.
    std::unique_ptr<QNetwork> frozen;
    if (config_.use_frozen_target) {
        frozen = std::make_unique<QNetwork>(network_);
    }
    const QNetwork& bootstrap = frozen ? *frozen : network_;

    double loss_sum = 0.0;
    for (const std::size_t i : indices) {
        const Transition& t = memory_.at(i);
        const double target = td_target(t, bootstrap, config_.gamma, config_.state_scale);
        std::vector<double> target_vector = q_values(t.state);
        loss_sum += (target_vector[t.action] - target) * (target_vector[t.action] - target);
        target_vector[static_cast<std::size_t>(t.action)] = target;

        Tape tape(network_.params());
        Var q = network_.forward(tape, t.state, config_.state_scale);
        Var diff = tape.add(q, tape.scale(tape.constant(Matrix::row_vector(target_vector)), -1.0));
        tape.backward(tape.sum_squares(diff));
        adam_.step(network_.params(), config_.learning_rate);
    }
    result.loss = loss_sum / static_cast<double>(config_.batch_size);
    epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
    result.epsilon_after = epsilon_;
    return result;
}

void DqnAgent::save(const std::string& path) const {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["trunk"] = network_.trunk() == QNetwork::Trunk::Dense ? "dense" : "graph";
    j["epsilon"] = epsilon_;
    j["config"] = {{"gamma", config_.gamma},
                   {"epsilon", config_.epsilon},
                   {"epsilon_decay", config_.epsilon_decay},
                   {"epsilon_min", config_.epsilon_min},
                   {"batch_size", config_.batch_size},
                   {"memory_capacity", config_.memory_capacity},
                   {"learning_rate", config_.learning_rate},
                   {"seed", config_.seed},
                   {"n_actions", config_.n_actions},
                   {"state_dim", config_.state_dim},
                   {"hidden1", config_.hidden1},
                   {"hidden2", config_.hidden2},
                   {"state_scale", config_.state_scale},
                   {"use_frozen_target", config_.use_frozen_target}};
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, entry] : network_.params().entries()) {
        params[name] = {{"rows", entry.value.rows()},
                        {"cols", entry.value.cols()},
                        {"kind", entry.kind == ParamKind::Bias ? "bias" : "weight"},
                        {"data", entry.value.data()}};
    }
    j["params"] = std::move(params);
    write_text_file(path, j.dump(2) + "\n");
}

DqnAgent DqnAgent::load(const std::string& path, const NormalizedGraph* graph) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cannot parse agent checkpoint " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"].get<std::string>() != kCheckpointFormat) {
        throw ValidationError("incompatible agent checkpoint format in " + path);
    }
    const auto& c = j.at("config");
    AgentConfig config;
    config.gamma = c.at("gamma").get<double>();
    config.epsilon = c.at("epsilon").get<double>();
    config.epsilon_decay = c.at("epsilon_decay").get<double>();
    config.epsilon_min = c.at("epsilon_min").get<double>();
    config.batch_size = c.at("batch_size").get<std::size_t>();
    config.memory_capacity = c.at("memory_capacity").get<std::size_t>();
    config.learning_rate = c.at("learning_rate").get<double>();
    config.seed = c.at("seed").get<std::uint64_t>();
    config.n_actions = c.at("n_actions").get<std::size_t>();
    config.state_dim = c.at("state_dim").get<std::size_t>();
    config.hidden1 = c.at("hidden1").get<std::size_t>();
    config.hidden2 = c.at("hidden2").get<std::size_t>();
    config.state_scale = c.at("state_scale").get<double>();
    config.use_frozen_target = c.at("use_frozen_target").get<bool>();

    const std::string trunk = j.at("trunk").get<std::string>();
    QNetwork net = trunk == "graph"
                       ? QNetwork::graph(graph, config.hidden1, config.hidden2,
                                         config.n_actions, config.seed)
                       : QNetwork::dense(config.state_dim, config.hidden1, config.hidden2,
                                         config.n_actions, config.seed);
    for (const auto& [name, param] : j.at("params").items()) {
        Matrix m(param.at("rows").get<std::size_t>(), param.at("cols").get<std::size_t>());
        const auto data = param.at("data").get<std::vector<double>>();
        if (data.size() != m.size()) {
            throw ValidationError("agent checkpoint matrix length mismatch for " + name);
        }
        m.data() = data;
        net.params().value(name) = std::move(m);
    }
    DqnAgent agent(config, std::move(net));
    agent.epsilon_ = j.at("epsilon").get<double>();
    return agent;
}

} // namespace graphrl
