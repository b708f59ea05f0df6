#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "graphrl/graph.hpp"
#include "graphrl/optim.hpp"
#include "graphrl/rng.hpp"
#include "graphrl/tape.hpp"

namespace graphrl {

struct AgentConfig {
    double gamma = 0.95;
    double epsilon = 1.0;
    double epsilon_decay = 0.995;
    double epsilon_min = 0.01;
    std::size_t batch_size = 32;
    std::size_t memory_capacity = 2000;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    std::size_t n_actions = 4;
    std::size_t state_dim = 5;
    std::size_t hidden1 = 24;
    std::size_t hidden2 = 24;
    /// Observations are multiplied by this before entering the network
    /// (handy when states live in raw units like beats per minute).
    double state_scale = 1.0;
    /// Off by default: bootstrap targets come from the online network, as in
    /// the replay loop this agent implements. When on, targets come from a
    /// copy of the parameters frozen at the start of each replay call.
    bool use_frozen_target = false;

    void validate() const;
};

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

/// Bounded FIFO of transitions; the oldest entry is evicted first.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);
    void push(Transition t);
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buffer_[i]; }

private:
    std::size_t capacity_;
    std::deque<Transition> buffer_;
};

/// Q-value head over either a dense two-layer trunk (vector states) or a
/// graph trunk that treats the state as a one-step graph signal (spatial
/// encoder + one recurrent step + learned node readout).
class QNetwork {
public:
    enum class Trunk { Dense, Graph };

    static QNetwork dense(std::size_t state_dim, std::size_t hidden1, std::size_t hidden2,
                          std::size_t n_actions, std::uint64_t seed);
    static QNetwork graph(const NormalizedGraph* graph, std::size_t gcn_hidden,
                          std::size_t gru_hidden, std::size_t n_actions, std::uint64_t seed);

    Var forward(Tape& tape, const std::vector<double>& state, double state_scale) const;
    std::vector<double> q_values(const std::vector<double>& state,
                                 double state_scale = 1.0) const;

    Trunk trunk() const { return trunk_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_count() const { return n_actions_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const NormalizedGraph* graph() const { return graph_; }
    void set_graph(const NormalizedGraph* graph);

private:
    Trunk trunk_ = Trunk::Dense;
    std::size_t state_dim_ = 0;
    std::size_t n_actions_ = 0;
    std::size_t hidden1_ = 0;
    std::size_t hidden2_ = 0;
    ParamStore params_;
    const NormalizedGraph* graph_ = nullptr;

    friend class DqnAgent;
};

/// r for terminal transitions, otherwise r + gamma * max_a Q(s', a).
double td_target(const Transition& t, const QNetwork& network, double gamma,
                 double state_scale = 1.0);

struct ReplayResult {
    bool skipped = false;     // memory smaller than the batch: recorded no-op
    double loss = 0.0;        // mean pre-update squared TD error over the batch
    double epsilon_after = 0.0;
};

/// Epsilon-greedy learning agent with bounded replay memory. replay() samples
/// a minibatch without replacement, regresses each sampled transition's
/// q-vector toward its TD target with one Adam step per transition, then
/// decays epsilon multiplicatively down to its floor.
class DqnAgent {
public:
    DqnAgent(AgentConfig config, QNetwork network);

    int act(const std::vector<double>& state);
    int greedy_action(const std::vector<double>& state) const;
    void memorize(Transition t);
    ReplayResult replay();

    std::vector<double> q_values(const std::vector<double>& state) const;
    double td_target_for(const Transition& t) const;

    double epsilon() const { return epsilon_; }
    const AgentConfig& config() const { return config_; }
    QNetwork& network() { return network_; }
    const QNetwork& network() const { return network_; }
    ReplayMemory& memory() { return memory_; }
    const ReplayMemory& memory() const { return memory_; }

    void save(const std::string& path) const;
    static DqnAgent load(const std::string& path, const NormalizedGraph* graph = nullptr);

private:
    AgentConfig config_;
    QNetwork network_;
    ReplayMemory memory_;
    AdamOptimizer adam_;
    Rng rng_;
    double epsilon_;
};

} // namespace graphrl
