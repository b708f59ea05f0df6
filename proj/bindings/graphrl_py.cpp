#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "graphrl/bayes_tune.hpp"
#include "graphrl/io_util.hpp"
#include "graphrl/orchestrator.hpp"
#include "graphrl/synthetic.hpp"

namespace py = pybind11;
using namespace graphrl;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& in) {
    if (in.ndim() != 2) {
        throw DimensionError("expected a 2-d array, got " + std::to_string(in.ndim()) + "-d");
    }
    Matrix out(static_cast<std::size_t>(in.shape(0)), static_cast<std::size_t>(in.shape(1)));
    const double* src = in.data();
    std::copy(src, src + out.size(), out.data().begin());
    return out;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

TimeSeries series_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
                             std::int64_t step_seconds) {
    TimeSeries series;
    series.values = matrix_from_numpy(values);
    series.step_seconds = step_seconds;
    series.timestamps.resize(series.length());
    for (std::size_t t = 0; t < series.length(); ++t) {
        series.timestamps[t] = static_cast<std::int64_t>(t) * step_seconds;
    }
    series.node_names.resize(series.node_count());
    for (std::size_t j = 0; j < series.node_count(); ++j) {
        series.node_names[j] = "node_" + std::to_string(j);
    }
    return series;
}

SearchSpace space_from_python(const std::vector<py::tuple>& dims) {
    SearchSpace space;
    for (const auto& t : dims) {
        if (t.size() != 4) {
            throw ConfigError("search dimensions are (name, lower, upper, scale) tuples");
        }
        SearchDim d;
        d.name = t[0].cast<std::string>();
        d.lower = t[1].cast<double>();
        d.upper = t[2].cast<double>();
        const auto scale = t[3].cast<std::string>();
        if (scale == "linear") {
            d.scale = SearchDim::Scale::Linear;
        } else if (scale == "log10") {
            d.scale = SearchDim::Scale::Log10;
        } else {
            throw ConfigError("scale must be 'linear' or 'log10'");
        }
        space.dims.push_back(std::move(d));
    }
    space.validate();
    return space;
}

} // namespace

PYBIND11_MODULE(_graphrl, m) {
    m.doc() = "Graph-temporal forecasting with a monitoring RL agent and a GP tuner";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "GraphrlError");

    // --- graphs and data -----------------------------------------------------
    py::class_<NormalizedGraph>(m, "NormalizedGraph")
        .def_static("from_adjacency",
                    [](const py::array_t<double>& a) {
                        return NormalizedGraph::from_adjacency(matrix_from_numpy(a));
                    })
        .def_property_readonly("node_count", &NormalizedGraph::node_count)
        .def_property_readonly("adjacency",
                               [](const NormalizedGraph& g) { return numpy_from_matrix(g.adjacency()); })
        .def_property_readonly("propagation", [](const NormalizedGraph& g) {
            return numpy_from_matrix(g.propagation());
        });

    m.def("ring_with_chords", [](std::size_t n, std::size_t chords, std::uint64_t seed) {
        return numpy_from_matrix(ring_with_chords(n, chords, seed));
    });
    m.def("path_adjacency", [](std::size_t n) { return numpy_from_matrix(path_adjacency(n)); });

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("mae", &Metrics::mae)
        .def_readonly("mape", &Metrics::mape)
        .def_readonly("rmse", &Metrics::rmse)
        .def("__repr__", [](const Metrics& x) {
            return "Metrics(mae=" + format_double(x.mae) + ", mape=" + format_double(x.mape) +
                   ", rmse=" + format_double(x.rmse) + ")";
        });
    m.def("compute_metrics", [](const py::array_t<double>& pred, const py::array_t<double>& actual) {
        return compute_metrics(matrix_from_numpy(pred), matrix_from_numpy(actual));
    });

    py::class_<MinMaxScaler>(m, "MinMaxScaler")
        .def_static("fit",
                    [](const py::array_t<double>& rows) {
                        return MinMaxScaler::fit(matrix_from_numpy(rows));
                    })
        .def("apply", [](const MinMaxScaler& s,
                         const py::array_t<double>& x) { return numpy_from_matrix(s.apply(matrix_from_numpy(x))); })
        .def("invert", [](const MinMaxScaler& s,
                          const py::array_t<double>& x) { return numpy_from_matrix(s.invert(matrix_from_numpy(x))); })
        .def_property_readonly("mins", &MinMaxScaler::mins)
        .def_property_readonly("maxs", &MinMaxScaler::maxs)
        .def_property_readonly("degenerate_nodes", &MinMaxScaler::degenerate_nodes);

    py::class_<WindowedDataset>(m, "WindowedDataset")
        .def_property_readonly("size", &WindowedDataset::size)
        .def_readonly("horizons", &WindowedDataset::horizons)
        .def("window", [](const WindowedDataset& d, std::size_t i) { return numpy_from_matrix(d.windows.at(i)); })
        .def("target", [](const WindowedDataset& d, std::size_t i) { return numpy_from_matrix(d.targets.at(i)); });

    m.def(
        "build_windows",
        [](const py::array_t<double>& series, std::size_t window, const std::vector<int>& horizons,
           std::int64_t step_seconds) {
            return build_windows(matrix_from_numpy(series), window, horizons, step_seconds);
        },
        py::arg("series"), py::arg("window"), py::arg("horizons"), py::arg("step_seconds") = 0);

    // --- forecaster ------------------------------------------------------------
    py::class_<TgcnConfig>(m, "TgcnConfig")
        .def(py::init<>())
        .def_readwrite("n_nodes", &TgcnConfig::n_nodes)
        .def_readwrite("window", &TgcnConfig::window)
        .def_readwrite("hidden", &TgcnConfig::hidden)
        .def_readwrite("gcn_hidden", &TgcnConfig::gcn_hidden)
        .def_readwrite("horizons", &TgcnConfig::horizons)
        .def_readwrite("lambda_", &TgcnConfig::lambda)
        .def_readwrite("learning_rate", &TgcnConfig::learning_rate)
        .def_readwrite("epochs", &TgcnConfig::epochs)
        .def_readwrite("batch_size", &TgcnConfig::batch_size)
        .def_readwrite("seed", &TgcnConfig::seed);

    py::class_<ForecastModel>(m, "ForecastModel")
        .def_static(
            "create",
            [](const std::string& kind, const TgcnConfig& config, const NormalizedGraph* graph,
               const MinMaxScaler& scaler) {
                return ForecastModel::create(model_kind_from_name(kind), config, graph, scaler);
            },
            py::arg("kind"), py::arg("config"), py::arg("graph") = nullptr, py::arg("scaler"),
            py::keep_alive<0, 3>())
        .def_property_readonly("kind",
                               [](const ForecastModel& model) { return model_kind_name(model.kind()); })
        .def("predict_scaled", [](const ForecastModel& model, const py::array_t<double>& window) {
            return numpy_from_matrix(model.predict_scaled(matrix_from_numpy(window)));
        })
        .def("predict", [](const ForecastModel& model, const py::array_t<double>& window) {
            return numpy_from_matrix(model.predict_original(matrix_from_numpy(window)));
        })
        .def("save", &ForecastModel::save)
        .def_static("load", &ForecastModel::load, py::arg("path"), py::arg("graph") = nullptr,
                    py::keep_alive<0, 2>());

    m.def("train_forecaster", [](ForecastModel& model, const WindowedDataset& data) {
        return train_forecaster(model, data).loss_trace;
    });
    m.def("persistence_predict", [](const py::array_t<double>& window, std::size_t horizons) {
        return numpy_from_matrix(persistence_predict(matrix_from_numpy(window), horizons));
    });

    // --- synthetic data ----------------------------------------------------------
    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_property(
            "kind", [](const SyntheticSpec& s) { return generator_kind_name(s.kind); },
            [](SyntheticSpec& s, const std::string& name) { s.kind = generator_kind_from_name(name); })
        .def_readwrite("nodes", &SyntheticSpec::nodes)
        .def_readwrite("length", &SyntheticSpec::length)
        .def_readwrite("noise", &SyntheticSpec::noise)
        .def_readwrite("diffusion", &SyntheticSpec::diffusion)
        .def_readwrite("extra_edges", &SyntheticSpec::extra_edges)
        .def_readwrite("init_lo", &SyntheticSpec::init_lo)
        .def_readwrite("init_hi", &SyntheticSpec::init_hi)
        .def_readwrite("walk_step", &SyntheticSpec::walk_step)
        .def_readwrite("walk_lo", &SyntheticSpec::walk_lo)
        .def_readwrite("walk_hi", &SyntheticSpec::walk_hi)
        .def_readwrite("step_seconds", &SyntheticSpec::step_seconds)
        .def_readwrite("seed", &SyntheticSpec::seed);

    m.def("synthesize", [](const SyntheticSpec& spec) {
        const auto out = synthesize(spec);
        return py::make_tuple(numpy_from_matrix(out.series.values),
                              numpy_from_matrix(out.adjacency));
    });

    // --- monitoring environment -------------------------------------------------
    py::class_<Band>(m, "Band")
        .def(py::init([](double lo, double hi, int action, const std::string& label) {
                 return Band{lo, hi, action, label};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("action"), py::arg("label") = "")
        .def_readonly("lo", &Band::lo)
        .def_readonly("hi", &Band::hi)
        .def_readonly("action", &Band::action)
        .def_readonly("label", &Band::label);

    py::class_<BandTable>(m, "BandTable")
        .def(py::init<std::vector<Band>>())
        .def_static("default_heart_rate", &BandTable::default_heart_rate)
        .def_static("load_csv", &BandTable::load_csv)
        .def("save_csv", &BandTable::save_csv)
        .def("correct_action", &BandTable::correct_action)
        .def_property_readonly("distinct_action_count", &BandTable::distinct_action_count);

    py::class_<MonitorEnv>(m, "MonitorEnv")
        .def(py::init([](const py::array_t<double>& series, std::int64_t step_seconds,
                         const BandTable& bands, const std::vector<std::string>& labels,
                         double reward, std::size_t monitor_length, std::size_t monitored_node,
                         std::size_t context, const ForecastModel* model) {
                 EnvConfig config;
                 config.bands = bands;
                 config.action_labels = labels;
                 config.reward_magnitude = reward;
                 config.monitor_length = monitor_length;
                 config.monitored_node = monitored_node;
                 config.context_size = context;
                 if (model != nullptr) {
                     config.source = StateSource::Forecast;
                     return MonitorEnv(config, series_from_numpy(series, step_seconds), model);
                 }
                 return MonitorEnv(config, series_from_numpy(series, step_seconds));
             }),
             py::arg("series"), py::arg("step_seconds") = 900,
             py::arg("bands") = BandTable::default_heart_rate(),
             py::arg("action_labels") =
                 std::vector<std::string>{"no-action", "review", "urgent-team", "critical-team"},
             py::arg("reward") = 10.0, py::arg("monitor_length") = 500,
             py::arg("monitored_node") = 0, py::arg("context") = 4,
             py::arg("model") = nullptr, py::keep_alive<1, 10>())
        .def("reset", &MonitorEnv::reset)
        .def("step",
             [](MonitorEnv& env, int action) {
                 const auto out = env.step(action);
                 py::dict info;
                 info["correct_action"] = out.correct_action;
                 info["data_exhausted"] = out.data_exhausted;
                 return py::make_tuple(out.next_observation, out.reward, out.done, info);
             })
        .def_property_readonly("done", &MonitorEnv::done)
        .def_property_readonly("state_dim", &MonitorEnv::state_dim)
        .def_property_readonly("action_count", &MonitorEnv::action_count)
        .def_property_readonly("steps_taken", &MonitorEnv::steps_taken);

    // --- agent -------------------------------------------------------------------
    py::class_<AgentConfig>(m, "AgentConfig")
        .def(py::init<>())
        .def_readwrite("gamma", &AgentConfig::gamma)
        .def_readwrite("epsilon", &AgentConfig::epsilon)
        .def_readwrite("epsilon_decay", &AgentConfig::epsilon_decay)
        .def_readwrite("epsilon_min", &AgentConfig::epsilon_min)
        .def_readwrite("batch_size", &AgentConfig::batch_size)
        .def_readwrite("memory_capacity", &AgentConfig::memory_capacity)
        .def_readwrite("learning_rate", &AgentConfig::learning_rate)
        .def_readwrite("seed", &AgentConfig::seed)
        .def_readwrite("n_actions", &AgentConfig::n_actions)
        .def_readwrite("state_dim", &AgentConfig::state_dim)
        .def_readwrite("hidden1", &AgentConfig::hidden1)
        .def_readwrite("hidden2", &AgentConfig::hidden2)
        .def_readwrite("state_scale", &AgentConfig::state_scale)
        .def_readwrite("use_frozen_target", &AgentConfig::use_frozen_target);

    py::class_<DqnAgent>(m, "DqnAgent")
        .def(py::init([](const AgentConfig& config, const std::string& trunk,
                         const NormalizedGraph* graph) {
                 QNetwork net = trunk == "graph"
                                    ? QNetwork::graph(graph, config.hidden1, config.hidden2,
                                                      config.n_actions, config.seed)
                                    : QNetwork::dense(config.state_dim, config.hidden1,
                                                      config.hidden2, config.n_actions,
                                                      config.seed);
                 return DqnAgent(config, std::move(net));
             }),
             py::arg("config"), py::arg("trunk") = "dense", py::arg("graph") = nullptr,
             py::keep_alive<1, 3>())
        .def("act", &DqnAgent::act)
        .def("greedy_action", &DqnAgent::greedy_action)
        .def("q_values", &DqnAgent::q_values)
        .def("memorize",
             [](DqnAgent& agent, const std::vector<double>& s, int a, double r,
                const std::vector<double>& s2, bool done) {
                 agent.memorize(Transition{s, a, r, s2, done});
             })
        .def("replay",
             [](DqnAgent& agent) {
                 const auto out = agent.replay();
                 return py::make_tuple(out.skipped, out.loss, out.epsilon_after);
             })
        .def_property_readonly("epsilon", &DqnAgent::epsilon)
        .def_property_readonly("memory_size", [](const DqnAgent& a) { return a.memory().size(); })
        .def("save", &DqnAgent::save)
        .def_static("load", &DqnAgent::load, py::arg("path"), py::arg("graph") = nullptr,
                    py::keep_alive<0, 2>());

    // --- training loop and evaluation ---------------------------------------------
    py::class_<EpisodeRecord>(m, "EpisodeRecord")
        .def_readonly("index", &EpisodeRecord::index)
        .def_readonly("score", &EpisodeRecord::score)
        .def_readonly("steps", &EpisodeRecord::steps)
        .def_readonly("final_epsilon", &EpisodeRecord::final_epsilon)
        .def_readonly("truncated", &EpisodeRecord::truncated);

    m.def(
        "run_training",
        [](MonitorEnv& env, DqnAgent& agent, std::size_t episodes, std::size_t step_budget) {
            RunConfig run;
            run.episodes = episodes;
            run.step_budget = step_budget;
            return run_training(env, agent, run);
        },
        py::arg("env"), py::arg("agent"), py::arg("episodes"), py::arg("step_budget") = 0);

    m.def(
        "evaluate_agent",
        [](MonitorEnv& env, const DqnAgent& agent, std::size_t episodes, std::uint64_t seed,
           std::optional<double> epsilon) {
            Rng rng = Rng::substream(seed, "eval");
            const auto report = evaluate_agent(env, agent, episodes, rng, epsilon);
            return py::make_tuple(report.episode_scores, report.total);
        },
        py::arg("env"), py::arg("agent"), py::arg("episodes") = 10, py::arg("seed") = 0,
        py::arg("epsilon") = std::nullopt);

    // --- gaussian-process tuner ------------------------------------------------
    py::class_<GpConfig>(m, "GpConfig")
        .def(py::init<>())
        .def_readwrite("lengthscale", &GpConfig::lengthscale)
        .def_readwrite("signal_variance", &GpConfig::signal_variance)
        .def_readwrite("noise_variance", &GpConfig::noise_variance);

    py::class_<GpModel>(m, "GpModel")
        .def_static("fit", &GpModel::fit, py::arg("points"), py::arg("values"),
                    py::arg("config") = GpConfig{})
        .def("predict",
             [](const GpModel& model, const std::vector<double>& x) {
                 const auto post = model.predict(x);
                 return py::make_tuple(post.mean, post.variance);
             })
        .def_property_readonly("best_value", &GpModel::best_value)
        .def_property_readonly("jitter_used", &GpModel::jitter_used);

    m.def("expected_improvement", [](double mean, double variance, double best_value) {
        return expected_improvement(Posterior{mean, variance}, best_value);
    });

    m.def(
        "tune",
        [](const std::function<double(const std::vector<double>&)>& objective,
           const std::vector<py::tuple>& space_dims, std::size_t budget, std::uint64_t seed) {
            const SearchSpace space = space_from_python(space_dims);
            const auto result = tune(objective, space, budget, seed);
            py::dict best;
            for (std::size_t d = 0; d < space.dims.size(); ++d) {
                best[py::str(space.dims[d].name)] = result.best_point[d];
            }
            py::list log;
            for (const auto& entry : result.log) {
                py::dict row;
                row["iteration"] = entry.iteration;
                row["point"] = entry.point;
                row["objective"] = entry.objective;
                row["is_best"] = entry.is_best;
                row["failed"] = entry.failed;
                log.append(std::move(row));
            }
            return py::make_tuple(best, result.best_objective, log);
        },
        py::arg("objective"), py::arg("space"), py::arg("budget"), py::arg("seed") = 0);
}
