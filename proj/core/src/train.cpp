#include "sbqe/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

void check_labels(std::span<const int> labels, Eigen::Index n_classes, Eigen::Index batch) {
    if (static_cast<Eigen::Index>(labels.size()) != batch) {
        throw ShapeError("got " + std::to_string(labels.size()) + " labels for a batch of " + std::to_string(batch));
    }
    for (int y : labels) {
        if (y < 0 || y >= n_classes) {
            throw RangeError("label " + std::to_string(y) + " outside [0, " + std::to_string(n_classes) + ")");
        }
    }
}

Eigen::MatrixXd dense_layer(const Eigen::MatrixXd& x, const Eigen::Map<const RowMatrix>& w,
                            const Eigen::Map<const Eigen::VectorXd>& b) {
    Eigen::MatrixXd z = x * w.transpose();
    z.rowwise() += b.transpose();
    return z;
}

void store(GradientSet& g, const char* name, const Eigen::MatrixXd& value) {
    g.matrix(name) = value;
}

void store(GradientSet& g, const char* name, const Eigen::VectorXd& value) {
    g.vector(name) = value;
}

void store(GradientSet& g, const char* name, const std::vector<double>& value) {
    g.at(name).values = value;
}

// Readout head shared by both hybrids: logits = F R^T + b.
// Returns dLoss/dF and fills the readout gradients.
Eigen::MatrixXd readout_backward(const Model& model, const Eigen::MatrixXd& f, const Eigen::MatrixXd& delta,
                                 GradientSet& g) {
    store(g, names::kReadoutWeight, Eigen::MatrixXd(delta.transpose() * f));
    store(g, names::kReadoutBias, Eigen::VectorXd(delta.colwise().sum().transpose()));
    return delta * model.params.matrix(names::kReadoutWeight);
}

LossAndGradient probabilistic_grad(const Model& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
    const CircuitSpec circuit = model.spec.circuit();
    const ParamSet theta = circuit_params(model);
    const ComplexMatrix identity = ComplexMatrix::identity(circuit.dim());

    const Eigen::MatrixXd p =
        softmax_rows(dense_layer(x, model.params.matrix(names::kInputWeight), model.params.vector(names::kInputBias)));
    const Eigen::MatrixXd t = basis_transition_matrix(evolve_columns(circuit, theta, identity));
    const Eigen::MatrixXd f = p * t.transpose();
    const Eigen::MatrixXd logits =
        dense_layer(f, model.params.matrix(names::kReadoutWeight), model.params.vector(names::kReadoutBias));

    LossAndGradient out{cross_entropy(logits, labels), model.params.zeros_like()};
    GradientSet& g = out.grad;
    const Eigen::MatrixXd df = readout_backward(model, f, cross_entropy_grad(logits, labels), g);

    // f_b = T p_b, so dL/dT = dF^T P and dL/dp_b = T^T dF_b.
    const Eigen::MatrixXd dt = df.transpose() * p;
    const Eigen::MatrixXd dp = df * t;
    const Eigen::VectorXd inner = (dp.array() * p.array()).rowwise().sum();
    const Eigen::MatrixXd dz = (p.array() * (dp.colwise() - inner).array()).matrix();
    store(g, names::kInputWeight, Eigen::MatrixXd(dz.transpose() * x));
    store(g, names::kInputBias, Eigen::VectorXd(dz.colwise().sum().transpose()));

    // dL/dtheta = sum_ij dT_ij d|U_ij|^2/dtheta.
    const auto objective = [&dt](const ComplexMatrix& u) {
        double sum = 0.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const auto row = u.row(i);
            for (std::size_t j = 0; j < u.cols(); ++j) {
                sum += dt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * std::norm(row[j]);
            }
        }
        return sum;
    };
    store(g, names::kAngles, parameter_shift_gradient(circuit, theta, identity, objective));
    return out;
}

LossAndGradient amplitude_grad(const Model& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
    const CircuitSpec circuit = model.spec.circuit();
    const ParamSet theta = circuit_params(model);
    const auto d = static_cast<std::size_t>(model.spec.input_dim);
    ComplexMatrix inputs(circuit.dim(), d);
    for (std::size_t j = 0; j < d; ++j) {
        inputs(j, j) = 1.0;
    }

    const Eigen::MatrixXd xn = amplitude_rows(x);
    const ComplexMatrix v = evolve_columns(circuit, theta, inputs);
    Eigen::MatrixXd v_re(v.rows(), v.cols());
    Eigen::MatrixXd v_im(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            v_re(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(i, j).real();
            v_im(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(i, j).imag();
        }
    }
    const Eigen::MatrixXd f = (xn * v_re.transpose()).cwiseAbs2() + (xn * v_im.transpose()).cwiseAbs2();
    const Eigen::MatrixXd logits =
        dense_layer(f, model.params.matrix(names::kReadoutWeight), model.params.vector(names::kReadoutBias));

    LossAndGradient out{cross_entropy(logits, labels), model.params.zeros_like()};
    GradientSet& g = out.grad;
    const Eigen::MatrixXd df = readout_backward(model, f, cross_entropy_grad(logits, labels), g);

    // L depends on the circuit through sum_b sum_i dF_bi |v_i . x_b|^2
    //   = sum_i v_i^H M_i v_i  with  M_i = sum_b dF_bi x_b x_b^T.
    const auto dd = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd outer(xn.rows(), dd * dd);
    for (Eigen::Index b = 0; b < xn.rows(); ++b) {
        for (Eigen::Index j = 0; j < dd; ++j) {
            for (Eigen::Index k = 0; k < dd; ++k) {
                outer(b, j * dd + k) = xn(b, j) * xn(b, k);
            }
        }
    }
    const Eigen::MatrixXd m = df.transpose() * outer; // row i is M_i flattened
    const auto objective = [&m, dd](const ComplexMatrix& u) {
        double sum = 0.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const auto row = u.row(i);
            const auto mi = static_cast<Eigen::Index>(i);
            for (Eigen::Index j = 0; j < dd; ++j) {
                for (Eigen::Index k = 0; k < dd; ++k) {
                    const Complex a = row[static_cast<std::size_t>(j)];
                    const Complex c = row[static_cast<std::size_t>(k)];
                    sum += m(mi, j * dd + k) * (a.real() * c.real() + a.imag() * c.imag());
                }
            }
        }
        return sum;
    };
    store(g, names::kAngles, parameter_shift_gradient(circuit, theta, inputs, objective));
    return out;
}

LossAndGradient linear_grad(const Model& model, const Eigen::MatrixXd& x, std::span<const int> labels) {
    const Eigen::MatrixXd pre =
        dense_layer(x, model.params.matrix(names::kHiddenWeight), model.params.vector(names::kHiddenBias));
    const Eigen::MatrixXd h = pre.cwiseMax(0.0);
    const Eigen::MatrixXd logits =
        dense_layer(h, model.params.matrix(names::kOutputWeight), model.params.vector(names::kOutputBias));

    LossAndGradient out{cross_entropy(logits, labels), model.params.zeros_like()};
    GradientSet& g = out.grad;
    const Eigen::MatrixXd delta = cross_entropy_grad(logits, labels);
    store(g, names::kOutputWeight, Eigen::MatrixXd(delta.transpose() * h));
    store(g, names::kOutputBias, Eigen::VectorXd(delta.colwise().sum().transpose()));
    const Eigen::MatrixXd dh = delta * model.params.matrix(names::kOutputWeight);
    const Eigen::MatrixXd dpre = (pre.array() > 0.0).select(dh, 0.0);
    store(g, names::kHiddenWeight, Eigen::MatrixXd(dpre.transpose() * x));
    store(g, names::kHiddenBias, Eigen::VectorXd(dpre.colwise().sum().transpose()));
    return out;
}

LabelledSet gather(const LabelledSet& data, std::span<const std::size_t> rows) {
    LabelledSet out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(data.labels[rows[i]]);
    }
    return out;
}

} // namespace

double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels) {
    check_labels(labels, logits.cols(), logits.rows());
    if (logits.rows() == 0) {
        throw ShapeError("cross entropy of an empty batch");
    }
    double total = 0.0;
    for (Eigen::Index b = 0; b < logits.rows(); ++b) {
        const double top = logits.row(b).maxCoeff();
        const double log_z = top + std::log((logits.row(b).array() - top).exp().sum());
        total += log_z - logits(b, labels[static_cast<std::size_t>(b)]);
    }
    return total / static_cast<double>(logits.rows());
}

Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd& logits, std::span<const int> labels) {
    check_labels(labels, logits.cols(), logits.rows());
    Eigen::MatrixXd g = softmax_rows(logits);
    for (Eigen::Index b = 0; b < g.rows(); ++b) {
        g(b, labels[static_cast<std::size_t>(b)]) -= 1.0;
    }
    return g / static_cast<double>(logits.rows());
}

LossAndGradient grad_params(const Model& model, const Eigen::MatrixXd& features, std::span<const int> labels) {
    if (features.rows() == 0) {
        throw ShapeError("gradient of an empty batch");
    }
    if (features.cols() != model.spec.input_dim) {
        throw ShapeError("model expects " + std::to_string(model.spec.input_dim) + " features, got " +
                         std::to_string(features.cols()));
    }
    switch (model.spec.kind) {
    case ModelKind::probabilistic_hybrid:
        return probabilistic_grad(model, features, labels);
    case ModelKind::amplitude_hybrid:
        return amplitude_grad(model, features, labels);
    case ModelKind::width_matched_linear:
        return linear_grad(model, features, labels);
    }
    return {};
}

double global_norm(const GradientSet& g) {
    double sum = 0.0;
    for (const auto& a : g.arrays()) {
        for (double v : a.values) {
            sum += v * v;
        }
    }
    return std::sqrt(sum);
}

GradientSet clip_global_norm(GradientSet g, double max_norm) {
    for (const auto& a : g.arrays()) {
        if (!std::all_of(a.values.begin(), a.values.end(), [](double v) { return std::isfinite(v); })) {
            throw NumericError("non-finite gradient in '" + a.name + "'");
        }
    }
    const double norm = global_norm(g);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& a : g.arrays()) {
            for (double& v : a.values) {
                v *= scale;
            }
        }
    }
    return g;
}

LionState LionState::for_params(const ParamTable& params, double lr) {
    LionState state;
    state.momentum = params.zeros_like();
    state.lr = lr;
    return state;
}

void lion_step(LionState& state, ParamTable& params, const GradientSet& g) {
    if (!params.same_layout(g) || !params.same_layout(state.momentum)) {
        throw ShapeError("Lion: parameters, gradients and momentum differ in layout");
    }
    auto& p_arrays = params.arrays();
    auto& m_arrays = state.momentum.arrays();
    const auto& g_arrays = g.arrays();
    for (std::size_t a = 0; a < p_arrays.size(); ++a) {
        auto& p = p_arrays[a].values;
        auto& m = m_arrays[a].values;
        const auto& grad = g_arrays[a].values;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double c = state.beta1 * m[i] + (1.0 - state.beta1) * grad[i];
            const double sign = static_cast<double>((c > 0.0) - (c < 0.0));
            p[i] -= state.lr * (sign + state.weight_decay * p[i]);
            m[i] = state.beta2 * m[i] + (1.0 - state.beta2) * grad[i];
        }
    }
    ++state.step;
}

EvalResult evaluate_logits(const Eigen::MatrixXd& logits, std::span<const int> labels) {
    EvalResult r;
    r.loss = cross_entropy(logits, labels);
    std::size_t correct = 0;
    for (Eigen::Index b = 0; b < logits.rows(); ++b) {
        Eigen::Index arg = 0;
        logits.row(b).maxCoeff(&arg);
        correct += (arg == labels[static_cast<std::size_t>(b)]) ? 1 : 0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows());
    return r;
}

EvalResult evaluate(const Model& model, const LabelledSet& data) {
    return evaluate_logits(forward_logits(model, data.features), data.labels);
}

RunMetrics train_loop(const TrainConfig& config, Model& model, const DataSplits& splits, std::uint64_t seed,
                      const RecordSink& sink) {
    if (splits.train.size() == 0 || splits.val.size() == 0 || splits.test.size() == 0) {
        throw ShapeError("train, val and test splits must be non-empty");
    }
    if (config.batch_size == 0 || config.log_interval == 0) {
        throw ContractError("batch_size and log_interval must be positive");
    }
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    RunMetrics metrics;
    LionState lion = LionState::for_params(model.params, config.learning_rate);
    lion.weight_decay = config.weight_decay;
    ParamTable best = model.params;
    metrics.init_val = evaluate(model, splits.val);
    metrics.best_val = metrics.init_val;

    const std::size_t n = splits.train.size();
    const std::size_t batch = std::min(config.batch_size, n);
    const std::size_t steps_per_epoch = (n + batch - 1) / batch;
    const std::uint64_t total_steps = config.epochs * steps_per_epoch;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);

    auto emit = [&](MetricRecord record) {
        if (sink) {
            sink(record);
        }
        metrics.history.push_back(std::move(record));
    };

    std::uint64_t step = 0;
    for (std::uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (steps_per_epoch > 1) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            ++step;
            LossAndGradient lg;
            if (steps_per_epoch == 1) {
                lg = grad_params(model, splits.train.features, splits.train.labels);
            } else {
                const std::size_t lo = s * batch;
                const std::size_t hi = std::min(n, lo + batch);
                const LabelledSet mb = gather(splits.train, std::span<const std::size_t>(order).subspan(lo, hi - lo));
                lg = grad_params(model, mb.features, mb.labels);
            }
            lion_step(lion, model.params, clip_global_norm(std::move(lg.grad), config.max_grad_norm));

            const EvalResult val = evaluate(model, splits.val);
            if (val.accuracy > metrics.best_val.accuracy ||
                (val.accuracy == metrics.best_val.accuracy && val.loss < metrics.best_val.loss)) {
                metrics.best_val = val;
                metrics.best_step = step;
                best = model.params;
            }
            if (step % config.log_interval == 0 || step == total_steps) {
                const EvalResult train = evaluate(model, splits.train);
                const double t = elapsed();
                emit({step, "train", train.loss, train.accuracy, t});
                emit({step, "val", val.loss, val.accuracy, t});
            }
        }
    }

    model.params = std::move(best);
    metrics.test = evaluate(model, splits.test);
    return metrics;
}

} // namespace sbqe
