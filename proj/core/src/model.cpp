#include "sbqe/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

void require_features(const ModelSpec& spec, const Eigen::MatrixXd& features) {
    if (features.cols() != spec.input_dim) {
        throw ShapeError("model expects " + std::to_string(spec.input_dim) + " features, got " +
                         std::to_string(features.cols()));
    }
}

ComplexMatrix leading_identity_columns(std::size_t dim, std::size_t k) {
    ComplexMatrix cols(dim, k);
    for (std::size_t j = 0; j < k; ++j) {
        cols(j, j) = 1.0;
    }
    return cols;
}

// |U x_b|^2 for normalised rows x_b that live on the first d basis states.
Eigen::MatrixXd amplitude_probabilities(const Model& model, const Eigen::MatrixXd& unit_rows) {
    const CircuitSpec circuit = model.spec.circuit();
    const auto d = static_cast<std::size_t>(model.spec.input_dim);
    const ComplexMatrix v = evolve_columns(circuit, circuit_params(model), leading_identity_columns(circuit.dim(), d));
    Eigen::MatrixXd re(v.rows(), v.cols());
    Eigen::MatrixXd im(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            re(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(i, j).real();
            im(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v(i, j).imag();
        }
    }
    const Eigen::MatrixXd a_re = unit_rows * re.transpose();
    const Eigen::MatrixXd a_im = unit_rows * im.transpose();
    return a_re.cwiseAbs2() + a_im.cwiseAbs2();
}

Eigen::MatrixXd input_probabilities(const Model& model, const Eigen::MatrixXd& features) {
    const auto w_in = model.params.matrix(names::kInputWeight);
    const auto b_in = model.params.vector(names::kInputBias);
    Eigen::MatrixXd z = features * w_in.transpose();
    z.rowwise() += b_in.transpose();
    return softmax_rows(z);
}

Eigen::MatrixXd readout(const Model& model, const Eigen::MatrixXd& f) {
    const auto r = model.params.matrix(names::kReadoutWeight);
    const auto b = model.params.vector(names::kReadoutBias);
    Eigen::MatrixXd logits = f * r.transpose();
    logits.rowwise() += b.transpose();
    return logits;
}

Eigen::MatrixXd transition_matrix(const Model& model) {
    const CircuitSpec circuit = model.spec.circuit();
    return basis_transition_matrix(
        evolve_columns(circuit, circuit_params(model), ComplexMatrix::identity(circuit.dim())));
}

Eigen::MatrixXd linear_forward(const Model& model, const Eigen::MatrixXd& features) {
    const auto w1 = model.params.matrix(names::kHiddenWeight);
    const auto b1 = model.params.vector(names::kHiddenBias);
    const auto w2 = model.params.matrix(names::kOutputWeight);
    const auto b2 = model.params.vector(names::kOutputBias);
    Eigen::MatrixXd h = features * w1.transpose();
    h.rowwise() += b1.transpose();
    h = h.cwiseMax(0.0);
    Eigen::MatrixXd logits = h * w2.transpose();
    logits.rowwise() += b2.transpose();
    return logits;
}

Eigen::VectorXd single(const Model& model, const Eigen::VectorXd& x, ModelKind expected) {
    if (model.spec.kind != expected) {
        throw ContractError("model is a " + std::string(to_string(model.spec.kind)) + ", not a " +
                            std::string(to_string(expected)));
    }
    return forward_logits(model, x.transpose()).row(0).transpose();
}

} // namespace

SbqeLayer::SbqeLayer(ParamSet params, StatePool pool, ObservableSet observables)
    : params_(std::move(params)), pool_(std::move(pool)), observables_(std::move(observables)) {
    const std::size_t dim = params_.spec().dim();
    if (pool_.dim() != dim) {
        throw ShapeError("pool states have dim " + std::to_string(pool_.dim()) + ", circuit dim is " +
                         std::to_string(dim));
    }
    if (observables_.dim() != dim) {
        throw ShapeError("observables have dim " + std::to_string(observables_.dim()) + ", circuit dim is " +
                         std::to_string(dim));
    }
    unitary_ = build_circuit_unitary(params_.spec(), params_);
}

SbqeLayer SbqeLayer::computational(ParamSet params) {
    const int q = params.spec().n_qubits;
    return SbqeLayer(std::move(params), StatePool::computational_basis(q), ObservableSet::computational_projectors(q));
}

std::vector<double> sbqe_forward(const SbqeLayer& layer, const ProbVector& p) {
    if (p.size() != layer.pool().size()) {
        throw ShapeError("probability vector has " + std::to_string(p.size()) + " entries, pool has " +
                         std::to_string(layer.pool().size()));
    }
    const DensityMatrix rho = evolve_density(sbqe_mixture(p, layer.pool()), layer.unitary());
    std::vector<double> f;
    f.reserve(layer.observables().size());
    for (const auto& o : layer.observables().items()) {
        f.push_back(trace_product(o, rho));
    }
    return f;
}

EffectiveWeights extract_weights(const SbqeLayer& layer) {
    const std::size_t m = layer.observables().size();
    const std::size_t n = layer.pool().size();
    const std::size_t dim = layer.pool().dim();
    Eigen::MatrixXd w(m, n);
    for (std::size_t j = 0; j < n; ++j) {
        const StateVector& psi = layer.pool()[j];
        std::vector<Complex> phi(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            Complex sum{};
            for (std::size_t k = 0; k < dim; ++k) {
                sum += layer.unitary()(r, k) * psi[k];
            }
            phi[r] = sum;
        }
        for (std::size_t i = 0; i < m; ++i) {
            const ComplexMatrix& o = layer.observables()[i];
            Complex value{};
            for (std::size_t r = 0; r < dim; ++r) {
                if (phi[r] == Complex{}) {
                    continue;
                }
                Complex o_phi{};
                for (std::size_t c = 0; c < dim; ++c) {
                    o_phi += o(r, c) * phi[c];
                }
                value += std::conj(phi[r]) * o_phi;
            }
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value.real();
        }
    }
    return {std::move(w)};
}

ProbVector stack_forward(std::span<const SbqeLayer> layers, const ProbVector& p0) {
    if (layers.empty()) {
        throw ShapeError("stack has no layers");
    }
    for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
        if (layers[k].observables().size() != layers[k + 1].pool().size()) {
            throw ShapeError("layer " + std::to_string(k) + " emits " +
                             std::to_string(layers[k].observables().size()) + " outputs but layer " +
                             std::to_string(k + 1) + " takes " + std::to_string(layers[k + 1].pool().size()));
        }
    }
    ProbVector p = p0;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        ProbVector f(sbqe_forward(layers[k], p));
        p = (k + 1 < layers.size()) ? log_relu_cascade(f) : std::move(f);
    }
    return p;
}

Eigen::MatrixXd basis_transition_matrix(const ComplexMatrix& u) {
    Eigen::MatrixXd t(u.rows(), u.cols());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
            t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::norm(u(i, j));
        }
    }
    return t;
}

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::amplitude_hybrid:
        return "amplitude_hybrid";
    case ModelKind::probabilistic_hybrid:
        return "probabilistic_hybrid";
    case ModelKind::width_matched_linear:
        return "width_matched_linear";
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
    for (ModelKind kind : kAllModelKinds) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

std::size_t ModelSpec::parameter_count() const {
    return count_params(*this);
}

std::size_t count_params(const ModelSpec& spec) {
    const auto in = static_cast<std::size_t>(spec.input_dim);
    const auto classes = static_cast<std::size_t>(spec.n_classes);
    const std::size_t n = spec.pool_size();
    const std::size_t angles = spec.circuit().n_angles();
    switch (spec.kind) {
    case ModelKind::amplitude_hybrid:
        return angles + n * classes + classes;
    case ModelKind::probabilistic_hybrid:
        return in * n + n + angles + n * classes + classes;
    case ModelKind::width_matched_linear: {
        const auto h = static_cast<std::size_t>(spec.hidden_width);
        return in * h + h + h * classes + classes;
    }
    }
    return 0;
}

int width_matched_hidden(std::size_t budget, int input_dim, int n_classes) {
    const auto per_unit = static_cast<std::size_t>(input_dim + 1 + n_classes);
    const auto fixed = static_cast<std::size_t>(n_classes);
    if (budget < fixed + per_unit) {
        throw ContractError("parameter budget " + std::to_string(budget) + " cannot hold one hidden unit");
    }
    return static_cast<int>((budget - fixed) / per_unit);
}

ModelSpec make_model_spec(ModelKind kind, int n_qubits, int n_layers, int n_classes, int input_dim) {
    ModelSpec spec{kind, n_qubits, n_layers, n_classes, input_dim, 0};
    spec.circuit().validate();
    if (n_classes < 2 || input_dim < 1) {
        throw ContractError("need at least 2 classes and 1 input feature");
    }
    if (kind == ModelKind::amplitude_hybrid && static_cast<std::size_t>(input_dim) > spec.pool_size()) {
        throw ContractError(std::to_string(input_dim) + " features do not fit in " + std::to_string(n_qubits) +
                            " qubits");
    }
    if (kind == ModelKind::width_matched_linear) {
        ModelSpec hybrid = spec;
        hybrid.kind = ModelKind::probabilistic_hybrid;
        spec.hidden_width = width_matched_hidden(count_params(hybrid), input_dim, n_classes);
    }
    if (count_params(spec) > kParameterCap) {
        throw ContractError(std::string(to_string(kind)) + " has " + std::to_string(count_params(spec)) +
                            " parameters, above the cap of " + std::to_string(kParameterCap));
    }
    return spec;
}

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Model model{spec, {}};
    const auto in = static_cast<std::size_t>(spec.input_dim);
    const auto classes = static_cast<std::size_t>(spec.n_classes);
    const std::size_t n = spec.pool_size();

    auto dense = [&](const char* weight, const char* bias, std::size_t out, std::size_t fan_in) {
        NamedArray& w = model.params.add(weight, {out, fan_in});
        std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
        for (double& v : w.values) {
            v = normal(rng);
        }
        model.params.add(bias, {out});
    };
    auto angles = [&] {
        const CircuitSpec circuit = spec.circuit();
        const ParamSet theta = init_params(circuit, rng);
        model.params.add(NamedArray{names::kAngles,
                                    {static_cast<std::size_t>(circuit.n_layers),
                                     static_cast<std::size_t>(circuit.n_qubits), 3},
                                    {theta.values().begin(), theta.values().end()}});
    };

    switch (spec.kind) {
    case ModelKind::amplitude_hybrid:
        angles();
        dense(names::kReadoutWeight, names::kReadoutBias, classes, n);
        break;
    case ModelKind::probabilistic_hybrid:
        dense(names::kInputWeight, names::kInputBias, n, in);
        angles();
        dense(names::kReadoutWeight, names::kReadoutBias, classes, n);
        break;
    case ModelKind::width_matched_linear:
        dense(names::kHiddenWeight, names::kHiddenBias, static_cast<std::size_t>(spec.hidden_width), in);
        dense(names::kOutputWeight, names::kOutputBias, classes, static_cast<std::size_t>(spec.hidden_width));
        break;
    }
    return model;
}

ParamSet circuit_params(const Model& model) {
    const NamedArray& a = model.params.at(names::kAngles);
    return ParamSet(model.spec.circuit(), a.values);
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out = logits;
    out.colwise() -= logits.rowwise().maxCoeff();
    out = out.array().exp();
    out.array().colwise() /= out.rowwise().sum().array();
    return out;
}

Eigen::MatrixXd amplitude_rows(const Eigen::MatrixXd& features) {
    Eigen::MatrixXd out = features;
    for (Eigen::Index b = 0; b < out.rows(); ++b) {
        const double norm = out.row(b).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw DegenerateInputError("amplitude embedding of a zero or non-finite feature vector (row " +
                                       std::to_string(b) + ")");
        }
        out.row(b) /= norm;
    }
    return out;
}

Eigen::MatrixXd forward_logits(const Model& model, const Eigen::MatrixXd& features) {
    require_features(model.spec, features);
    switch (model.spec.kind) {
    case ModelKind::amplitude_hybrid:
        return readout(model, amplitude_probabilities(model, amplitude_rows(features)));
    case ModelKind::probabilistic_hybrid:
        return readout(model, input_probabilities(model, features) * transition_matrix(model).transpose());
    case ModelKind::width_matched_linear:
        return linear_forward(model, features);
    }
    return {};
}

Eigen::MatrixXd forward_logits_sampled(const Model& model, const Eigen::MatrixXd& features, std::uint64_t n_shots,
                                       std::uint64_t seed) {
    require_features(model.spec, features);
    std::mt19937_64 rng(seed);
    auto resample_rows = [&](Eigen::MatrixXd probs) {
        for (Eigen::Index b = 0; b < probs.rows(); ++b) {
            std::vector<double> row(probs.cols());
            const double sum = probs.row(b).sum();
            for (Eigen::Index j = 0; j < probs.cols(); ++j) {
                row[static_cast<std::size_t>(j)] = probs(b, j) / sum;
            }
            const ProbVector p_hat = empirical_prob(allocate_shots_sampled(ProbVector(std::move(row)), n_shots, rng));
            for (Eigen::Index j = 0; j < probs.cols(); ++j) {
                probs(b, j) = p_hat[static_cast<std::size_t>(j)];
            }
        }
        return probs;
    };
    switch (model.spec.kind) {
    case ModelKind::amplitude_hybrid:
        return readout(model, resample_rows(amplitude_probabilities(model, amplitude_rows(features))));
    case ModelKind::probabilistic_hybrid:
        return readout(model,
                       resample_rows(input_probabilities(model, features)) * transition_matrix(model).transpose());
    case ModelKind::width_matched_linear:
        return linear_forward(model, features);
    }
    return {};
}

Eigen::VectorXd amplitude_hybrid_forward(const Model& model, const Eigen::VectorXd& x) {
    return single(model, x, ModelKind::amplitude_hybrid);
}

Eigen::VectorXd probabilistic_hybrid_forward(const Model& model, const Eigen::VectorXd& x) {
    return single(model, x, ModelKind::probabilistic_hybrid);
}

Eigen::VectorXd width_matched_linear_forward(const Model& model, const Eigen::VectorXd& x) {
    return single(model, x, ModelKind::width_matched_linear);
}

} // namespace sbqe
