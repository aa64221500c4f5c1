#pragma once

// SBQE layers, their effective weight matrices, and the three benchmark
// architectures that share one variational circuit shape.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sbqe/circuit.hpp"
#include "sbqe/encoding.hpp"
#include "sbqe/params.hpp"

namespace sbqe {

// One quantum perceptron: f_i = Tr[O_i U rho(p) U^dagger].
class SbqeLayer {
  public:
    SbqeLayer(ParamSet params, StatePool pool, ObservableSet observables);

    // Computational-basis pool with the full projector set.
    static SbqeLayer computational(ParamSet params);

    [[nodiscard]] const CircuitSpec& circuit() const noexcept { return params_.spec(); }
    [[nodiscard]] const ParamSet& params() const noexcept { return params_; }
    [[nodiscard]] const StatePool& pool() const noexcept { return pool_; }
    [[nodiscard]] const ObservableSet& observables() const noexcept { return observables_; }
    [[nodiscard]] const ComplexMatrix& unitary() const noexcept { return unitary_; }

  private:
    ParamSet params_;
    StatePool pool_;
    ObservableSet observables_;
    ComplexMatrix unitary_;
};

// W_ij = <psi_j| U^dagger O_i U |psi_j>, an m x n real matrix.
struct EffectiveWeights {
    Eigen::MatrixXd matrix;
};

std::vector<double> sbqe_forward(const SbqeLayer& layer, const ProbVector& p);
EffectiveWeights extract_weights(const SbqeLayer& layer);

// Alternates sbqe_forward and log_relu_cascade; no activation after the last layer.
ProbVector stack_forward(std::span<const SbqeLayer> layers, const ProbVector& p0);

// T_ij = |U_ij|^2: the effective weights for a basis pool and basis projectors.
Eigen::MatrixXd basis_transition_matrix(const ComplexMatrix& u);

enum class ModelKind { amplitude_hybrid, probabilistic_hybrid, width_matched_linear };

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;
inline constexpr ModelKind kAllModelKinds[] = {ModelKind::amplitude_hybrid, ModelKind::probabilistic_hybrid,
                                               ModelKind::width_matched_linear};

inline constexpr std::size_t kParameterCap = 11000;

struct ModelSpec {
    ModelKind kind = ModelKind::probabilistic_hybrid;
    int n_qubits = 8;
    int n_layers = 4;
    int n_classes = 10;
    int input_dim = 8;
    int hidden_width = 0; // width_matched_linear only

    [[nodiscard]] CircuitSpec circuit() const noexcept { return {n_qubits, n_layers}; }
    [[nodiscard]] std::size_t pool_size() const noexcept { return std::size_t{1} << n_qubits; }
    [[nodiscard]] std::size_t parameter_count() const;
};

// Validated spec; for the linear model the hidden width is derived from the
// probabilistic hybrid of the same shape. Throws ContractError when the
// parameter count exceeds kParameterCap.
ModelSpec make_model_spec(ModelKind kind, int n_qubits = 8, int n_layers = 4, int n_classes = 10,
                          int input_dim = 8);

std::size_t count_params(const ModelSpec& spec);

// Largest h with (input_dim + 1) h + (h + 1) n_classes <= budget.
int width_matched_hidden(std::size_t budget, int input_dim, int n_classes);

struct Model {
    ModelSpec spec;
    ParamTable params;
};

// Parameter array names.
namespace names {
inline constexpr const char* kInputWeight = "input.weight";
inline constexpr const char* kInputBias = "input.bias";
inline constexpr const char* kAngles = "circuit.angles";
inline constexpr const char* kReadoutWeight = "readout.weight";
inline constexpr const char* kReadoutBias = "readout.bias";
inline constexpr const char* kHiddenWeight = "hidden.weight";
inline constexpr const char* kHiddenBias = "hidden.bias";
inline constexpr const char* kOutputWeight = "output.weight";
inline constexpr const char* kOutputBias = "output.bias";
} // namespace names

// Circuit angles ~ N(0, 0.02); dense weights ~ N(0, 1/fan_in); biases zero.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

ParamSet circuit_params(const Model& model);

// Rows of `features` are samples; returns batch x n_classes logits.
Eigen::MatrixXd forward_logits(const Model& model, const Eigen::MatrixXd& features);

// Finite-shot evaluation. The probabilistic hybrid feeds empirical shot
// frequencies of one Multinomial(n_shots, p(x)) draw into the circuit; the
// amplitude hybrid replaces its exact basis probabilities with the
// frequencies of n_shots measurements. The linear model is unaffected.
Eigen::MatrixXd forward_logits_sampled(const Model& model, const Eigen::MatrixXd& features,
                                       std::uint64_t n_shots, std::uint64_t seed);

Eigen::VectorXd amplitude_hybrid_forward(const Model& model, const Eigen::VectorXd& x);
Eigen::VectorXd probabilistic_hybrid_forward(const Model& model, const Eigen::VectorXd& x);
Eigen::VectorXd width_matched_linear_forward(const Model& model, const Eigen::VectorXd& x);

// Row-wise softmax.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// L2-normalised rows; the implicit zero padding to 2^q amplitudes is
// handled by only evolving the leading input_dim basis columns. Throws
// DegenerateInputError on a zero row.
Eigen::MatrixXd amplitude_rows(const Eigen::MatrixXd& features);

} // namespace sbqe
