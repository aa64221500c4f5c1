#pragma once

// Variational ansatz: n_layers blocks of (Rot on every qubit, then an
// ascending CNOT ladder 0->1, 1->2, ...). Qubit 0 is the most significant bit
// of a basis index, so kron(g0, g1, ...) acts as g0 on qubit 0.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sbqe/tensor.hpp"

namespace sbqe {

struct CircuitSpec {
    int n_qubits = 8;
    int n_layers = 4;

    // Throws ContractError unless 1 <= n_qubits <= 12 and n_layers >= 1.
    void validate() const;
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << n_qubits; }
    [[nodiscard]] std::size_t n_angles() const noexcept {
        return static_cast<std::size_t>(n_layers) * static_cast<std::size_t>(n_qubits) * 3;
    }

    friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

// Trainable Rot angles, laid out [layer][qubit][alpha, beta, gamma].
class ParamSet {
  public:
    ParamSet(const CircuitSpec& spec, std::vector<double> angles);

    [[nodiscard]] const CircuitSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return angles_; }
    [[nodiscard]] std::span<const double> layer(int l) const;

    [[nodiscard]] static std::size_t index(const CircuitSpec& spec, int layer, int qubit, int k) {
        return (static_cast<std::size_t>(layer) * static_cast<std::size_t>(spec.n_qubits) +
                static_cast<std::size_t>(qubit)) * 3 + static_cast<std::size_t>(k);
    }
    [[nodiscard]] double angle(int layer, int qubit, int k) const {
        return angles_[index(spec_, layer, qubit, k)];
    }

  private:
    CircuitSpec spec_;
    std::vector<double> angles_;
};

class ObservableSet {
  public:
    explicit ObservableSet(std::vector<ComplexMatrix> observables);

    // |i><i| for every basis index i of a q-qubit register.
    static ObservableSet computational_projectors(int n_qubits);

    [[nodiscard]] std::size_t size() const noexcept { return observables_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept;
    [[nodiscard]] const ComplexMatrix& operator[](std::size_t i) const { return observables_[i]; }
    [[nodiscard]] const std::vector<ComplexMatrix>& items() const noexcept { return observables_; }

  private:
    std::vector<ComplexMatrix> observables_;
};

ComplexMatrix rz_gate(double phi);
ComplexMatrix ry_gate(double phi);
// RZ(gamma) RY(beta) RZ(alpha); RZ(alpha) acts first on a ket.
ComplexMatrix rot_gate(double alpha, double beta, double gamma);
ComplexMatrix cnot_matrix(int n_qubits, int control, int target);

// (kron of Rot gates) followed by the CNOT ladder. layer_angles is [n_qubits][3].
ComplexMatrix build_layer_unitary(const CircuitSpec& spec, std::span<const double> layer_angles);
// Product of the layer unitaries with layer 0 applied first.
ComplexMatrix build_circuit_unitary(const CircuitSpec& spec, const ParamSet& params);

DensityMatrix evolve_density(const DensityMatrix& rho, const ComplexMatrix& u);

// Angles drawn i.i.d. from a normal distribution with standard deviation 0.02.
ParamSet init_params(const CircuitSpec& spec, std::uint64_t seed);
ParamSet init_params(const CircuitSpec& spec, std::mt19937_64& rng);

inline constexpr double kInitAngleStddev = 0.02;

// ---------------------------------------------------------------------------
// Gate-by-gate evolution of a block of column states.
//
// `columns` is dim x k: every column is a (not necessarily normalised)
// state. These are the training hot path; the dense builders above are the
// reference they are tested against.

void apply_single_qubit(ComplexMatrix& columns, int n_qubits, int qubit, const ComplexMatrix& gate);
void apply_cnot(ComplexMatrix& columns, int n_qubits, int control, int target);

// U(theta) * columns.
ComplexMatrix evolve_columns(const CircuitSpec& spec, const ParamSet& params, ComplexMatrix columns);

// Maps the evolved columns U(theta) * columns to a real number.
using ColumnObjective = std::function<double(const ComplexMatrix&)>;

// d objective(U(theta) columns) / d theta for every Rot angle via the
// two-term parameter-shift rule (each Rot angle has a +-1/2 eigenvalue
// generator): 1/2 [obj(theta + pi/2) - obj(theta - pi/2)].
std::vector<double> parameter_shift_gradient(const CircuitSpec& spec, const ParamSet& params,
                                             const ComplexMatrix& columns,
                                             const ColumnObjective& objective);

} // namespace sbqe
