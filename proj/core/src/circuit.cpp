#include "sbqe/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

std::size_t bit_of(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_qubit(int n_qubits, int qubit) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw RangeError("qubit " + std::to_string(qubit) + " out of range for " +
                         std::to_string(n_qubits) + " qubits");
    }
}

ComplexMatrix mul2(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(2, 2);
    out(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    out(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    out(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    out(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return out;
}

// Precomputed Rot matrices for every (layer, qubit).
std::vector<ComplexMatrix> rot_gates(const ParamSet& params) {
    const CircuitSpec& spec = params.spec();
    std::vector<ComplexMatrix> gates;
    gates.reserve(static_cast<std::size_t>(spec.n_layers * spec.n_qubits));
    for (int l = 0; l < spec.n_layers; ++l) {
        for (int q = 0; q < spec.n_qubits; ++q) {
            gates.push_back(rot_gate(params.angle(l, q, 0), params.angle(l, q, 1), params.angle(l, q, 2)));
        }
    }
    return gates;
}

void apply_ladder(ComplexMatrix& columns, int n_qubits) {
    for (int q = 0; q + 1 < n_qubits; ++q) {
        apply_cnot(columns, n_qubits, q, q + 1);
    }
}

// Applies Rot gates (layer, first_qubit..end), the ladder of `layer`, and
// every later layer.
void apply_tail(ComplexMatrix& columns, const CircuitSpec& spec, const std::vector<ComplexMatrix>& gates,
                int layer, int first_qubit) {
    for (int l = layer; l < spec.n_layers; ++l) {
        for (int q = (l == layer ? first_qubit : 0); q < spec.n_qubits; ++q) {
            apply_single_qubit(columns, spec.n_qubits, q,
                               gates[static_cast<std::size_t>(l * spec.n_qubits + q)]);
        }
        apply_ladder(columns, spec.n_qubits);
    }
}

void check_columns(const CircuitSpec& spec, const ComplexMatrix& columns) {
    if (columns.rows() != spec.dim()) {
        throw ShapeError("column block has " + std::to_string(columns.rows()) + " rows, circuit dim is " +
                         std::to_string(spec.dim()));
    }
}

} // namespace

void CircuitSpec::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ContractError("n_qubits must be in [1, 12], got " + std::to_string(n_qubits));
    }
    if (n_layers < 1) {
        throw ContractError("n_layers must be >= 1, got " + std::to_string(n_layers));
    }
}

ParamSet::ParamSet(const CircuitSpec& spec, std::vector<double> angles)
    : spec_(spec), angles_(std::move(angles)) {
    spec_.validate();
    if (angles_.size() != spec_.n_angles()) {
        throw ShapeError("expected " + std::to_string(spec_.n_angles()) + " angles, got " +
                         std::to_string(angles_.size()));
    }
    if (!std::all_of(angles_.begin(), angles_.end(), [](double a) { return std::isfinite(a); })) {
        throw ContractError("circuit angles must be finite");
    }
}

std::span<const double> ParamSet::layer(int l) const {
    if (l < 0 || l >= spec_.n_layers) {
        throw RangeError("layer " + std::to_string(l) + " out of range");
    }
    const std::size_t width = static_cast<std::size_t>(spec_.n_qubits) * 3;
    return std::span<const double>(angles_).subspan(static_cast<std::size_t>(l) * width, width);
}

ObservableSet::ObservableSet(std::vector<ComplexMatrix> observables) : observables_(std::move(observables)) {
    if (observables_.empty()) {
        throw ShapeError("observable set is empty");
    }
    const std::size_t n = observables_.front().rows();
    for (const auto& o : observables_) {
        if (o.rows() != n || o.cols() != n) {
            throw ShapeError("observables must all be square of the same dimension");
        }
        if (!is_hermitian(o, kDerivedTol)) {
            throw ContractError("observable is not Hermitian");
        }
    }
}

ObservableSet ObservableSet::computational_projectors(int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        ComplexMatrix p(dim, dim);
        p(i, i) = 1.0;
        projectors.push_back(std::move(p));
    }
    return ObservableSet(std::move(projectors));
}

std::size_t ObservableSet::dim() const noexcept {
    return observables_.front().rows();
}

ComplexMatrix rz_gate(double phi) {
    ComplexMatrix g(2, 2);
    g(0, 0) = std::polar(1.0, -phi / 2);
    g(1, 1) = std::polar(1.0, phi / 2);
    return g;
}

ComplexMatrix ry_gate(double phi) {
    const double c = std::cos(phi / 2);
    const double s = std::sin(phi / 2);
    return ComplexMatrix(2, 2, {c, -s, s, c});
}

ComplexMatrix rot_gate(double alpha, double beta, double gamma) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
        throw ContractError("Rot angles must be finite");
    }
    return mul2(rz_gate(gamma), mul2(ry_gate(beta), rz_gate(alpha)));
}

ComplexMatrix cnot_matrix(int n_qubits, int control, int target) {
    check_qubit(n_qubits, control);
    check_qubit(n_qubits, target);
    if (control == target) {
        throw ContractError("CNOT control and target coincide");
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t cbit = bit_of(n_qubits, control);
    const std::size_t tbit = bit_of(n_qubits, target);
    ComplexMatrix m(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) {
        const std::size_t y = (x & cbit) ? (x ^ tbit) : x;
        m(y, x) = 1.0;
    }
    return m;
}

ComplexMatrix build_layer_unitary(const CircuitSpec& spec, std::span<const double> layer_angles) {
    spec.validate();
    if (layer_angles.size() != static_cast<std::size_t>(spec.n_qubits) * 3) {
        throw ShapeError("layer needs " + std::to_string(spec.n_qubits * 3) + " angles, got " +
                         std::to_string(layer_angles.size()));
    }
    ComplexMatrix u = rot_gate(layer_angles[0], layer_angles[1], layer_angles[2]);
    for (int q = 1; q < spec.n_qubits; ++q) {
        const auto a = layer_angles.subspan(static_cast<std::size_t>(q) * 3, 3);
        u = kron(u, rot_gate(a[0], a[1], a[2]));
    }
    for (int q = 0; q + 1 < spec.n_qubits; ++q) {
        u = matmul(cnot_matrix(spec.n_qubits, q, q + 1), u);
    }
    return u;
}

ComplexMatrix build_circuit_unitary(const CircuitSpec& spec, const ParamSet& params) {
    if (!(params.spec() == spec)) {
        throw ShapeError("parameter set was built for a different circuit shape");
    }
    ComplexMatrix u = build_layer_unitary(spec, params.layer(0));
    for (int l = 1; l < spec.n_layers; ++l) {
        u = matmul(build_layer_unitary(spec, params.layer(l)), u);
    }
    return u;
}

DensityMatrix evolve_density(const DensityMatrix& rho, const ComplexMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw ShapeError("unitary does not match density matrix dimension");
    }
    if (!is_unitary(u, kDerivedTol)) {
        throw ContractError("evolution operator is not unitary");
    }
    return DensityMatrix(matmul(matmul(u, rho.matrix()), adjoint(u)));
}

ParamSet init_params(const CircuitSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return init_params(spec, rng);
}

ParamSet init_params(const CircuitSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    std::normal_distribution<double> normal(0.0, kInitAngleStddev);
    std::vector<double> angles(spec.n_angles());
    for (auto& a : angles) {
        a = normal(rng);
    }
    return ParamSet(spec, std::move(angles));
}

void apply_single_qubit(ComplexMatrix& columns, int n_qubits, int qubit, const ComplexMatrix& gate) {
    check_qubit(n_qubits, qubit);
    const std::size_t stride = bit_of(n_qubits, qubit);
    const std::size_t width = columns.cols();
    const double g00r = gate(0, 0).real(), g00i = gate(0, 0).imag();
    const double g01r = gate(0, 1).real(), g01i = gate(0, 1).imag();
    const double g10r = gate(1, 0).real(), g10i = gate(1, 0).imag();
    const double g11r = gate(1, 1).real(), g11i = gate(1, 1).imag();
    // std::complex<double> is layout-compatible with double[2].
    auto* base = reinterpret_cast<double*>(columns.data());
    for (std::size_t block = 0; block < columns.rows(); block += 2 * stride) {
        for (std::size_t r = block; r < block + stride; ++r) {
            double* x = base + 2 * r * width;
            double* y = base + 2 * (r + stride) * width;
            for (std::size_t c = 0; c < 2 * width; c += 2) {
                const double xr = x[c], xi = x[c + 1];
                const double yr = y[c], yi = y[c + 1];
                x[c] = g00r * xr - g00i * xi + g01r * yr - g01i * yi;
                x[c + 1] = g00r * xi + g00i * xr + g01r * yi + g01i * yr;
                y[c] = g10r * xr - g10i * xi + g11r * yr - g11i * yi;
                y[c + 1] = g10r * xi + g10i * xr + g11r * yi + g11i * yr;
            }
        }
    }
}

void apply_cnot(ComplexMatrix& columns, int n_qubits, int control, int target) {
    check_qubit(n_qubits, control);
    check_qubit(n_qubits, target);
    const std::size_t cbit = bit_of(n_qubits, control);
    const std::size_t tbit = bit_of(n_qubits, target);
    for (std::size_t r = 0; r < columns.rows(); ++r) {
        if ((r & cbit) && !(r & tbit)) {
            const auto a = columns.row(r);
            const auto b = columns.row(r | tbit);
            std::swap_ranges(a.begin(), a.end(), b.begin());
        }
    }
}

ComplexMatrix evolve_columns(const CircuitSpec& spec, const ParamSet& params, ComplexMatrix columns) {
    check_columns(spec, columns);
    apply_tail(columns, spec, rot_gates(params), 0, 0);
    return columns;
}

std::vector<double> parameter_shift_gradient(const CircuitSpec& spec, const ParamSet& params,
                                             const ComplexMatrix& columns,
                                             const ColumnObjective& objective) {
    check_columns(spec, columns);
    constexpr double kShift = std::numbers::pi / 2;
    const auto gates = rot_gates(params);
    std::vector<double> grad(spec.n_angles());

    // `prefix` holds the columns after every gate before the one being shifted.
    ComplexMatrix prefix = columns;
    ComplexMatrix work;
    for (int l = 0; l < spec.n_layers; ++l) {
        for (int q = 0; q < spec.n_qubits; ++q) {
            for (int k = 0; k < 3; ++k) {
                double evaluations[2];
                for (int s = 0; s < 2; ++s) {
                    double angles[3] = {params.angle(l, q, 0), params.angle(l, q, 1), params.angle(l, q, 2)};
                    angles[k] += (s == 0 ? kShift : -kShift);
                    work = prefix;
                    apply_single_qubit(work, spec.n_qubits, q, rot_gate(angles[0], angles[1], angles[2]));
                    apply_tail(work, spec, gates, l, q + 1);
                    evaluations[s] = objective(work);
                }
                grad[ParamSet::index(spec, l, q, k)] = 0.5 * (evaluations[0] - evaluations[1]);
            }
            apply_single_qubit(prefix, spec.n_qubits, q, gates[static_cast<std::size_t>(l * spec.n_qubits + q)]);
        }
        apply_ladder(prefix, spec.n_qubits);
    }
    return grad;
}

} // namespace sbqe
