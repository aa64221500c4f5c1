#include "sbqe/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

bool all_finite(std::span<const Complex> values) {
    return std::all_of(values.begin(), values.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

std::string dims(const ComplexMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
    if (rows != 0 && cols > kMaxEntries / rows) {
        throw SizeError("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds 2^24 entries");
    }
    data_.assign(rows * cols, Complex{});
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("expected " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(data_.size()));
    }
    if (!all_finite(data_)) {
        throw NumericError("matrix entries must be finite");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw ShapeError("cannot add " + dims(*this) + " and " + dims(other));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) noexcept {
    for (auto& z : data_) {
        z *= scale;
    }
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
}

ComplexMatrix operator*(Complex scale, ComplexMatrix a) {
    a *= scale;
    return a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if ((a.rows() != 0 && rows / a.rows() != b.rows()) ||
        (a.cols() != 0 && cols / a.cols() != b.cols()) || (rows != 0 && cols > kMaxEntries / rows)) {
        throw SizeError("kron of " + dims(a) + " and " + dims(b) + " exceeds 2^24 entries");
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex s = a(ar, ac);
            if (s == Complex{}) {
                continue;
            }
            for (std::size_t br = 0; br < b.rows(); ++br) {
                Complex* dst = &out(ar * b.rows() + br, ac * b.cols());
                const auto src = b.row(br);
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    dst[bc] = s * src[bc];
                }
            }
        }
    }
    return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul of " + dims(a) + " and " + dims(b));
    }
    ComplexMatrix out(a.rows(), b.cols());
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex* dst = &out(i, 0);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex s = a(i, k);
            if (s == Complex{}) {
                continue;
            }
            const double sr = s.real();
            const double si = s.imag();
            const Complex* src = &b(k, 0);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const double br = src[j].real();
                const double bi = src[j].imag();
                dst[j] = {dst[j].real() + sr * br - si * bi, dst[j].imag() + sr * bi + si * br};
            }
        }
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

Complex trace(const ComplexMatrix& a) {
    if (!a.is_square()) {
        throw ShapeError("trace of non-square " + dims(a));
    }
    Complex sum{};
    for (std::size_t i = 0; i < a.rows(); ++i) {
        sum += a(i, i);
    }
    return sum;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("cannot compare " + dims(a) + " and " + dims(b));
    }
    double worst = 0.0;
    const auto ea = a.entries();
    const auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) {
        worst = std::max(worst, std::abs(ea[i] - eb[i]));
    }
    return worst;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (!a.is_square()) {
        return false;
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = r; c < a.cols(); ++c) {
            if (std::abs(a(r, c) - std::conj(a(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (!u.is_square()) {
        return false;
    }
    const std::size_t n = u.rows();
    // Column inner products of U give U^dagger U without materialising the adjoint.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Complex dot{};
            for (std::size_t k = 0; k < n; ++k) {
                dot += std::conj(u(k, i)) * u(k, j);
            }
            const Complex expected = (i == j) ? Complex{1.0} : Complex{};
            if (std::abs(dot - expected) > tol) {
                return false;
            }
        }
    }
    return true;
}

int qubits_for_dim(std::size_t dim) {
    if (dim == 0 || !std::has_single_bit(dim)) {
        throw ShapeError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    const int q = std::countr_zero(dim);
    if (q > kMaxQubits) {
        throw SizeError("register of " + std::to_string(q) + " qubits exceeds the 12-qubit limit");
    }
    return q;
}

StateVector::StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty() || !std::has_single_bit(amplitudes_.size())) {
        throw ContractError("state dimension must be a power of two");
    }
    if (!all_finite(amplitudes_)) {
        throw NumericError("state amplitudes must be finite");
    }
    double norm2 = 0.0;
    for (const auto& z : amplitudes_) {
        norm2 += std::norm(z);
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > kConstructionTol) {
        throw ContractError("state is not normalised (norm " + std::to_string(std::sqrt(norm2)) + ")");
    }
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw RangeError("basis index " + std::to_string(index) + " out of range for dim " +
                         std::to_string(dim));
    }
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return StateVector(std::move(amps));
}

DensityMatrix::DensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (!entries_.is_square() || entries_.rows() == 0) {
        throw ShapeError("density matrix must be square and non-empty");
    }
    qubits_for_dim(entries_.rows());
    if (!all_finite(entries_.entries())) {
        throw NumericError("density matrix entries must be finite");
    }
    if (!is_hermitian(entries_, kConstructionTol)) {
        throw ContractError("density matrix is not Hermitian");
    }
    const Complex tr = trace(entries_);
    if (std::abs(tr - Complex{1.0}) > kConstructionTol) {
        throw ContractError("density matrix trace is " + std::to_string(tr.real()) + ", not 1");
    }
}

double DensityMatrix::purity() const {
    // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    double sum = 0.0;
    for (const auto& z : entries_.entries()) {
        sum += std::norm(z);
    }
    return sum;
}

double trace_product(const ComplexMatrix& o, const DensityMatrix& rho) {
    if (o.rows() != rho.dim() || o.cols() != rho.dim()) {
        throw ShapeError("observable " + dims(o) + " does not match density matrix of dim " +
                         std::to_string(rho.dim()));
    }
    if (!is_hermitian(o, kDerivedTol)) {
        throw ContractError("observable is not Hermitian");
    }
    // Tr[O rho] = sum_ij O_ij rho_ji.
    Complex sum{};
    const std::size_t n = rho.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sum += o(i, j) * rho(j, i);
        }
    }
    if (std::abs(sum.imag()) > kDerivedTol) {
        throw ContractError("Tr[O rho] has imaginary part " + std::to_string(sum.imag()));
    }
    return sum.real();
}

DensityMatrix outer(const StateVector& v) {
    const std::size_t n = v.dim();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = v[i] * std::conj(v[j]);
        }
    }
    return DensityMatrix(std::move(m));
}

StateVector apply(const ComplexMatrix& u, const StateVector& v) {
    if (u.cols() != v.dim() || u.rows() != v.dim()) {
        throw ShapeError("operator " + dims(u) + " does not act on dim " + std::to_string(v.dim()));
    }
    std::vector<Complex> out(v.dim());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        Complex sum{};
        for (std::size_t k = 0; k < u.cols(); ++k) {
            sum += u(i, k) * v[k];
        }
        out[i] = sum;
    }
    return StateVector(std::move(out));
}

} // namespace sbqe
