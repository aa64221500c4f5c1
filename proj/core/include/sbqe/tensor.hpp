#pragma once

// Dense complex linear algebra for registers of up to 12 qubits.
//
// ComplexMatrix is a plain row-major carrier. StateVector and DensityMatrix
// wrap it with the physical invariants (unit norm; Hermitian, unit trace)
// checked once at construction.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sbqe {

using Complex = std::complex<double>;

inline constexpr double kConstructionTol = 1e-12;
inline constexpr double kDerivedTol = 1e-10;
inline constexpr std::size_t kMaxEntries = std::size_t{1} << 24;
inline constexpr int kMaxQubits = 12;

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
        return data_[r * cols_ + c];
    }

    [[nodiscard]] std::span<Complex> row(std::size_t r) noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const Complex> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }
    [[nodiscard]] Complex* data() noexcept { return data_.data(); }
    [[nodiscard]] const Complex* data() const noexcept { return data_.data(); }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale) noexcept;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, ComplexMatrix a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
Complex trace(const ComplexMatrix& a);

[[nodiscard]] double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
[[nodiscard]] bool is_hermitian(const ComplexMatrix& a, double tol = kDerivedTol);
// max |U^dagger U - I| <= tol.
[[nodiscard]] bool is_unitary(const ComplexMatrix& u, double tol = kDerivedTol);

// log2 of a power-of-two dimension; throws ShapeError otherwise.
int qubits_for_dim(std::size_t dim);

class StateVector {
  public:
    // Throws ContractError when the amplitudes are not unit-norm within 1e-12
    // or the length is not a power of two.
    explicit StateVector(std::vector<Complex> amplitudes);

    static StateVector basis(std::size_t dim, std::size_t index);

    [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

  private:
    std::vector<Complex> amplitudes_;
};

class DensityMatrix {
  public:
    // Validates Hermiticity and unit trace (1e-12). PSD is not checked here.
    explicit DensityMatrix(ComplexMatrix entries);

    [[nodiscard]] std::size_t dim() const noexcept { return entries_.rows(); }
    [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return entries_; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return entries_(r, c); }

    // Tr(rho^2).
    [[nodiscard]] double purity() const;

  private:
    ComplexMatrix entries_;
};

// Re Tr[O rho]; O must be Hermitian within 1e-10.
double trace_product(const ComplexMatrix& o, const DensityMatrix& rho);

DensityMatrix outer(const StateVector& v);

// U v.
StateVector apply(const ComplexMatrix& u, const StateVector& v);

} // namespace sbqe
