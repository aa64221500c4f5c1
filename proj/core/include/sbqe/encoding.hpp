#pragma once

// Data encodings in density-matrix form, shot allocation, and the
// simplex-preserving log-ReLU activation.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbqe/tensor.hpp"

namespace sbqe {

inline constexpr double kSimplexTol = 1e-10;

// Non-negative reals summing to one within 1e-10.
class ProbVector {
  public:
    explicit ProbVector(std::vector<double> probs);

    static ProbVector uniform(std::size_t n);
    static ProbVector one_hot(std::size_t n, std::size_t index);

    [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return probs_; }
    double operator[](std::size_t i) const noexcept { return probs_[i]; }

  private:
    std::vector<double> probs_;
};

class StatePool {
  public:
    explicit StatePool(std::vector<StateVector> states);

    // All 2^q computational-basis states, in index order.
    static StatePool computational_basis(int n_qubits);

    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return states_.front().dim(); }
    const StateVector& operator[](std::size_t j) const { return states_[j]; }
    [[nodiscard]] const std::vector<StateVector>& states() const noexcept { return states_; }

  private:
    std::vector<StateVector> states_;
};

struct ShotAllocation {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    friend bool operator==(const ShotAllocation&, const ShotAllocation&) = default;
};

DensityMatrix basis_encode(std::uint64_t index, int n_qubits);
// Zero-pads x to 2^q entries and L2-normalises.
StateVector amplitude_encode(std::span<const double> x, int n_qubits);
// (kron_i RY(x_i)) |0..0>; x has one entry per qubit.
DensityMatrix angle_encode_density(std::span<const double> x, int n_qubits);

// sum_j p_j |psi_j><psi_j|.
DensityMatrix sbqe_mixture(const ProbVector& p, const StatePool& pool);

// Deterministic rounding of n_total * p that sums exactly to n_total:
// round half-up, then hand out (or take back) the remaining shots by
// largest (smallest) rounding remainder, ties to the lower index.
ShotAllocation allocate_shots_expected(const ProbVector& p, std::uint64_t n_total);

// One Multinomial(n_total, p) draw.
ShotAllocation allocate_shots_sampled(const ProbVector& p, std::uint64_t n_total, std::mt19937_64& rng);
ShotAllocation allocate_shots_sampled(const ProbVector& p, std::uint64_t n_total, std::uint64_t seed);

ProbVector empirical_prob(const ShotAllocation& alloc);

// log -> centre on the mean -> ReLU -> renormalise. Zero entries are
// excluded throughout and stay zero; an all-zero ReLU output falls back to
// the uniform distribution over the surviving entries.
ProbVector log_relu_cascade(const ProbVector& p);

// softmax(weights * features + bias).
ProbVector input_prob_map(const Eigen::VectorXd& features, const Eigen::MatrixXd& weights,
                          const Eigen::VectorXd& bias);

} // namespace sbqe
