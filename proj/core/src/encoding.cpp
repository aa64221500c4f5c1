#include "sbqe/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sbqe/circuit.hpp"
#include "sbqe/error.hpp"

namespace sbqe {

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw ShapeError("probability vector is empty");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ContractError("probability entries must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw ContractError("probabilities sum to " + std::to_string(sum) + ", not 1");
    }
    // Absorb the admitted rounding slack so downstream traces are exactly 1.
    for (double& p : probs_) {
        p /= sum;
    }
}

ProbVector ProbVector::uniform(std::size_t n) {
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::one_hot(std::size_t n, std::size_t index) {
    if (index >= n) {
        throw RangeError("one-hot index out of range");
    }
    std::vector<double> p(n, 0.0);
    p[index] = 1.0;
    return ProbVector(std::move(p));
}

StatePool::StatePool(std::vector<StateVector> states) : states_(std::move(states)) {
    if (states_.empty()) {
        throw ShapeError("state pool is empty");
    }
    const std::size_t dim = states_.front().dim();
    for (const auto& s : states_) {
        if (s.dim() != dim) {
            throw ShapeError("state pool members differ in dimension");
        }
    }
}

StatePool StatePool::computational_basis(int n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<StateVector> states;
    states.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        states.push_back(StateVector::basis(dim, i));
    }
    return StatePool(std::move(states));
}

DensityMatrix basis_encode(std::uint64_t index, int n_qubits) {
    CircuitSpec{n_qubits, 1}.validate();
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (index >= dim) {
        throw RangeError("basis index " + std::to_string(index) + " out of range for " +
                         std::to_string(n_qubits) + " qubits");
    }
    return outer(StateVector::basis(dim, index));
}

StateVector amplitude_encode(std::span<const double> x, int n_qubits) {
    CircuitSpec{n_qubits, 1}.validate();
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (x.size() > dim) {
        throw ShapeError(std::to_string(x.size()) + " features do not fit in " + std::to_string(n_qubits) +
                         " qubits");
    }
    double norm2 = 0.0;
    for (double v : x) {
        norm2 += v * v;
    }
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw DegenerateInputError("amplitude encoding needs a finite non-zero vector");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<Complex> amps(dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = x[i] * inv;
    }
    return StateVector(std::move(amps));
}

DensityMatrix angle_encode_density(std::span<const double> x, int n_qubits) {
    CircuitSpec{n_qubits, 1}.validate();
    if (x.size() != static_cast<std::size_t>(n_qubits)) {
        throw ShapeError("angle encoding needs one feature per qubit");
    }
    // RY(x)|0> = (cos x/2, sin x/2); the product state is the kron of those.
    std::vector<Complex> amps{1.0};
    for (double angle : x) {
        const double c = std::cos(angle / 2);
        const double s = std::sin(angle / 2);
        std::vector<Complex> next(amps.size() * 2);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            next[2 * i] = amps[i] * c;
            next[2 * i + 1] = amps[i] * s;
        }
        amps = std::move(next);
    }
    return outer(StateVector(std::move(amps)));
}

DensityMatrix sbqe_mixture(const ProbVector& p, const StatePool& pool) {
    if (p.size() != pool.size()) {
        throw ShapeError("probability vector has " + std::to_string(p.size()) + " entries, pool has " +
                         std::to_string(pool.size()));
    }
    const std::size_t n = pool.dim();
    ComplexMatrix rho(n, n);
    for (std::size_t j = 0; j < pool.size(); ++j) {
        const double w = p[j];
        if (w == 0.0) {
            continue;
        }
        const StateVector& psi = pool[j];
        for (std::size_t r = 0; r < n; ++r) {
            if (psi[r] == Complex{}) {
                continue;
            }
            const Complex a = w * psi[r];
            for (std::size_t c = 0; c < n; ++c) {
                rho(r, c) += a * std::conj(psi[c]);
            }
        }
    }
    return DensityMatrix(std::move(rho));
}

ShotAllocation allocate_shots_expected(const ProbVector& p, std::uint64_t n_total) {
    if (n_total < 1) {
        throw RangeError("shot budget must be at least 1");
    }
    const auto total = static_cast<double>(n_total);
    const std::size_t n = p.size();
    std::vector<std::uint64_t> counts(n);
    std::vector<double> remainder(n);
    std::int64_t assigned = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double exact = total * p[j];
        counts[j] = static_cast<std::uint64_t>(std::floor(exact + 0.5));
        remainder[j] = exact - static_cast<double>(counts[j]);
        assigned += static_cast<std::int64_t>(counts[j]);
    }
    std::int64_t deficit = static_cast<std::int64_t>(n_total) - assigned;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (deficit > 0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        for (std::size_t k = 0; deficit > 0; k = (k + 1) % n, --deficit) {
            ++counts[order[k]];
        }
    } else if (deficit < 0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] < remainder[b]; });
        for (std::size_t k = 0; deficit < 0; k = (k + 1) % n) {
            if (counts[order[k]] > 0) {
                --counts[order[k]];
                ++deficit;
            }
        }
    }
    return {std::move(counts), n_total};
}

ShotAllocation allocate_shots_sampled(const ProbVector& p, std::uint64_t n_total, std::mt19937_64& rng) {
    if (n_total < 1) {
        throw RangeError("shot budget must be at least 1");
    }
    // Sequential conditional binomials: N_j ~ Bin(remaining, p_j / mass_left).
    std::vector<std::uint64_t> counts(p.size(), 0);
    std::uint64_t remaining = n_total;
    double mass_left = 1.0;
    for (std::size_t j = 0; j + 1 < p.size() && remaining > 0; ++j) {
        if (p[j] <= 0.0) {
            continue;
        }
        const double q = mass_left > 0.0 ? std::clamp(p[j] / mass_left, 0.0, 1.0) : 1.0;
        std::binomial_distribution<std::uint64_t> binom(remaining, q);
        counts[j] = binom(rng);
        remaining -= counts[j];
        mass_left -= p[j];
    }
    if (remaining > 0) {
        // Hand the rest to the last entry with non-zero probability.
        std::size_t last = p.size() - 1;
        while (last > 0 && p[last] <= 0.0) {
            --last;
        }
        counts[last] += remaining;
    }
    return {std::move(counts), n_total};
}

ShotAllocation allocate_shots_sampled(const ProbVector& p, std::uint64_t n_total, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return allocate_shots_sampled(p, n_total, rng);
}

ProbVector empirical_prob(const ShotAllocation& alloc) {
    if (alloc.total < 1) {
        throw RangeError("allocation has no shots");
    }
    const std::uint64_t sum = std::accumulate(alloc.counts.begin(), alloc.counts.end(), std::uint64_t{0});
    if (sum != alloc.total) {
        throw ContractError("shot counts do not sum to the recorded total");
    }
    std::vector<double> p(alloc.counts.size());
    const auto total = static_cast<double>(alloc.total);
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = static_cast<double>(alloc.counts[j]) / total;
    }
    return ProbVector(std::move(p));
}

ProbVector log_relu_cascade(const ProbVector& p) {
    const std::size_t n = p.size();
    std::vector<std::size_t> survivors;
    survivors.reserve(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > 0.0) {
            survivors.push_back(i);
            mean += std::log(p[i]);
        }
    }
    mean /= static_cast<double>(survivors.size());

    // Centred logs that only differ from zero by rounding count as zero.
    const double eps = 1e-12 * std::max(1.0, std::abs(mean));
    std::vector<double> out(n, 0.0);
    double sum = 0.0;
    for (std::size_t i : survivors) {
        const double centred = std::log(p[i]) - mean;
        if (centred > eps) {
            out[i] = centred;
            sum += centred;
        }
    }
    if (sum == 0.0) {
        const double u = 1.0 / static_cast<double>(survivors.size());
        for (std::size_t i : survivors) {
            out[i] = u;
        }
        return ProbVector(std::move(out));
    }
    for (double& v : out) {
        v /= sum;
    }
    return ProbVector(std::move(out));
}

ProbVector input_prob_map(const Eigen::VectorXd& features, const Eigen::MatrixXd& weights,
                          const Eigen::VectorXd& bias) {
    if (weights.cols() != features.size() || weights.rows() != bias.size()) {
        throw ShapeError("input map weights are " + std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()) + " for " + std::to_string(features.size()) +
                         " features and " + std::to_string(bias.size()) + " outputs");
    }
    Eigen::VectorXd logits = weights * features + bias;
    logits.array() -= logits.maxCoeff();
    Eigen::VectorXd e = logits.array().exp();
    e /= e.sum();
    return ProbVector(std::vector<double>(e.data(), e.data() + e.size()));
}

} // namespace sbqe
