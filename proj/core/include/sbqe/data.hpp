#pragma once

// Dataset ingestion, PCA, and stratified splitting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sbqe {

struct Dataset {
    Eigen::MatrixXd features; // n_samples x n_features
    std::vector<int> labels;
    int n_classes = 0;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    // Throws ShapeError/RangeError when labels and features disagree.
    void validate() const;
};

// Whitespace text, one sample per line: 256 pixel values then 10 one-hot flags.
Dataset load_semeion(const std::filesystem::path& path);

// Reads {train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz] from `dir` and
// concatenates train then t10k. Pixels are scaled to [0, 1].
Dataset load_fashion_mnist(const std::filesystem::path& dir);

inline constexpr int kSemeionPixels = 256;
inline constexpr int kSemeionClasses = 10;

struct PcaModel {
    Eigen::VectorXd mean;                     // n_features
    Eigen::MatrixXd components;               // d x n_features, orthonormal rows
    Eigen::VectorXd explained_variance_ratio; // d, non-increasing

    [[nodiscard]] double cumulative_ratio() const { return explained_variance_ratio.sum(); }
};

// Exact thin SVD of the centred data. Each component is flipped so its
// largest-magnitude entry is positive.
PcaModel fit_pca(const Eigen::MatrixXd& train_features, int d = 8);
Eigen::MatrixXd transform_pca(const PcaModel& model, const Eigen::MatrixXd& features);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;

    friend bool operator==(const SplitIndices&, const SplitIndices&) = default;
};

inline constexpr std::array<double, 3> kDefaultFractions{0.70, 0.15, 0.15};

// Per-class shuffle, then largest-remainder rounding of the class size times
// each fraction (ties to the earlier split). Indices within a split are sorted.
SplitIndices stratified_split(std::span<const int> labels, std::array<double, 3> fractions, std::uint64_t seed);

// Class-proportional sample of `count` indices, sorted.
std::vector<std::size_t> stratified_subset(std::span<const int> labels, std::size_t count, std::uint64_t seed);

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows);

// FNV-1a over the three index lists; logged to show runs shared one split.
std::uint64_t split_fingerprint(const SplitIndices& split);

// Optional cache: CSV rows of PCA features followed by the label.
void write_feature_csv(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                       std::span<const int> labels);
Dataset read_feature_csv(const std::filesystem::path& path, int n_classes);

} // namespace sbqe
