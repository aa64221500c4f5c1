#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbqe {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NamedArray {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// Ordered collection of named real arrays: model parameters, their
// gradients, and optimizer moments all share this layout.
class ParamTable {
  public:
    ParamTable() = default;

    // Appends a zero-filled array; throws ShapeError on a duplicate name.
    NamedArray& add(std::string name, std::vector<std::size_t> shape);
    NamedArray& add(NamedArray array);

    [[nodiscard]] bool contains(const std::string& name) const;
    [[nodiscard]] NamedArray& at(const std::string& name);
    [[nodiscard]] const NamedArray& at(const std::string& name) const;

    [[nodiscard]] std::vector<NamedArray>& arrays() noexcept { return arrays_; }
    [[nodiscard]] const std::vector<NamedArray>& arrays() const noexcept { return arrays_; }
    [[nodiscard]] std::size_t total_size() const noexcept;

    // A table with identical names and shapes, filled with zeros.
    [[nodiscard]] ParamTable zeros_like() const;
    [[nodiscard]] bool same_layout(const ParamTable& other) const;

    // Views of a 2-D array as a row-major matrix, or a 1-D array as a vector.
    [[nodiscard]] Eigen::Map<RowMatrix> matrix(const std::string& name);
    [[nodiscard]] Eigen::Map<const RowMatrix> matrix(const std::string& name) const;
    [[nodiscard]] Eigen::Map<Eigen::VectorXd> vector(const std::string& name);
    [[nodiscard]] Eigen::Map<const Eigen::VectorXd> vector(const std::string& name) const;

    friend bool operator==(const ParamTable& a, const ParamTable& b);

  private:
    std::vector<NamedArray> arrays_;
};

bool operator==(const NamedArray& a, const NamedArray& b);

} // namespace sbqe
