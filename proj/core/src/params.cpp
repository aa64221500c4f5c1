#include "sbqe/params.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

} // namespace

NamedArray& ParamTable::add(std::string name, std::vector<std::size_t> shape) {
    const std::size_t n = product(shape);
    return add(NamedArray{std::move(name), std::move(shape), std::vector<double>(n, 0.0)});
}

NamedArray& ParamTable::add(NamedArray array) {
    if (contains(array.name)) {
        throw ShapeError("duplicate array name '" + array.name + "'");
    }
    if (product(array.shape) != array.values.size()) {
        throw ShapeError("array '" + array.name + "' has " + std::to_string(array.values.size()) +
                         " values for its shape");
    }
    arrays_.push_back(std::move(array));
    return arrays_.back();
}

bool ParamTable::contains(const std::string& name) const {
    return std::any_of(arrays_.begin(), arrays_.end(), [&](const NamedArray& a) { return a.name == name; });
}

NamedArray& ParamTable::at(const std::string& name) {
    for (auto& a : arrays_) {
        if (a.name == name) {
            return a;
        }
    }
    throw ShapeError("no array named '" + name + "'");
}

const NamedArray& ParamTable::at(const std::string& name) const {
    return const_cast<ParamTable*>(this)->at(name);
}

std::size_t ParamTable::total_size() const noexcept {
    std::size_t n = 0;
    for (const auto& a : arrays_) {
        n += a.values.size();
    }
    return n;
}

ParamTable ParamTable::zeros_like() const {
    ParamTable out;
    for (const auto& a : arrays_) {
        out.add(a.name, a.shape);
    }
    return out;
}

bool ParamTable::same_layout(const ParamTable& other) const {
    if (arrays_.size() != other.arrays_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < arrays_.size(); ++i) {
        if (arrays_[i].name != other.arrays_[i].name || arrays_[i].shape != other.arrays_[i].shape) {
            return false;
        }
    }
    return true;
}

Eigen::Map<RowMatrix> ParamTable::matrix(const std::string& name) {
    NamedArray& a = at(name);
    if (a.shape.size() != 2) {
        throw ShapeError("array '" + name + "' is not 2-D");
    }
    return {a.values.data(), static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1])};
}

Eigen::Map<const RowMatrix> ParamTable::matrix(const std::string& name) const {
    const NamedArray& a = at(name);
    if (a.shape.size() != 2) {
        throw ShapeError("array '" + name + "' is not 2-D");
    }
    return {a.values.data(), static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1])};
}

Eigen::Map<Eigen::VectorXd> ParamTable::vector(const std::string& name) {
    NamedArray& a = at(name);
    return {a.values.data(), static_cast<Eigen::Index>(a.values.size())};
}

Eigen::Map<const Eigen::VectorXd> ParamTable::vector(const std::string& name) const {
    const NamedArray& a = at(name);
    return {a.values.data(), static_cast<Eigen::Index>(a.values.size())};
}

bool operator==(const NamedArray& a, const NamedArray& b) {
    return a.name == b.name && a.shape == b.shape && a.values == b.values;
}

bool operator==(const ParamTable& a, const ParamTable& b) {
    return a.arrays_ == b.arrays_;
}

} // namespace sbqe
