#include "sbqe/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/SVD>
#include <zlib.h>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

bool parse_double(std::string_view token, double& out) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size() && std::isfinite(out);
}

// gzread reads plain files transparently, so .gz and raw IDX share one path.
class GzFile {
  public:
    explicit GzFile(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
        if (file_ == nullptr) {
            throw IoError("cannot open " + path.string());
        }
    }
    ~GzFile() { gzclose(file_); }
    GzFile(const GzFile&) = delete;
    GzFile& operator=(const GzFile&) = delete;

    void read(void* dst, std::size_t n, const std::filesystem::path& path) {
        auto* out = static_cast<unsigned char*>(dst);
        while (n > 0) {
            const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
            const int got = gzread(file_, out, chunk);
            if (got <= 0) {
                throw FormatError(path.string() + ": truncated file");
            }
            out += got;
            n -= static_cast<std::size_t>(got);
        }
    }

    std::uint32_t read_be32(const std::filesystem::path& path) {
        unsigned char b[4];
        read(b, 4, path);
        return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
    }

  private:
    gzFile file_;
};

std::filesystem::path find_idx(const std::filesystem::path& dir, const std::string& stem) {
    for (const auto* suffix : {"", ".gz"}) {
        const auto candidate = dir / (stem + suffix);
        if (std::filesystem::exists(candidate)) {
            return candidate;
        }
    }
    throw IoError("missing " + (dir / stem).string() + "[.gz]");
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
    std::size_t count = 0;
    std::size_t pixels = 0;
    std::vector<unsigned char> bytes;
};

IdxImages read_idx_images(const std::filesystem::path& path) {
    GzFile f(path);
    const std::uint32_t magic = f.read_be32(path);
    if (magic != kIdxImagesMagic) {
        std::ostringstream os;
        os << path.string() << ": bad image magic 0x" << std::hex << magic;
        throw FormatError(os.str());
    }
    IdxImages img;
    img.count = f.read_be32(path);
    const std::size_t rows = f.read_be32(path);
    const std::size_t cols = f.read_be32(path);
    img.pixels = rows * cols;
    img.bytes.resize(img.count * img.pixels);
    f.read(img.bytes.data(), img.bytes.size(), path);
    return img;
}

std::vector<int> read_idx_labels(const std::filesystem::path& path, int n_classes) {
    GzFile f(path);
    const std::uint32_t magic = f.read_be32(path);
    if (magic != kIdxLabelsMagic) {
        std::ostringstream os;
        os << path.string() << ": bad label magic 0x" << std::hex << magic;
        throw FormatError(os.str());
    }
    const std::size_t count = f.read_be32(path);
    std::vector<unsigned char> raw(count);
    f.read(raw.data(), count, path);
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (raw[i] >= n_classes) {
            throw FormatError(path.string() + ": label " + std::to_string(raw[i]) + " at index " +
                              std::to_string(i) + " is not a class index");
        }
        labels[i] = raw[i];
    }
    return labels;
}

// Largest-remainder rounding of total * weights; ties go to the lower index.
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
    std::vector<std::size_t> counts(weights.size());
    std::vector<double> remainder(weights.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double exact = static_cast<double>(total) * weights[k];
        counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainder[k] = exact - static_cast<double>(counts[k]);
        assigned += counts[k];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size(), ++assigned) {
        ++counts[order[k]];
    }
    return counts;
}

std::vector<std::vector<std::size_t>> indices_by_class(std::span<const int> labels) {
    int max_label = -1;
    for (int y : labels) {
        if (y < 0) {
            throw RangeError("negative label");
        }
        max_label = std::max(max_label, y);
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label + 1));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    return by_class;
}

} // namespace

void Dataset::validate() const {
    if (labels.empty()) {
        throw ShapeError("dataset is empty");
    }
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw ShapeError("dataset has " + std::to_string(features.rows()) + " feature rows and " +
                         std::to_string(labels.size()) + " labels");
    }
    for (int y : labels) {
        if (y < 0 || y >= n_classes) {
            throw RangeError("label " + std::to_string(y) + " outside [0, " + std::to_string(n_classes) + ")");
        }
    }
}

Dataset load_semeion(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<double> pixels;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_whitespace(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != kSemeionPixels + kSemeionClasses) {
            throw ParseError("expected 266 tokens, found " + std::to_string(tokens.size()), line_no);
        }
        for (int k = 0; k < kSemeionPixels; ++k) {
            double v = 0.0;
            if (!parse_double(tokens[static_cast<std::size_t>(k)], v)) {
                throw ParseError("bad pixel value '" + std::string(tokens[static_cast<std::size_t>(k)]) + "'",
                                 line_no);
            }
            pixels.push_back(v);
        }
        int label = -1;
        for (int c = 0; c < kSemeionClasses; ++c) {
            double flag = 0.0;
            const auto token = tokens[static_cast<std::size_t>(kSemeionPixels + c)];
            if (!parse_double(token, flag) || (flag != 0.0 && flag != 1.0)) {
                throw ParseError("label flag '" + std::string(token) + "' is not 0 or 1", line_no);
            }
            if (flag == 1.0) {
                if (label >= 0) {
                    throw ParseError("more than one label flag set", line_no);
                }
                label = c;
            }
        }
        if (label < 0) {
            throw ParseError("no label flag set", line_no);
        }
        labels.push_back(label);
    }
    Dataset data;
    data.n_classes = kSemeionClasses;
    data.labels = std::move(labels);
    data.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        pixels.data(), static_cast<Eigen::Index>(data.labels.size()), kSemeionPixels);
    data.validate();
    return data;
}

Dataset load_fashion_mnist(const std::filesystem::path& dir) {
    constexpr int kClasses = 10;
    Dataset data;
    data.n_classes = kClasses;
    std::vector<IdxImages> parts;
    for (const std::string prefix : {"train", "t10k"}) {
        const auto image_path = find_idx(dir, prefix + "-images-idx3-ubyte");
        const auto label_path = find_idx(dir, prefix + "-labels-idx1-ubyte");
        IdxImages images = read_idx_images(image_path);
        const std::vector<int> labels = read_idx_labels(label_path, kClasses);
        if (labels.size() != images.count) {
            throw FormatError(image_path.string() + " holds " + std::to_string(images.count) + " images but " +
                              label_path.string() + " holds " + std::to_string(labels.size()) + " labels");
        }
        if (!parts.empty() && parts.front().pixels != images.pixels) {
            throw FormatError("train and t10k images differ in size");
        }
        data.labels.insert(data.labels.end(), labels.begin(), labels.end());
        parts.push_back(std::move(images));
    }
    const std::size_t pixels = parts.front().pixels;
    data.features.resize(static_cast<Eigen::Index>(data.labels.size()), static_cast<Eigen::Index>(pixels));
    Eigen::Index row = 0;
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < part.count; ++i, ++row) {
            for (std::size_t k = 0; k < pixels; ++k) {
                data.features(row, static_cast<Eigen::Index>(k)) = part.bytes[i * pixels + k] / 255.0;
            }
        }
    }
    data.validate();
    return data;
}

PcaModel fit_pca(const Eigen::MatrixXd& train_features, int d) {
    if (d < 1 || train_features.rows() <= d || train_features.cols() < d) {
        throw DegenerateInputError("PCA to " + std::to_string(d) + " components needs more than " +
                                   std::to_string(d) + " samples and at least " + std::to_string(d) + " features");
    }
    PcaModel model;
    model.mean = train_features.colwise().mean().transpose();
    const Eigen::MatrixXd centred = train_features.rowwise() - model.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (!(s(0) > 0.0) || s(d - 1) <= 1e-10 * s(0)) {
        throw DegenerateInputError("centred data has rank below " + std::to_string(d));
    }
    const double total = s.squaredNorm();
    model.explained_variance_ratio = s.head(d).array().square() / total;
    model.components = svd.matrixV().leftCols(d).transpose();
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index arg = 0;
        model.components.row(k).cwiseAbs().maxCoeff(&arg);
        if (model.components(k, arg) < 0.0) {
            model.components.row(k) *= -1.0;
        }
    }
    return model;
}

Eigen::MatrixXd transform_pca(const PcaModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.mean.size()) {
        throw ShapeError("PCA was fitted on " + std::to_string(model.mean.size()) + " features, got " +
                         std::to_string(features.cols()));
    }
    return (features.rowwise() - model.mean.transpose()) * model.components.transpose();
}

SplitIndices stratified_split(std::span<const int> labels, std::array<double, 3> fractions, std::uint64_t seed) {
    const double fsum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(fsum - 1.0) > 1e-9 || *std::min_element(fractions.begin(), fractions.end()) < 0.0) {
        throw ContractError("split fractions must be non-negative and sum to 1");
    }
    std::mt19937_64 rng(seed);
    SplitIndices split;
    std::vector<std::size_t>* parts[3] = {&split.train, &split.val, &split.test};
    const auto by_class = indices_by_class(labels);

    // Each class takes the floor of its share; leftovers go to the split with the
    // largest remaining global quota, then the largest per-class remainder.
    const auto quota = apportion(labels.size(), fractions);
    std::vector<std::array<std::size_t, 3>> counts(by_class.size());
    std::vector<std::array<double, 3>> remainder(by_class.size());
    std::array<std::size_t, 3> deficit{quota[0], quota[1], quota[2]};
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const std::size_t n = by_class[c].size();
        if (n == 0) {
            continue;
        }
        if (n < 3) {
            throw StratificationError("class " + std::to_string(c) + " has " + std::to_string(n) +
                                      " samples; stratification needs at least 3");
        }
        for (std::size_t k = 0; k < 3; ++k) {
            const double exact = static_cast<double>(n) * fractions[k];
            counts[c][k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            remainder[c][k] = exact - static_cast<double>(counts[c][k]);
            deficit[k] -= counts[c][k];
        }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::size_t left = by_class[c].size() - counts[c][0] - counts[c][1] - counts[c][2];
        std::array<bool, 3> used{};
        while (left > 0) {
            int pick = -1;
            for (int k = 0; k < 3; ++k) {
                if (used[k] && !std::all_of(used.begin(), used.end(), [](bool u) { return u; })) {
                    continue;
                }
                if (pick < 0) {
                    pick = k;
                    continue;
                }
                const auto better = [&](int a, int b) {
                    const bool da = deficit[a] > 0;
                    const bool db = deficit[b] > 0;
                    if (da != db) {
                        return da;
                    }
                    if (remainder[c][a] != remainder[c][b]) {
                        return remainder[c][a] > remainder[c][b];
                    }
                    return deficit[a] > deficit[b];
                };
                if (better(k, pick)) {
                    pick = k;
                }
            }
            ++counts[c][pick];
            used[pick] = true;
            if (deficit[pick] > 0) {
                --deficit[pick];
            }
            --left;
        }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto members = by_class[c];
        if (members.empty()) {
            continue;
        }
        std::shuffle(members.begin(), members.end(), rng);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            parts[k]->insert(parts[k]->end(), members.begin() + static_cast<std::ptrdiff_t>(offset),
                             members.begin() + static_cast<std::ptrdiff_t>(offset + counts[c][k]));
            offset += counts[c][k];
        }
    }
    for (auto* part : parts) {
        std::sort(part->begin(), part->end());
    }
    return split;
}

std::vector<std::size_t> stratified_subset(std::span<const int> labels, std::size_t count, std::uint64_t seed) {
    if (count > labels.size()) {
        throw RangeError("subset of " + std::to_string(count) + " from " + std::to_string(labels.size()) + " samples");
    }
    const auto by_class = indices_by_class(labels);
    std::vector<double> weights;
    for (const auto& members : by_class) {
        weights.push_back(static_cast<double>(members.size()) / static_cast<double>(labels.size()));
    }
    const auto quota = apportion(count, weights);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dataset select_rows(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.n_classes = data.n_classes;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= data.size()) {
            throw RangeError("row index " + std::to_string(rows[i]) + " out of range");
        }
        out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(data.labels[rows[i]]);
    }
    return out;
}

std::uint64_t split_fingerprint(const SplitIndices& split) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (const auto* part : {&split.train, &split.val, &split.test}) {
        mix(part->size());
        for (std::size_t i : *part) {
            mix(i);
        }
    }
    return h;
}

void write_feature_csv(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                       std::span<const int> labels) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw ShapeError("feature rows and labels differ in count");
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        out << "pc" << j << ',';
    }
    out << "label\n";
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            out << features(i, j) << ',';
        }
        out << labels[static_cast<std::size_t>(i)] << '\n';
    }
}

Dataset read_feature_csv(const std::filesystem::path& path, int n_classes) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line); // header
    std::vector<double> values;
    Dataset data;
    data.n_classes = n_classes;
    std::size_t width = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> cells;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
            cells.push_back(rest.substr(0, pos));
        }
        cells.push_back(rest);
        if (width == 0) {
            width = cells.size() - 1;
        } else if (cells.size() - 1 != width) {
            throw ParseError("inconsistent column count", line_no);
        }
        for (std::size_t k = 0; k < width; ++k) {
            double v = 0.0;
            if (!parse_double(cells[k], v)) {
                throw ParseError("bad feature value", line_no);
            }
            values.push_back(v);
        }
        int label = 0;
        const auto last = cells.back();
        if (std::from_chars(last.data(), last.data() + last.size(), label).ec != std::errc{}) {
            throw ParseError("bad label", line_no);
        }
        data.labels.push_back(label);
    }
    data.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(data.labels.size()), static_cast<Eigen::Index>(width));
    data.validate();
    return data;
}

} // namespace sbqe
