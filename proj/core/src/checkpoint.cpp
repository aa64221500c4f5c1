#include "sbqe/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

constexpr const char* kMagic = "sbqe-checkpoint 1";

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int meta_int(const Checkpoint& c, const std::string& key) {
    const auto it = c.meta.find(key);
    if (it == c.meta.end()) {
        throw FormatError("checkpoint metadata lacks '" + key + "'");
    }
    int v = 0;
    const auto& s = it->second;
    if (std::from_chars(s.data(), s.data() + s.size(), v).ec != std::errc{}) {
        throw FormatError("checkpoint metadata '" + key + "' is not an integer");
    }
    return v;
}

} // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << kMagic << '\n';
    for (const auto& [key, value] : ckpt.meta) {
        if (key.empty() || key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos) {
            throw FormatError("checkpoint metadata must be single-token keys and single-line values");
        }
        out << "meta " << key << ' ' << value << '\n';
    }
    out << "arrays " << ckpt.params.arrays().size() << '\n';
    for (const auto& a : ckpt.params.arrays()) {
        out << a.name << ' ' << a.shape.size();
        for (auto dim : a.shape) {
            out << ' ' << dim;
        }
        out << '\n';
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            out << (i ? " " : "") << format_double(a.values[i]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw FormatError(path.string() + ": not an sbqe checkpoint");
    }
    Checkpoint ckpt;
    std::size_t n_arrays = 0;
    while (std::getline(in, line)) {
        if (line.rfind("meta ", 0) == 0) {
            const auto rest = line.substr(5);
            const auto sp = rest.find(' ');
            ckpt.meta[rest.substr(0, sp)] = sp == std::string::npos ? "" : rest.substr(sp + 1);
            continue;
        }
        std::istringstream hdr(line);
        std::string tag;
        if (!(hdr >> tag >> n_arrays) || tag != "arrays") {
            throw FormatError(path.string() + ": expected array count");
        }
        break;
    }
    for (std::size_t k = 0; k < n_arrays; ++k) {
        NamedArray a;
        std::size_t ndims = 0;
        if (!std::getline(in, line)) {
            throw FormatError(path.string() + ": truncated");
        }
        std::istringstream hdr(line);
        if (!(hdr >> a.name >> ndims)) {
            throw FormatError(path.string() + ": bad array header '" + line + "'");
        }
        std::size_t size = 1;
        a.shape.resize(ndims);
        for (auto& dim : a.shape) {
            if (!(hdr >> dim)) {
                throw FormatError(path.string() + ": bad array header '" + line + "'");
            }
            size *= dim;
        }
        if (!std::getline(in, line)) {
            throw FormatError(path.string() + ": truncated");
        }
        a.values.resize(size);
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (auto& v : a.values) {
            while (p < end && *p == ' ') {
                ++p;
            }
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) {
                throw FormatError(path.string() + ": bad value in array '" + a.name + "'");
            }
            p = next;
        }
        ckpt.params.add(std::move(a));
    }
    return ckpt;
}

void save_model(const std::filesystem::path& path, const Model& model) {
    Checkpoint c;
    c.meta["model"] = std::string(to_string(model.spec.kind));
    c.meta["n_qubits"] = std::to_string(model.spec.n_qubits);
    c.meta["n_layers"] = std::to_string(model.spec.n_layers);
    c.meta["n_classes"] = std::to_string(model.spec.n_classes);
    c.meta["input_dim"] = std::to_string(model.spec.input_dim);
    c.params = model.params;
    save_checkpoint(path, c);
}

Model load_model(const std::filesystem::path& path) {
    Checkpoint c = load_checkpoint(path);
    const auto kind = parse_model_kind(c.meta.count("model") ? c.meta.at("model") : "");
    if (!kind) {
        throw FormatError(path.string() + ": unknown model kind");
    }
    Model m;
    m.spec = make_model_spec(*kind, meta_int(c, "n_qubits"), meta_int(c, "n_layers"), meta_int(c, "n_classes"),
                             meta_int(c, "input_dim"));
    m.params = std::move(c.params);
    const Model reference = init_model(m.spec, 0);
    if (!reference.params.same_layout(m.params)) {
        throw FormatError(path.string() + ": arrays do not match the model layout");
    }
    return m;
}

} // namespace sbqe
