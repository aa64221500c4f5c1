#include "sbqe/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sbqe/checkpoint.hpp"
#include "sbqe/error.hpp"

namespace sbqe {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T> T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key, "'" + value + "' is not a valid number");
    }
    return out;
}

template <typename T> T parse_positive(const std::string& key, const std::string& value) {
    const T v = parse_number<T>(key, value);
    if (!(v > T{0})) {
        throw ConfigError(key, "must be positive");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError(key, "'" + value + "' is not a boolean");
}

// Seeds as a comma list and/or inclusive ranges like 0-9.
std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(value)) {
        const auto dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const auto lo = parse_number<std::uint64_t>(key, item.substr(0, dash));
            const auto hi = parse_number<std::uint64_t>(key, item.substr(dash + 1));
            if (hi < lo || hi - lo > 100000) {
                throw ConfigError(key, "bad seed range '" + item + "'");
            }
            for (auto s = lo; s <= hi; ++s) {
                seeds.push_back(s);
            }
        } else {
            seeds.push_back(parse_number<std::uint64_t>(key, item));
        }
    }
    return seeds;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json eval_json(const EvalResult& r) { return {{"loss", r.loss}, {"accuracy", r.accuracy}}; }

EvalResult eval_from_json(const json& j) { return {j.at("loss").get<double>(), j.at("accuracy").get<double>()}; }

constexpr std::uint64_t kSampledEvalSalt = 0x5eed5a3b1e0fULL;

json ttest_json(const PairedTTest& t) {
    json j;
    j["n"] = t.n;
    j["mean_diff"] = t.mean_diff;
    j["std_diff"] = t.std_diff;
    // NaN and infinities become null in JSON; the flag carries the meaning.
    j["t"] = std::isfinite(t.t) ? json(t.t) : json(nullptr);
    j["df"] = t.df;
    j["p"] = t.p;
    j["flag"] = std::string(to_string(t.flag));
    return j;
}

} // namespace

std::string_view to_string(DatasetKind kind) noexcept {
    return kind == DatasetKind::semeion ? "semeion" : "fashion_mnist";
}

std::string_view to_string(ShotMode mode) noexcept { return mode == ShotMode::exact ? "exact" : "sampled"; }

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return "data";
}

void ExperimentConfig::validate() const {
    if (models.empty()) {
        throw ConfigError("model", "at least one model is required");
    }
    if (std::set<ModelKind>(models.begin(), models.end()).size() != models.size()) {
        throw ConfigError("model", "models must be distinct");
    }
    if (seeds.empty()) {
        throw ConfigError("seeds", "at least one seed is required");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds", "seeds must be distinct");
    }
    if (n_qubits < 1 || n_qubits > 12) {
        throw ConfigError("n_qubits", "must be in [1, 12]");
    }
    if (n_layers < 1) {
        throw ConfigError("n_layers", "must be positive");
    }
    if (pca_dim < 1 || pca_dim > (1 << n_qubits)) {
        throw ConfigError("pca_dim", "must be in [1, 2^n_qubits]");
    }
    if (batch_size == 0) {
        throw ConfigError("batch_size", "must be positive");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate", "must be positive");
    }
    if (n_shots == 0) {
        throw ConfigError("n_shots", "must be positive");
    }
    if (log_interval == 0) {
        throw ConfigError("log_interval", "must be positive");
    }
    for (ModelKind kind : models) {
        try {
            (void)make_model_spec(kind, n_qubits, n_layers, 10, pca_dim);
        } catch (const Error& e) {
            throw ConfigError("model", e.what());
        }
    }
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig t;
    t.epochs = epochs;
    t.batch_size = batch_size;
    t.learning_rate = learning_rate;
    t.log_interval = log_interval;
    return t;
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "dataset") {
        if (value == "semeion") {
            c.dataset = DatasetKind::semeion;
        } else if (value == "fashion_mnist" || value == "fashion") {
            c.dataset = DatasetKind::fashion_mnist;
        } else {
            throw ConfigError(key, "unsupported dataset '" + value + "'");
        }
    } else if (key == "model" || key == "models") {
        c.models.clear();
        if (value == "all") {
            c.models.assign(std::begin(kAllModelKinds), std::end(kAllModelKinds));
            return;
        }
        for (const auto& name : split_list(value)) {
            const auto kind = parse_model_kind(name);
            if (!kind) {
                throw ConfigError(key, "unknown model '" + name + "'");
            }
            c.models.push_back(*kind);
        }
        if (c.models.empty()) {
            throw ConfigError(key, "empty model list");
        }
    } else if (key == "n_qubits") {
        c.n_qubits = parse_positive<int>(key, value);
    } else if (key == "n_layers") {
        c.n_layers = parse_positive<int>(key, value);
    } else if (key == "pca_dim") {
        c.pca_dim = parse_positive<int>(key, value);
    } else if (key == "seeds" || key == "seed") {
        c.seeds = parse_seeds(key, value);
    } else if (key == "epochs") {
        c.epochs = parse_number<std::uint64_t>(key, value);
    } else if (key == "batch_size") {
        c.batch_size = parse_positive<std::size_t>(key, value);
    } else if (key == "learning_rate" || key == "lr") {
        c.learning_rate = parse_positive<double>(key, value);
    } else if (key == "shot_mode") {
        if (value == "exact") {
            c.shot_mode = ShotMode::exact;
        } else if (value == "sampled") {
            c.shot_mode = ShotMode::sampled;
        } else {
            throw ConfigError(key, "must be exact or sampled");
        }
    } else if (key == "n_shots" || key == "shots") {
        c.n_shots = parse_positive<std::uint64_t>(key, value);
    } else if (key == "split_seed") {
        c.split_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "subset") {
        c.subset = parse_number<std::size_t>(key, value);
    } else if (key == "log_interval") {
        c.log_interval = parse_positive<std::uint64_t>(key, value);
    } else if (key == "save_checkpoints") {
        c.save_checkpoints = parse_bool(key, value);
    } else if (key == "data_dir") {
        c.data_dir = value;
    } else if (key == "out_dir") {
        c.out_dir = value;
    } else {
        throw ConfigError(key, "unknown key");
    }
}

ExperimentConfig parse_config_text(std::string_view text, const ConfigOverrides& overrides) {
    ExperimentConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "expected key=value");
        }
        apply_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides) {
        apply_config_value(c, key, value);
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file, const ConfigOverrides& overrides) {
    std::string text;
    if (file) {
        std::ifstream in(*file);
        if (!in) {
            throw IoError("cannot open config " + file->string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_config_text(text, overrides);
}

Dataset load_dataset(const ExperimentConfig& config) {
    if (config.dataset == DatasetKind::semeion) {
        const auto path = config.data_dir / "semeion.data";
        if (!std::filesystem::exists(path)) {
            throw IoError("Semeion data not found at " + path.string());
        }
        return load_semeion(path);
    }
    const auto dir = config.data_dir / "fashion_mnist";
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("Fashion-MNIST directory not found at " + dir.string());
    }
    return load_fashion_mnist(dir);
}

PreparedData prepare_data(const Dataset& full, const ExperimentConfig& config) {
    const Dataset* data = &full;
    Dataset subset;
    if (config.subset > 0 && config.subset < full.size()) {
        subset = select_rows(full, stratified_subset(full.labels, config.subset, config.split_seed));
        data = &subset;
    }
    PreparedData out;
    out.indices = stratified_split(data->labels, kDefaultFractions, config.split_seed);
    out.fingerprint = split_fingerprint(out.indices);
    const Dataset train = select_rows(*data, out.indices.train);
    const Dataset val = select_rows(*data, out.indices.val);
    const Dataset test = select_rows(*data, out.indices.test);
    out.pca = fit_pca(train.features, config.pca_dim);
    out.splits.train = {transform_pca(out.pca, train.features), train.labels};
    out.splits.val = {transform_pca(out.pca, val.features), val.labels};
    out.splits.test = {transform_pca(out.pca, test.features), test.labels};
    return out;
}

std::string metrics_filename(ModelKind model, std::uint64_t seed) {
    return "metrics_" + std::string(to_string(model)) + "_" + std::to_string(seed) + ".csv";
}

std::string curves_filename(ModelKind model) { return "curves_" + std::string(to_string(model)) + ".csv"; }

std::vector<SeedRun> run_prepared(const ExperimentConfig& config, const PreparedData& data, const LogSink& log) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const int n_classes = [&] {
        int m = 0;
        for (const auto* part : {&data.splits.train, &data.splits.val, &data.splits.test}) {
            for (int y : part->labels) {
                m = std::max(m, y + 1);
            }
        }
        return m;
    }();
    const TrainConfig tc = config.train_config();
    std::vector<SeedRun> runs;
    for (ModelKind kind : config.models) {
        const ModelSpec spec = make_model_spec(kind, config.n_qubits, config.n_layers, n_classes, config.pca_dim);
        for (std::uint64_t seed : config.seeds) {
            const std::string tag = std::string(to_string(kind)) + "_" + std::to_string(seed);
            if (log) {
                std::ostringstream os;
                os << "run " << tag << ": " << spec.parameter_count() << " parameters, split "
                   << std::hex << data.fingerprint;
                log(os.str());
            }
            std::ofstream metrics_csv(config.out_dir / metrics_filename(kind, seed));
            std::ofstream timing_csv(config.out_dir / ("timing_" + tag + ".csv"));
            if (!metrics_csv || !timing_csv) {
                throw IoError("cannot write metrics into " + config.out_dir.string());
            }
            metrics_csv << "step,split,loss,accuracy\n";
            timing_csv << "step,seconds\n";
            const auto write_row = [&](const MetricRecord& r) {
                metrics_csv << r.step << ',' << r.split << ',' << fmt(r.loss) << ',' << fmt(r.accuracy) << '\n';
                metrics_csv.flush();
            };
            Model model = init_model(spec, seed);
            SeedRun run{kind, seed, data.fingerprint, {}};
            run.metrics = train_loop(tc, model, data.splits, seed, [&](const MetricRecord& r) {
                write_row(r);
                if (r.split == "train") {
                    timing_csv << r.step << ',' << fmt(r.seconds) << '\n';
                }
                if (log && r.split == "val") {
                    std::ostringstream os;
                    os << tag << " step " << r.step << " val_loss " << r.loss << " val_acc " << r.accuracy;
                    log(os.str());
                }
            });
            write_row({run.metrics.best_step, "test", run.metrics.test.loss, run.metrics.test.accuracy, 0.0});
            if (config.shot_mode == ShotMode::sampled) {
                const Eigen::MatrixXd logits =
                    forward_logits_sampled(model, data.splits.test.features, config.n_shots, seed ^ kSampledEvalSalt);
                run.metrics.test_sampled = evaluate_logits(logits, data.splits.test.labels);
                write_row({run.metrics.best_step, "test_sampled", run.metrics.test_sampled->loss,
                           run.metrics.test_sampled->accuracy, 0.0});
            }
            if (config.save_checkpoints) {
                save_model(config.out_dir / ("best_" + tag + ".ckpt"), model);
            }
            json j;
            j["model"] = std::string(to_string(kind));
            j["seed"] = seed;
            j["dataset"] = std::string(to_string(config.dataset));
            j["split_fingerprint"] = data.fingerprint;
            j["parameters"] = spec.parameter_count();
            j["epochs"] = config.epochs;
            j["learning_rate"] = config.learning_rate;
            j["shot_mode"] = std::string(to_string(config.shot_mode));
            j["best_step"] = run.metrics.best_step;
            j["init_val"] = eval_json(run.metrics.init_val);
            j["best_val"] = eval_json(run.metrics.best_val);
            j["test"] = eval_json(run.metrics.test);
            if (run.metrics.test_sampled) {
                j["test_sampled"] = eval_json(*run.metrics.test_sampled);
                j["n_shots"] = config.n_shots;
            }
            std::ofstream(config.out_dir / ("run_" + tag + ".json")) << j.dump(2) << '\n';
            if (log) {
                std::ostringstream os;
                os << tag << " done: best step " << run.metrics.best_step << ", test acc " << run.metrics.test.accuracy;
                log(os.str());
            }
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::vector<SeedRun> run_experiment(const ExperimentConfig& config, const LogSink& log) {
    config.validate();
    const Dataset data = load_dataset(config);
    const PreparedData prepared = prepare_data(data, config);
    if (log) {
        std::ostringstream os;
        os << to_string(config.dataset) << ": " << prepared.splits.train.size() << "/" << prepared.splits.val.size()
           << "/" << prepared.splits.test.size() << " train/val/test, PCA-" << config.pca_dim << " keeps "
           << prepared.pca.cumulative_ratio() << " of the variance";
        log(os.str());
    }
    return run_prepared(config, prepared, log);
}

std::vector<MetricRecord> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);
    if (trim(line) != "step,split,loss,accuracy") {
        throw FormatError(path.string() + ": unexpected header");
    }
    std::vector<MetricRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(trim(cell));
        }
        if (cells.size() != 4) {
            throw ParseError("expected 4 columns", line_no);
        }
        MetricRecord r;
        try {
            r.step = parse_number<std::uint64_t>("step", cells[0]);
            r.split = cells[1];
            r.loss = parse_number<double>("loss", cells[2]);
            r.accuracy = parse_number<double>("accuracy", cells[3]);
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), line_no);
        }
        out.push_back(std::move(r));
    }
    return out;
}

SummaryReport summarize(const std::vector<SeedRun>& runs) {
    SummaryReport report;
    for (ModelKind kind : kAllModelKinds) {
        ModelSummary s;
        s.model = kind;
        std::vector<std::pair<std::uint64_t, const SeedRun*>> mine;
        for (const auto& r : runs) {
            if (r.model == kind) {
                mine.emplace_back(r.seed, &r);
            }
        }
        if (mine.empty()) {
            continue;
        }
        std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < mine.size(); ++i) {
            if (mine[i].first == mine[i - 1].first) {
                throw PairingError("seed " + std::to_string(mine[i].first) + " appears twice for " +
                                   std::string(to_string(kind)));
            }
        }
        for (const auto& [seed, r] : mine) {
            s.seeds.push_back(seed);
            s.test_accuracy.push_back(r->metrics.test.accuracy);
            s.test_loss.push_back(r->metrics.test.loss);
        }
        s.accuracy_mean = mean(s.test_accuracy);
        s.accuracy_std = sample_std(s.test_accuracy);
        s.loss_mean = mean(s.test_loss);
        s.loss_std = sample_std(s.test_loss);
        report.models.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < report.models.size(); ++i) {
        for (std::size_t j = i + 1; j < report.models.size(); ++j) {
            const auto& a = report.models[i];
            const auto& b = report.models[j];
            if (a.seeds.size() < 2 && b.seeds.size() < 2) {
                continue;
            }
            if (a.seeds != b.seeds) {
                throw PairingError(std::string(to_string(a.model)) + " and " + std::string(to_string(b.model)) +
                                   " were run on different seed sets");
            }
            report.tests.push_back({a.model, b.model, paired_t_test(a.test_accuracy, b.test_accuracy),
                                    paired_t_test(a.test_loss, b.test_loss)});
        }
    }
    return report;
}

std::string summary_json(const SummaryReport& report) {
    json j;
    j["models"] = json::array();
    for (const auto& m : report.models) {
        j["models"].push_back({{"model", std::string(to_string(m.model))},
                               {"n", m.seeds.size()},
                               {"seeds", m.seeds},
                               {"test_accuracy", m.test_accuracy},
                               {"test_loss", m.test_loss},
                               {"accuracy_mean", m.accuracy_mean},
                               {"accuracy_std", m.accuracy_std},
                               {"loss_mean", m.loss_mean},
                               {"loss_std", m.loss_std}});
    }
    j["paired_t_tests"] = json::array();
    for (const auto& t : report.tests) {
        j["paired_t_tests"].push_back({{"a", std::string(to_string(t.a))},
                                       {"b", std::string(to_string(t.b))},
                                       {"accuracy", ttest_json(t.accuracy)},
                                       {"loss", ttest_json(t.loss)}});
    }
    return j.dump(2) + "\n";
}

void write_summary(const std::filesystem::path& path, const SummaryReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << summary_json(report);
}

std::vector<SeedRun> load_runs(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError(dir.string() + " is not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<SeedRun> runs;
    for (const auto& path : files) {
        std::ifstream in(path);
        json j;
        try {
            j = json::parse(in);
            SeedRun r;
            const auto kind = parse_model_kind(j.at("model").get<std::string>());
            if (!kind) {
                throw FormatError(path.string() + ": unknown model");
            }
            r.model = *kind;
            r.seed = j.at("seed").get<std::uint64_t>();
            r.split_fingerprint = j.at("split_fingerprint").get<std::uint64_t>();
            r.metrics.best_step = j.at("best_step").get<std::uint64_t>();
            r.metrics.init_val = eval_from_json(j.at("init_val"));
            r.metrics.best_val = eval_from_json(j.at("best_val"));
            r.metrics.test = eval_from_json(j.at("test"));
            if (j.contains("test_sampled")) {
                r.metrics.test_sampled = eval_from_json(j.at("test_sampled"));
            }
            const auto metrics_path = dir / metrics_filename(r.model, r.seed);
            if (std::filesystem::exists(metrics_path)) {
                for (auto& rec : read_metrics_csv(metrics_path)) {
                    if (rec.split == "train" || rec.split == "val") {
                        r.metrics.history.push_back(std::move(rec));
                    }
                }
            }
            runs.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
    if (runs.empty()) {
        throw IoError("no run_*.json files in " + dir.string());
    }
    return runs;
}

std::vector<CurveRow> aggregate_curves(const std::vector<std::vector<MetricRecord>>& histories) {
    if (histories.empty()) {
        throw AggregationError("no runs to aggregate");
    }
    const auto grid = [](const std::vector<MetricRecord>& h) {
        std::vector<std::uint64_t> steps;
        for (const auto& r : h) {
            if (r.split == "train") {
                steps.push_back(r.step);
            }
        }
        return steps;
    };
    const auto steps = grid(histories.front());
    for (const auto& h : histories) {
        if (grid(h) != steps) {
            throw AggregationError("runs were logged on different step grids");
        }
    }
    std::vector<CurveRow> rows;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        std::vector<double> tl, ta, vl, va;
        for (const auto& h : histories) {
            bool have_train = false;
            bool have_val = false;
            for (const auto& r : h) {
                if (r.step != steps[k]) {
                    continue;
                }
                if (r.split == "train" && !have_train) {
                    tl.push_back(r.loss);
                    ta.push_back(r.accuracy);
                    have_train = true;
                } else if (r.split == "val" && !have_val) {
                    vl.push_back(r.loss);
                    va.push_back(r.accuracy);
                    have_val = true;
                }
            }
            if (!have_val) {
                throw AggregationError("step " + std::to_string(steps[k]) + " has no val record");
            }
        }
        rows.push_back({steps[k], mean(tl), sample_std(tl), mean(ta), sample_std(ta), mean(vl), sample_std(vl),
                        mean(va), sample_std(va)});
    }
    return rows;
}

namespace {

std::filesystem::path write_curves(const std::filesystem::path& out_dir, ModelKind kind,
                                   const std::vector<std::vector<MetricRecord>>& histories) {
    const auto rows = aggregate_curves(histories);
    const auto path = out_dir / curves_filename(kind);
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "step,n_runs,train_loss_mean,train_loss_std,train_acc_mean,train_acc_std,"
           "val_loss_mean,val_loss_std,val_acc_mean,val_acc_std\n";
    for (const auto& r : rows) {
        out << r.step << ',' << histories.size() << ',' << fmt(r.train_loss_mean) << ',' << fmt(r.train_loss_std)
            << ',' << fmt(r.train_acc_mean) << ',' << fmt(r.train_acc_std) << ',' << fmt(r.val_loss_mean) << ','
            << fmt(r.val_loss_std) << ',' << fmt(r.val_acc_mean) << ',' << fmt(r.val_acc_std) << '\n';
    }
    return path;
}

} // namespace

std::vector<std::filesystem::path> emit_curves(const std::vector<SeedRun>& runs, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (ModelKind kind : kAllModelKinds) {
        std::vector<std::vector<MetricRecord>> histories;
        for (const auto& r : runs) {
            if (r.model == kind) {
                histories.push_back(r.metrics.history);
            }
        }
        if (!histories.empty()) {
            written.push_back(write_curves(out_dir, kind, histories));
        }
    }
    return written;
}

std::vector<std::filesystem::path> emit_curves_from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError(dir.string() + " is not a directory");
    }
    static const std::regex pattern(R"(metrics_([a-z_]+)_(\d+)\.csv)");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<ModelKind, std::vector<std::vector<MetricRecord>>> by_model;
    for (const auto& path : files) {
        std::smatch m;
        const auto name = path.filename().string();
        if (!std::regex_match(name, m, pattern)) {
            continue;
        }
        const auto kind = parse_model_kind(m[1].str());
        if (!kind) {
            continue;
        }
        auto records = read_metrics_csv(path);
        std::erase_if(records, [](const MetricRecord& r) { return r.split != "train" && r.split != "val"; });
        by_model[*kind].push_back(std::move(records));
    }
    if (by_model.empty()) {
        throw IoError("no metrics_*.csv files in " + dir.string());
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [kind, histories] : by_model) {
        written.push_back(write_curves(dir, kind, histories));
    }
    return written;
}

} // namespace sbqe
