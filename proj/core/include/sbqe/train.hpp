#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbqe/model.hpp"
#include "sbqe/params.hpp"

namespace sbqe {

// dLoss/dparam, laid out exactly like the model's ParamTable.
using GradientSet = ParamTable;

// Mean over the batch of -log softmax(logits)[label].
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels);
// d cross_entropy / d logits.
Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd& logits, std::span<const int> labels);

struct LossAndGradient {
    double loss = 0.0;
    GradientSet grad;
};

// Exact chain rule through the classical layers; circuit angles through the
// parameter-shift rule applied to the loss contracted onto the circuit output.
LossAndGradient grad_params(const Model& model, const Eigen::MatrixXd& features, std::span<const int> labels);

inline constexpr double kMaxGradNorm = 0.01;

double global_norm(const GradientSet& g);
// Rescales every array jointly when the global L2 norm exceeds max_norm.
GradientSet clip_global_norm(GradientSet g, double max_norm = kMaxGradNorm);

struct LionState {
    ParamTable momentum;
    std::uint64_t step = 0;
    double lr = 3e-4;
    double beta1 = 0.95;
    double beta2 = 0.98;
    double weight_decay = 0.01;

    static LionState for_params(const ParamTable& params, double lr);
};

// c = b1 m + (1 - b1) g;  p -= lr (sign(c) + wd p);  m = b2 m + (1 - b2) g.
void lion_step(LionState& state, ParamTable& params, const GradientSet& g);

struct TrainConfig {
    std::uint64_t epochs = 20000;
    std::size_t batch_size = 7000;
    double learning_rate = 3e-4;
    double weight_decay = 0.01;
    double max_grad_norm = kMaxGradNorm;
    std::uint64_t log_interval = 50;
};

struct LabelledSet {
    Eigen::MatrixXd features;
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

struct DataSplits {
    LabelledSet train;
    LabelledSet val;
    LabelledSet test;
};

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate(const Model& model, const LabelledSet& data);
EvalResult evaluate_logits(const Eigen::MatrixXd& logits, std::span<const int> labels);

struct MetricRecord {
    std::uint64_t step = 0;
    std::string split;
    double loss = 0.0;
    double accuracy = 0.0;
    double seconds = 0.0;
};

struct RunMetrics {
    std::vector<MetricRecord> history;
    EvalResult init_val;
    std::uint64_t best_step = 0;
    EvalResult best_val;
    EvalResult test;
    std::optional<EvalResult> test_sampled;
};

using RecordSink = std::function<void(const MetricRecord&)>;

// Full-epoch training with Lion and global-norm clipping. Validation is
// scored after every optimizer step and the best-accuracy parameters (ties:
// lower loss) are kept; on return `model` holds those parameters and
// `test` is evaluated with them. Train/val records are emitted every
// log_interval steps and after the final step. `seed` drives mini-batch
// shuffling when the train split exceeds batch_size.
RunMetrics train_loop(const TrainConfig& config, Model& model, const DataSplits& splits, std::uint64_t seed,
                      const RecordSink& sink = {});

} // namespace sbqe
