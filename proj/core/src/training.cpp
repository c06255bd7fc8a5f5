#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

namespace {

constexpr std::uint64_t kHoldoutStream = 0x686f6c64;  // "hold"
constexpr std::uint64_t kShuffleStream = 0x73687566;  // "shuf"

ModelParams zeros_like(const ModelParams& p) {
    ModelParams z;
    z.layers.resize(p.layers.size());
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        z.layers[i].weight = Eigen::MatrixXd::Zero(p.layers[i].weight.rows(), p.layers[i].weight.cols());
        z.layers[i].bias = Eigen::VectorXd::Zero(p.layers[i].bias.size());
    }
    return z;
}

double log_loss(std::span<const double> p, std::span<const std::uint8_t> labels) {
    constexpr double kFloor = 1e-15;
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total -= std::log(std::max(kFloor, labels[i] ? p[i] : 1.0 - p[i]));
    }
    return total / static_cast<double>(p.size());
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || batch_size < 1 || epochs < 1 || patience < 1) {
        throw Error("learning rate, batch size, epochs and patience must be positive");
    }
    if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
        throw Error("Adam betas must lie in (0, 1) and epsilon must be positive");
    }
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw Error("validation fraction must lie in (0, 1)");
    }
}

AdamOptimizer::AdamOptimizer(const ModelParams& shape, const TrainConfig& cfg)
    : m_(zeros_like(shape)),
      v_(zeros_like(shape)),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      epsilon_(cfg.epsilon),
      learning_rate_(cfg.learning_rate) {}

void AdamOptimizer::step(ModelParams& params, const ModelParams& gradient) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto update = [&](auto& value, const auto& grad, auto& m, auto& v) {
        m = beta1_ * m + (1.0 - beta1_) * grad;
        v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
        value.array() -= learning_rate_ * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
    };
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        update(params.layers[i].weight, gradient.layers[i].weight, m_.layers[i].weight, v_.layers[i].weight);
        update(params.layers[i].bias, gradient.layers[i].bias, m_.layers[i].bias, v_.layers[i].bias);
    }
}

TrainResult train(const TowerSpec& spec, const Dataset& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.size() < 2) throw Error("training needs at least two samples");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng holdout = make_rng(cfg.seed, kHoldoutStream);
    std::shuffle(order.begin(), order.end(), holdout);
    const auto held = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(cfg.validation_fraction * static_cast<double>(data.size()))), 1,
        data.size() - 1);
    std::vector<std::size_t> validation(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
    std::vector<std::uint8_t> validation_labels;
    for (std::size_t i : validation) validation_labels.push_back(data.labels[i]);

    TrainResult result;
    ModelParams params = init_params(spec, cfg.seed);
    ModelParams gradient;
    AdamOptimizer adam(params, cfg);
    Rng shuffle = make_rng(cfg.seed, kShuffleStream);
    double best_f1 = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(rows.begin(), rows.end(), shuffle);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < rows.size(); start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, rows.size() - start);
            std::span<const std::size_t> batch(rows.data() + start, count);
            const double loss = loss_and_gradient(params, spec, data, batch, gradient);
            if (!std::isfinite(loss)) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                                     std::to_string(start) + "; lower the learning rate or check input scaling");
            }
            loss_sum += loss * static_cast<double>(count);
            adam.step(params, gradient);
        }
        EpochRecord record;
        record.train_loss = loss_sum / static_cast<double>(rows.size());
        const auto p = predict(params, spec, data, validation);
        record.validation_f1 = compute_metrics(p, validation_labels).f1;
        record.validation_loss = log_loss(p, validation_labels);
        result.history.push_back(record);

        // F1 saturates on small validation slices; ties go to the lower loss.
        const bool better = record.validation_f1 > best_f1 ||
                            (record.validation_f1 == best_f1 && record.validation_loss < best_loss);
        if (better) {
            best_f1 = record.validation_f1;
            best_loss = record.validation_loss;
            result.params = params;
            result.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }
    return result;
}

TrainResult train_logistic(const Dataset& data, const TrainConfig& cfg) {
    return train(logistic_spec(data.input_dims()), data, cfg);
}

Metrics compute_metrics(std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
    if (probabilities.empty()) throw Error("cannot evaluate an empty dataset");
    if (probabilities.size() != labels.size()) throw Error("prediction and label counts differ");
    Metrics m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = probabilities[i] >= 0.5;
        const bool actual = labels[i] != 0;
        if (predicted && actual) ++m.tp;
        else if (predicted) ++m.fp;
        else if (actual) ++m.fn;
        else ++m.tn;
    }
    const auto tp = static_cast<double>(m.tp);
    m.precision = m.tp + m.fp ? tp / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn ? tp / static_cast<double>(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(labels.size());
    return m;
}

Metrics evaluate(const ModelParams& params, const TowerSpec& spec, const Dataset& data) {
    if (data.size() == 0) throw Error("cannot evaluate an empty dataset");
    return compute_metrics(predict(params, spec, data), data.labels);
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
    if (features.rows() == 0) throw Error("cannot fit a standardizer on zero rows");
    Standardizer s;
    s.mean = features.colwise().mean().transpose();
    s.scale.resize(features.cols());
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        const double var = (features.col(c).array() - s.mean(c)).square().mean();
        const double sd = std::sqrt(var);
        s.scale(c) = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

void Standardizer::apply(Eigen::MatrixXd& features) const {
    if (features.cols() != mean.size()) throw Error("standardizer width does not match the feature matrix");
    features.rowwise() -= mean.transpose();
    features.array().rowwise() /= scale.transpose().array();
}

}  // namespace linkpred
