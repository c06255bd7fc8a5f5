#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace linkpred {

enum class Activation { relu, elu, identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Multi-input feed-forward network as a DAG of input, dense, Hadamard and
/// concatenation nodes. Nodes are stored in topological order; the last node
/// is a single linear unit whose sigmoid is the predicted edge probability.
class TowerSpec {
public:
    enum class Kind { input, dense, hadamard, concat };

    struct Node {
        Kind kind = Kind::input;
        std::size_t dim = 0;
        std::vector<std::size_t> operands;
        Activation activation = Activation::identity;  // dense only
        std::string name;                              // input only
        std::size_t layer = 0;                         // dense only: index into ModelParams
    };

    /// Returns the existing node when the input was already declared.
    std::size_t add_input(const std::string& name, std::size_t dim);
    std::size_t add_dense(std::size_t operand, std::size_t width, Activation activation);
    /// Throws Error unless all operands share one dimension.
    std::size_t add_hadamard(std::vector<std::size_t> operands);
    std::size_t add_concat(std::vector<std::size_t> operands);
    /// Appends hidden head layers and the final 1-unit output on top of `body`.
    void finish(std::size_t body, const std::vector<std::size_t>& head_widths, Activation activation);

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t output() const noexcept { return nodes_.size() - 1; }
    std::size_t dense_count() const noexcept { return dense_count_; }
    bool finished() const noexcept { return finished_; }

    /// Input names with their dimensions, in declaration order.
    std::vector<std::pair<std::string, std::size_t>> inputs() const;

    /// Free-form description persisted with a model (the source expression).
    std::string description;

private:
    std::size_t push(Node node);

    std::vector<Node> nodes_;
    std::size_t dense_count_ = 0;
    bool finished_ = false;
};

struct ArchitectureOptions {
    std::size_t tower_width = 64;
    std::vector<std::size_t> head_widths{64, 16};
    Activation activation = Activation::relu;
};

/// Builds a TowerSpec from the tower notation
///
///     expr  := term ('|' term)*            horizontal concatenation ('||' and '‖' also accepted)
///     term  := NAME                        a named input
///            | 'f' N '(' expr ')'          N dense layers of tower_width
///            | 'e' '(' expr (',' expr)* ')'  Hadamard product
///            | '(' expr ')'
///
/// e.g. "e(f1(H), f2(e(f4(S), f4(D))))". `inputs` gives each name's width.
TowerSpec parse_architecture(std::string_view expression, const std::map<std::string, std::size_t>& inputs,
                             const ArchitectureOptions& options = {});

/// The degenerate spec: all inputs concatenated into a single linear unit.
TowerSpec logistic_spec(const std::map<std::string, std::size_t>& inputs);

struct DenseLayer {
    Eigen::MatrixXd weight;  // out × in
    Eigen::VectorXd bias;
};

struct ModelParams {
    std::vector<DenseLayer> layers;

    std::size_t parameter_count() const;
};

/// He-normal weights (std √(2/fan_in)), zero biases.
ModelParams init_params(const TowerSpec& spec, std::uint64_t seed);

/// Named column block of a dataset.
struct InputSlot {
    std::string name;
    std::size_t offset = 0;
    std::size_t dim = 0;
};

/// Samples as rows; slots map input names onto column ranges.
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<std::uint8_t> labels;
    std::vector<InputSlot> slots;

    std::size_t size() const noexcept { return labels.size(); }
    std::map<std::string, std::size_t> input_dims() const;
    const InputSlot& slot(std::string_view name) const;
};

/// Probabilities for the selected rows (all rows when `rows` is empty).
std::vector<double> predict(const ModelParams& params, const TowerSpec& spec, const Dataset& data,
                            std::span<const std::size_t> rows = {});

/// Probability for a single sample given as named vectors.
double forward(const ModelParams& params, const TowerSpec& spec,
               const std::map<std::string, std::span<const double>>& inputs);

/// Mean binary cross-entropy over `rows` and its gradient with respect to every parameter.
double loss_and_gradient(const ModelParams& params, const TowerSpec& spec, const Dataset& data,
                         std::span<const std::size_t> rows, ModelParams& gradient);

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 256;
    std::size_t epochs = 30;
    std::size_t patience = 5;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

class AdamOptimizer {
public:
    AdamOptimizer(const ModelParams& shape, const TrainConfig& cfg);
    void step(ModelParams& params, const ModelParams& gradient);

private:
    ModelParams m_;
    ModelParams v_;
    double beta1_;
    double beta2_;
    double epsilon_;
    double learning_rate_;
    std::size_t t_ = 0;
};

struct EpochRecord {
    double train_loss = 0.0;
    double validation_f1 = 0.0;
    double validation_loss = 0.0;
};

struct TrainResult {
    ModelParams params;  // weights of the best validation epoch
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
};

/// Mini-batch Adam on binary cross-entropy. A seeded validation_fraction of
/// the rows is held out; training stops after `patience` epochs without a
/// validation-F1 improvement (equal F1 with lower validation loss counts).
/// Throws NumericalError on a non-finite loss.
TrainResult train(const TowerSpec& spec, const Dataset& data, const TrainConfig& cfg);

/// train() on logistic_spec(data.input_dims()).
TrainResult train_logistic(const Dataset& data, const TrainConfig& cfg);

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

/// Thresholds at 0.5 (p >= 0.5 is positive). Throws Error on empty input.
Metrics compute_metrics(std::span<const double> probabilities, std::span<const std::uint8_t> labels);
Metrics evaluate(const ModelParams& params, const TowerSpec& spec, const Dataset& data);

/// Per-column zero-mean / unit-variance transform fitted on training rows.
/// Constant columns are only centred.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& features);
    void apply(Eigen::MatrixXd& features) const;
};

/// A trained classifier with everything needed to score new feature rows.
struct LinkClassifier {
    std::string architecture;
    ArchitectureOptions options;
    bool logistic = false;
    std::map<std::string, std::size_t> input_dims;
    TowerSpec spec;
    ModelParams params;
    Standardizer scaler;

    /// Rebuilds `spec` from architecture/options/input_dims.
    void rebuild_spec();
};

/// Text artifact: `#` provenance lines, a spec block, the scaler, then every
/// layer as its dimensions followed by row-major weights and the bias row.
void save_classifier(std::ostream& out, const LinkClassifier& model, const std::vector<std::string>& provenance = {});
void save_classifier(const std::filesystem::path& path, const LinkClassifier& model,
                     const std::vector<std::string>& provenance = {});
LinkClassifier load_classifier(std::istream& in);
LinkClassifier load_classifier(const std::filesystem::path& path);

/// Flat key=value report: precision, recall, f1, accuracy, tp, fp, tn, fn.
void write_metrics(std::ostream& out, const Metrics& m);

}  // namespace linkpred
