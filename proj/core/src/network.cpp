#include <cmath>
#include <functional>
#include <random>

#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"
#include "linkpred/random.hpp"

namespace linkpred {

namespace {

using Matrix = Eigen::MatrixXd;
using Kind = TowerSpec::Kind;

Matrix activate(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::relu: return z.cwiseMax(0.0);
        case Activation::elu: return z.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
        case Activation::identity: return z;
    }
    return z;
}

// dL/dz given dL/da, the pre-activation z and the activation a.
Matrix activation_backward(const Matrix& grad, const Matrix& z, const Matrix& a, Activation act) {
    switch (act) {
        case Activation::relu: return grad.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
        case Activation::elu:
            return grad.cwiseProduct(
                z.binaryExpr(a, [](double zi, double ai) { return zi > 0.0 ? 1.0 : ai + 1.0; }));
        case Activation::identity: return grad;
    }
    return grad;
}

// Per-node values for a batch; each matrix is dim × batch.
struct ForwardCache {
    std::vector<Matrix> pre;  // dense nodes only
    std::vector<Matrix> out;
};

void check_spec(const TowerSpec& spec, const ModelParams& params) {
    if (!spec.finished()) throw Error("tower spec has no output head");
    if (params.layers.size() != spec.dense_count()) throw Error("parameters do not match the tower spec");
}

ForwardCache run_forward(const ModelParams& params, const TowerSpec& spec,
                         const std::function<Matrix(const TowerSpec::Node&)>& input_block) {
    check_spec(spec, params);
    const auto& nodes = spec.nodes();
    ForwardCache cache;
    cache.pre.resize(nodes.size());
    cache.out.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        switch (n.kind) {
            case Kind::input:
                cache.out[i] = input_block(n);
                break;
            case Kind::dense: {
                const DenseLayer& layer = params.layers[n.layer];
                const Matrix& x = cache.out[n.operands[0]];
                if (layer.weight.cols() != x.rows() || layer.weight.rows() != static_cast<Eigen::Index>(n.dim)) {
                    throw Error("layer " + std::to_string(n.layer) + " has the wrong shape for its inputs");
                }
                cache.pre[i] = (layer.weight * x).colwise() + layer.bias;
                cache.out[i] = activate(cache.pre[i], n.activation);
                break;
            }
            case Kind::hadamard: {
                cache.out[i] = cache.out[n.operands[0]];
                for (std::size_t k = 1; k < n.operands.size(); ++k) {
                    cache.out[i] = cache.out[i].cwiseProduct(cache.out[n.operands[k]]);
                }
                break;
            }
            case Kind::concat: {
                const Eigen::Index cols = cache.out[n.operands[0]].cols();
                cache.out[i].resize(static_cast<Eigen::Index>(n.dim), cols);
                Eigen::Index row = 0;
                for (std::size_t op : n.operands) {
                    const Matrix& part = cache.out[op];
                    cache.out[i].middleRows(row, part.rows()) = part;
                    row += part.rows();
                }
                break;
            }
        }
    }
    return cache;
}

Matrix sigmoid(const Matrix& z) {
    return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

std::function<Matrix(const TowerSpec::Node&)> dataset_block(const Dataset& data, std::span<const std::size_t> rows) {
    return [&data, rows](const TowerSpec::Node& n) {
        const InputSlot& s = data.slot(n.name);
        if (s.dim != n.dim) {
            throw Error("input '" + n.name + "' has width " + std::to_string(s.dim) + ", spec expects " +
                        std::to_string(n.dim));
        }
        const auto offset = static_cast<Eigen::Index>(s.offset);
        const auto dim = static_cast<Eigen::Index>(s.dim);
        if (rows.empty()) return Matrix(data.features.middleCols(offset, dim).transpose());
        Matrix block(dim, static_cast<Eigen::Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            block.col(static_cast<Eigen::Index>(j)) =
                data.features.row(static_cast<Eigen::Index>(rows[j])).segment(offset, dim).transpose();
        }
        return block;
    };
}

}  // namespace

std::size_t ModelParams::parameter_count() const {
    std::size_t total = 0;
    for (const auto& l : layers) total += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return total;
}

ModelParams init_params(const TowerSpec& spec, std::uint64_t seed) {
    if (!spec.finished()) throw Error("tower spec has no output head");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss;
    ModelParams params;
    params.layers.resize(spec.dense_count());
    for (const auto& n : spec.nodes()) {
        if (n.kind != Kind::dense) continue;
        const std::size_t fan_in = spec.node(n.operands[0]).dim;
        const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
        DenseLayer& layer = params.layers[n.layer];
        layer.weight.resize(static_cast<Eigen::Index>(n.dim), static_cast<Eigen::Index>(fan_in));
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
            for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = stddev * gauss(rng);
        }
        layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n.dim));
    }
    return params;
}

std::map<std::string, std::size_t> Dataset::input_dims() const {
    std::map<std::string, std::size_t> out;
    for (const auto& s : slots) out[s.name] = s.dim;
    return out;
}

const InputSlot& Dataset::slot(std::string_view name) const {
    for (const auto& s : slots) {
        if (s.name == name) return s;
    }
    throw Error("dataset has no input named '" + std::string(name) + "'");
}

std::vector<double> predict(const ModelParams& params, const TowerSpec& spec, const Dataset& data,
                            std::span<const std::size_t> rows) {
    auto cache = run_forward(params, spec, dataset_block(data, rows));
    Matrix p = sigmoid(cache.out[spec.output()]);
    return {p.data(), p.data() + p.size()};
}

double forward(const ModelParams& params, const TowerSpec& spec,
               const std::map<std::string, std::span<const double>>& inputs) {
    auto cache = run_forward(params, spec, [&](const TowerSpec::Node& n) {
        auto it = inputs.find(n.name);
        if (it == inputs.end()) throw Error("missing input '" + n.name + "'");
        if (it->second.size() != n.dim) throw Error("input '" + n.name + "' has the wrong width");
        return Matrix(Eigen::Map<const Eigen::VectorXd>(it->second.data(), static_cast<Eigen::Index>(n.dim)));
    });
    return sigmoid(cache.out[spec.output()])(0, 0);
}

double loss_and_gradient(const ModelParams& params, const TowerSpec& spec, const Dataset& data,
                         std::span<const std::size_t> rows, ModelParams& gradient) {
    auto cache = run_forward(params, spec, dataset_block(data, rows));
    const auto& nodes = spec.nodes();
    const Matrix& logits = cache.out[spec.output()];
    const Eigen::Index batch = logits.cols();
    if (batch == 0) throw Error("empty batch");

    Eigen::RowVectorXd labels(batch);
    for (Eigen::Index j = 0; j < batch; ++j) {
        const std::size_t row = rows.empty() ? static_cast<std::size_t>(j) : rows[static_cast<std::size_t>(j)];
        labels(j) = data.labels[row];
    }
    // BCE on logits: softplus(z) - y·z, stable for any z.
    double loss = 0.0;
    for (Eigen::Index j = 0; j < batch; ++j) {
        const double z = logits(0, j);
        loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - labels(j) * z;
    }
    loss /= static_cast<double>(batch);

    std::vector<Matrix> grads(nodes.size());
    grads[spec.output()] = (sigmoid(logits) - labels) / static_cast<double>(batch);

    gradient.layers.resize(params.layers.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        gradient.layers[l].weight = Matrix::Zero(params.layers[l].weight.rows(), params.layers[l].weight.cols());
        gradient.layers[l].bias = Eigen::VectorXd::Zero(params.layers[l].bias.size());
    }
    for (std::size_t idx = nodes.size(); idx-- > 0;) {
        const auto& n = nodes[idx];
        Matrix& g = grads[idx];
        if (g.size() == 0) continue;  // node does not reach the output
        auto accumulate = [&](std::size_t op, Matrix contribution) {
            if (grads[op].size() == 0) {
                grads[op] = std::move(contribution);
            } else {
                grads[op] += contribution;
            }
        };
        switch (n.kind) {
            case Kind::input: break;
            case Kind::dense: {
                Matrix dz = activation_backward(g, cache.pre[idx], cache.out[idx], n.activation);
                const DenseLayer& layer = params.layers[n.layer];
                DenseLayer& out = gradient.layers[n.layer];
                out.weight = dz * cache.out[n.operands[0]].transpose();
                out.bias = dz.rowwise().sum();
                if (nodes[n.operands[0]].kind != Kind::input) accumulate(n.operands[0], layer.weight.transpose() * dz);
                break;
            }
            case Kind::hadamard: {
                for (std::size_t k = 0; k < n.operands.size(); ++k) {
                    Matrix partial = g;
                    for (std::size_t m = 0; m < n.operands.size(); ++m) {
                        if (m != k) partial = partial.cwiseProduct(cache.out[n.operands[m]]);
                    }
                    accumulate(n.operands[k], std::move(partial));
                }
                break;
            }
            case Kind::concat: {
                Eigen::Index row = 0;
                for (std::size_t op : n.operands) {
                    const Eigen::Index dim = cache.out[op].rows();
                    accumulate(op, g.middleRows(row, dim));
                    row += dim;
                }
                break;
            }
        }
    }
    return loss;
}

}  // namespace linkpred
