#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"
#include "synthetic.hpp"

using namespace linkpred;

namespace {

// Labels from the sign of a fixed linear score: separable by construction.
Dataset separable_dataset(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    auto d = testkit::random_dataset({{"H", dim}}, rows, seed);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = d.features.row(static_cast<Eigen::Index>(r));
        const double score = row(0) - 0.5 * row(1);
        d.labels[r] = score > 0 ? 1 : 0;
        d.features(static_cast<Eigen::Index>(r), 0) += score > 0 ? 1.5 : -1.5;  // margin
    }
    return d;
}

}  // namespace

TEST(Architecture, ParsesTableStyleExpressions) {
    const std::map<std::string, std::size_t> inputs{{"H", 56}, {"S", 64}, {"D", 64}};
    ArchitectureOptions opts;
    auto spec = parse_architecture("H || e(S, D)", inputs, opts);
    // concat(56 + 64) → 64 → 16 → 1
    ASSERT_EQ(spec.dense_count(), 3u);
    auto params = init_params(spec, 1);
    EXPECT_EQ(params.layers[0].weight.rows(), 64);
    EXPECT_EQ(params.layers[0].weight.cols(), 120);
    EXPECT_EQ(params.layers[1].weight.cols(), 64);
    EXPECT_EQ(params.layers[2].weight.rows(), 1);
    EXPECT_EQ(params.layers[2].weight.cols(), 16);

    auto deep = parse_architecture("e(f1(H), f2(e(f4(S), f4(D))))", inputs, opts);
    EXPECT_EQ(deep.dense_count(), 1u + 2u + 4u + 4u + 3u);
    auto three = parse_architecture("e(f4(H), f4(S), f4(D))", inputs, opts);
    EXPECT_EQ(three.dense_count(), 12u + 3u);
    EXPECT_NO_THROW(parse_architecture("f2(H) ‖ S", inputs, opts));
    EXPECT_NO_THROW(parse_architecture("(H | S)", inputs, opts));
}

TEST(Architecture, RejectsBadExpressions) {
    const std::map<std::string, std::size_t> inputs{{"H", 56}, {"S", 64}};
    EXPECT_THROW(parse_architecture("e(H, S)", inputs), Error);
    EXPECT_THROW(parse_architecture("X", inputs), Error);
    EXPECT_THROW(parse_architecture("f2(H", inputs), Error);
    EXPECT_THROW(parse_architecture("H S", inputs), Error);
    EXPECT_THROW(parse_architecture("", inputs), Error);
}

TEST(InitParams, SingleUnitShapeAndDeterminism) {
    auto spec = logistic_spec({{"H", 64}});
    auto a = init_params(spec, 3);
    ASSERT_EQ(a.layers.size(), 1u);
    EXPECT_EQ(a.layers[0].weight.rows(), 1);
    EXPECT_EQ(a.layers[0].weight.cols(), 64);
    EXPECT_EQ(a.layers[0].bias.size(), 1);
    EXPECT_EQ(a.parameter_count(), 65u);
    auto b = init_params(spec, 3);
    EXPECT_EQ(a.layers[0].weight, b.layers[0].weight);
    EXPECT_TRUE(a.layers[0].bias.isZero());
}

TEST(Forward, ZeroWeightsGiveOneHalf) {
    auto spec = parse_architecture("f2(H)", {{"H", 5}});
    auto params = init_params(spec, 1);
    for (auto& l : params.layers) l.weight.setZero();
    std::vector<double> x{1, 2, 3, 4, 5};
    EXPECT_EQ(forward(params, spec, {{"H", x}}), 0.5);
}

TEST(Forward, LogisticByHand) {
    auto spec = logistic_spec({{"H", 3}});
    auto params = init_params(spec, 1);
    params.layers[0].weight << 0.5, -1.0, 2.0;
    params.layers[0].bias << 0.25;
    std::vector<double> x{1.0, 2.0, 0.5};
    // 0.5 - 2 + 1 + 0.25 = -0.25
    EXPECT_NEAR(forward(params, spec, {{"H", x}}), 1.0 / (1.0 + std::exp(0.25)), 1e-15);
}

TEST(Forward, HadamardWithZeroOperand) {
    auto spec = parse_architecture("e(S, D)", {{"S", 4}, {"D", 4}});
    auto params = init_params(spec, 2);
    std::vector<double> s{1, -2, 3, 0.5};
    std::vector<double> zero(4, 0.0);
    // The head sees a zero vector: output depends only on biases, which start at zero.
    EXPECT_EQ(forward(params, spec, {{"S", s}, {"D", zero}}), 0.5);
}

TEST(Forward, MissingInputThrows) {
    auto spec = parse_architecture("e(S, D)", {{"S", 2}, {"D", 2}});
    auto params = init_params(spec, 2);
    std::vector<double> s{1, 2};
    EXPECT_THROW(forward(params, spec, {{"S", s}}), Error);
}

TEST(Gradient, MatchesCentralDifferencesForEveryNodeKind) {
    struct Case {
        const char* expr;
        Activation act;
    };
    const Case cases[] = {
        {"H", Activation::relu},
        {"f2(H)", Activation::elu},
        {"f1(H) | f2(S)", Activation::relu},
        {"e(f1(H), f2(e(f1(S), f1(D))))", Activation::elu},
        {"e(f2(H), f2(S), f2(D))", Activation::relu},
        {"H || e(S, D)", Activation::identity},
    };
    const auto data = testkit::random_dataset({{"H", 5}, {"S", 4}, {"D", 4}}, 12, 99);
    for (const auto& c : cases) {
        ArchitectureOptions opts;
        opts.tower_width = 6;
        opts.head_widths = {5, 3};
        opts.activation = c.act;
        auto spec = parse_architecture(c.expr, data.input_dims(), opts);
        EXPECT_LE(testkit::max_gradient_error(spec, data, 7), 1e-3) << c.expr;
    }
    EXPECT_LE(testkit::max_gradient_error(logistic_spec(data.input_dims()), data, 7), 1e-3);
}

TEST(Training, SeparableToySetReachesPerfectF1) {
    auto data = separable_dataset(20, 2, 4);
    auto spec = parse_architecture("f1(H)", data.input_dims(), {.tower_width = 8, .head_widths = {4}});
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.patience = 200;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.02;
    auto result = train(spec, data, cfg);
    EXPECT_EQ(evaluate(result.params, spec, data).f1, 1.0);
}

TEST(Training, LogisticSeparatesTwoDimToySet) {
    auto data = separable_dataset(40, 2, 8);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.patience = 300;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.05;
    auto result = train_logistic(data, cfg);
    EXPECT_EQ(evaluate(result.params, logistic_spec(data.input_dims()), data).accuracy, 1.0);
}

TEST(Training, SameSeedSameParams) {
    auto data = testkit::random_dataset({{"H", 6}}, 64, 3);
    auto spec = parse_architecture("f2(H)", data.input_dims(), {.tower_width = 8});
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 11;
    auto a = train(spec, data, cfg);
    auto b = train(spec, data, cfg);
    ASSERT_EQ(a.params.layers.size(), b.params.layers.size());
    for (std::size_t i = 0; i < a.params.layers.size(); ++i) {
        EXPECT_EQ(a.params.layers[i].weight, b.params.layers[i].weight);
        EXPECT_EQ(a.params.layers[i].bias, b.params.layers[i].bias);
    }
    EXPECT_EQ(a.best_epoch, b.best_epoch);
}

TEST(Training, LogisticEqualsTrainOnDegenerateSpec) {
    auto data = testkit::random_dataset({{"H", 4}, {"R", 3}}, 50, 5);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 2;
    auto a = train_logistic(data, cfg);
    auto b = train(logistic_spec(data.input_dims()), data, cfg);
    EXPECT_EQ(a.params.layers[0].weight, b.params.layers[0].weight);
    EXPECT_EQ(a.params.layers[0].bias, b.params.layers[0].bias);
}

TEST(Training, FullBatchLossDoesNotIncreaseAtSmallRate) {
    auto data = testkit::random_dataset({{"H", 5}, {"S", 3}, {"D", 3}}, 40, 6);
    auto spec = parse_architecture("H | e(f1(S), f1(D))", data.input_dims(), {.tower_width = 4, .head_widths = {4}});
    TrainConfig cfg;
    cfg.learning_rate = 1e-4;
    auto params = init_params(spec, 1);
    AdamOptimizer adam(params, cfg);
    ModelParams grad;
    double last = loss_and_gradient(params, spec, data, {}, grad);
    for (int step = 0; step < 5; ++step) {
        adam.step(params, grad);
        const double loss = loss_and_gradient(params, spec, data, {}, grad);
        EXPECT_LE(loss, last + 1e-12) << "step " << step;
        last = loss;
    }
}

TEST(Training, NonFiniteLossAborts) {
    auto data = testkit::random_dataset({{"H", 3}}, 20, 1);
    data.features.col(0).setConstant(std::numeric_limits<double>::infinity());
    EXPECT_THROW(train_logistic(data, {}), NumericalError);
}

TEST(Metrics, ClosedForms) {
    std::vector<std::uint8_t> labels{1, 1, 0, 0};
    std::vector<double> perfect{0.9, 0.6, 0.1, 0.4};
    auto m = compute_metrics(perfect, labels);
    EXPECT_EQ(m.f1, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);

    std::vector<double> always{0.7, 0.7, 0.7, 0.7};
    m = compute_metrics(always, labels);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
    EXPECT_EQ(m.tp + m.fp + m.tn + m.fn, labels.size());

    std::vector<double> boundary{0.5, 0.49, 0.5, 0.0};
    m = compute_metrics(boundary, labels);
    EXPECT_EQ(m.tp, 1u);
    EXPECT_EQ(m.fp, 1u);
    EXPECT_EQ(m.fn, 1u);
    EXPECT_EQ(m.tn, 1u);
    EXPECT_THROW(compute_metrics({}, {}), Error);
}

TEST(Metrics, EvaluateIsOrderIndependent) {
    auto data = testkit::random_dataset({{"H", 4}}, 30, 7);
    auto spec = parse_architecture("f1(H)", data.input_dims(), {.tower_width = 4});
    auto params = init_params(spec, 3);
    auto before = evaluate(params, spec, data);
    Dataset shuffled = data;
    std::vector<Eigen::Index> order(30);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
    for (std::size_t i = 0; i < 30; ++i) {
        shuffled.features.row(static_cast<Eigen::Index>(i)) = data.features.row(order[i]);
        shuffled.labels[i] = data.labels[static_cast<std::size_t>(order[i])];
    }
    auto after = evaluate(params, spec, shuffled);
    EXPECT_EQ(before.tp, after.tp);
    EXPECT_EQ(before.fp, after.fp);
    EXPECT_EQ(before.f1, after.f1);
    Dataset empty;
    empty.slots = data.slots;
    empty.features.resize(0, 4);
    EXPECT_THROW(evaluate(params, spec, empty), Error);
}

TEST(Standardizer, FitsZeroMeanUnitVariance) {
    Eigen::MatrixXd x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    auto s = Standardizer::fit(x);
    s.apply(x);
    EXPECT_NEAR(x.col(0).mean(), 0.0, 1e-15);
    EXPECT_NEAR(x.col(0).squaredNorm() / 4.0, 1.0, 1e-12);
    EXPECT_TRUE(x.col(1).isZero());
}

TEST(ModelIo, RoundTripPreservesPredictions) {
    auto data = testkit::random_dataset({{"H", 5}, {"R", 4}}, 16, 2);
    LinkClassifier model;
    model.architecture = "f1(H) | f2(R)";
    model.options.tower_width = 6;
    model.options.activation = Activation::elu;
    model.input_dims = data.input_dims();
    model.scaler = Standardizer::fit(data.features);
    model.rebuild_spec();
    model.params = init_params(model.spec, 4);

    std::stringstream buffer;
    save_classifier(buffer, model, {"linkpred stage=train seed=1 config_hash=abc"});
    auto back = load_classifier(buffer);
    EXPECT_EQ(back.architecture, model.architecture);
    EXPECT_EQ(back.options.activation, Activation::elu);
    EXPECT_EQ(back.input_dims, model.input_dims);
    EXPECT_EQ(predict(back.params, back.spec, data), predict(model.params, model.spec, data));
    EXPECT_EQ(back.scaler.scale, model.scaler.scale);
}

TEST(ModelIo, RejectsShapeMismatch) {
    LinkClassifier model;
    model.architecture = "f1(H)";
    model.input_dims = {{"H", 3}};
    model.scaler.mean = Eigen::VectorXd::Zero(3);
    model.scaler.scale = Eigen::VectorXd::Ones(3);
    model.rebuild_spec();
    model.params = init_params(model.spec, 1);
    std::stringstream buffer;
    save_classifier(buffer, model);
    std::string text = buffer.str();
    text.replace(text.find("input H 3"), 9, "input H 4");
    std::istringstream in(text);
    EXPECT_THROW(load_classifier(in), ParseError);
}
