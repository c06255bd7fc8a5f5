#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "linkpred/pipeline.hpp"
#include "synthetic.hpp"

using namespace linkpred;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("linkpred_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
        auto g = testkit::social_graph(400, 8, 5);
        std::ofstream out(root_ / "edges.txt");
        out << "# synthetic social graph\n";
        for (const auto& e : g.arcs()) out << e.src + 1000 << '\t' << e.dst + 1000 << '\n';
    }
    void TearDown() override { fs::remove_all(root_); }

    PipelineContext context(const std::string& dir) const {
        PipelineContext ctx;
        ctx.config.dataset_path = root_ / "edges.txt";
        ctx.config.seed = 3;
        ctx.config.heuristics.katz_alpha = 0.01;
        ctx.config.walk.walks_per_node = 4;
        ctx.config.walk.walk_length = 20;
        ctx.config.skipgram.epochs = 1;
        ctx.config.train.epochs = 15;
        ctx.out_dir = root_ / dir;
        return ctx;
    }

    fs::path root_;
};

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    std::istringstream in(
        "# comment\n"
        "dataset.path = data/x.txt\n"
        "dataset.directed=false\n"
        "seed=9\n"
        "walk.length=40\n"
        "features.mode=combined\n"
        "model.head=32,8\n"
        "model.classifier=logistic\n");
    auto c = PipelineConfig::parse(in);
    EXPECT_EQ(c.dataset_path, "data/x.txt");
    EXPECT_FALSE(c.directed);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.walk.walk_length, 40u);
    EXPECT_EQ(c.feature_mode, FeatureMode::combined);
    EXPECT_EQ(c.arch_options.head_widths, (std::vector<std::size_t>{32, 8}));
    EXPECT_TRUE(c.logistic);
    EXPECT_EQ(c.effective_architecture(), "H | R");
}

TEST(Config, ErrorsCarryLineNumbers) {
    std::istringstream unknown("seed=1\nwalk.lenght=3\n");
    try {
        PipelineConfig::parse(unknown);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream bad("seed=abc\n");
    EXPECT_THROW(PipelineConfig::parse(bad), ParseError);
    std::istringstream missing("seed\n");
    EXPECT_THROW(PipelineConfig::parse(missing), ParseError);
}

TEST(Config, HashesFollowStageDependencies) {
    PipelineConfig a;
    PipelineConfig b = a;
    b.walk.p = 2.0;
    EXPECT_EQ(a.hash(Stage::split), b.hash(Stage::split));
    EXPECT_NE(a.hash(Stage::embed), b.hash(Stage::embed));
    // Heuristic-only features ignore walk settings.
    EXPECT_EQ(a.hash(Stage::features), b.hash(Stage::features));
    a.feature_mode = b.feature_mode = FeatureMode::combined;
    EXPECT_NE(a.hash(Stage::features), b.hash(Stage::features));

    PipelineConfig c;
    PipelineConfig d = c;
    d.train.epochs = 3;
    EXPECT_EQ(c.hash(Stage::features), d.hash(Stage::features));
    EXPECT_NE(c.hash(Stage::model), d.hash(Stage::model));
    EXPECT_EQ(c.hash(Stage::model).size(), 16u);
}

TEST(Config, EntriesRoundTripThroughSet) {
    PipelineConfig a;
    a.seed = 77;
    a.heuristics.katz_alpha = 0.005;
    a.feature_mode = FeatureMode::embedding;
    a.arch_options.head_widths = {8};
    PipelineConfig b;
    for (const auto& [k, v] : a.entries()) b.set(k, v);
    EXPECT_EQ(a.entries(), b.entries());
    EXPECT_EQ(a.hash(Stage::model), b.hash(Stage::model));
}

TEST_F(PipelineTest, RunIsByteReproducible) {
    auto first = cmd_run(context("a"));
    auto second = cmd_run(context("b"));
    EXPECT_EQ(slurp(root_ / "a" / artifact::metrics), slurp(root_ / "b" / artifact::metrics));
    EXPECT_EQ(slurp(root_ / "a" / artifact::features_test), slurp(root_ / "b" / artifact::features_test));
    EXPECT_EQ(first.metrics.f1, second.metrics.f1);
    EXPECT_TRUE(fs::exists(root_ / "a" / artifact::runtime));
}

TEST_F(PipelineTest, RunReusesMatchingArtifacts) {
    auto ctx = context("a");
    cmd_run(ctx);
    const auto metrics = slurp(ctx.out_dir / artifact::metrics);
    auto again = cmd_run(ctx);
    EXPECT_TRUE(again.reused.at("features"));
    EXPECT_TRUE(again.reused.at("train"));
    EXPECT_EQ(slurp(ctx.out_dir / artifact::metrics), metrics);

    ctx.config.train.epochs = 5;
    auto changed = cmd_run(ctx);
    EXPECT_TRUE(changed.reused.at("features"));
    EXPECT_FALSE(changed.reused.at("train"));
}

TEST_F(PipelineTest, StagesRefuseForeignArtifacts) {
    auto ctx = context("a");
    cmd_ingest(ctx);
    cmd_split(ctx);
    auto other = ctx;
    other.config.seed = 4;
    try {
        cmd_features(other);
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "features");
        EXPECT_NE(std::string(e.what()).find("config hash"), std::string::npos);
    }
    EXPECT_THROW(cmd_train(ctx), StageError);
}

TEST_F(PipelineTest, MissingDatasetNamesIngestStage) {
    auto ctx = context("a");
    ctx.config.dataset_path = root_ / "absent.txt";
    try {
        cmd_run(ctx);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "ingest");
    }
}

TEST_F(PipelineTest, GraphArtifactRoundTrips) {
    auto ctx = context("a");
    auto stats = cmd_ingest(ctx);
    auto g = load_dataset(ctx.config);
    auto back = read_graph(ctx.out_dir / artifact::graph);
    EXPECT_EQ(back.node_count(), stats.nodes);
    EXPECT_EQ(back.arcs(), g.arcs());
    EXPECT_EQ(std::vector<RawId>(back.raw_ids().begin(), back.raw_ids().end()),
              std::vector<RawId>(g.raw_ids().begin(), g.raw_ids().end()));
}

TEST_F(PipelineTest, SplitArtifactRoundTrips) {
    auto ctx = context("a");
    cmd_ingest(ctx);
    auto ds = cmd_split(ctx);
    auto g = read_graph(ctx.out_dir / artifact::graph);
    auto back = load_split(ctx, g);
    EXPECT_EQ(back.train, ds.train);
    EXPECT_EQ(back.test, ds.test);
    EXPECT_EQ(back.train_graph.arcs(), ds.train_graph.arcs());
    EXPECT_EQ(back.cross_component_negatives, ds.cross_component_negatives);
}

TEST_F(PipelineTest, CombinedModeLogsWidth120) {
    auto ctx = context("c");
    ctx.config.feature_mode = FeatureMode::combined;
    std::ostringstream log;
    ctx.log = &log;
    cmd_run(ctx);
    EXPECT_NE(log.str().find("feature width: 120"), std::string::npos);
    auto data = read_features(ctx.out_dir / artifact::features_train);
    EXPECT_EQ(data.features.cols(), 120);
    EXPECT_EQ(data.input_dims(), (std::map<std::string, std::size_t>{{"H", 56}, {"R", 64}}));
}

TEST_F(PipelineTest, NodeVectorInputsFeedTowerSpecs) {
    auto ctx = context("n");
    ctx.config.feature_mode = FeatureMode::heuristic;
    ctx.config.node_vectors = true;
    ctx.config.skipgram.dim = 8;
    ctx.config.architecture = "H || e(S, D)";
    auto report = cmd_run(ctx);
    auto data = read_features(ctx.out_dir / artifact::features_test);
    EXPECT_EQ(data.input_dims(), (std::map<std::string, std::size_t>{{"H", 56}, {"S", 8}, {"D", 8}}));
    EXPECT_GE(report.metrics.f1, 0.0);
}

TEST_F(PipelineTest, UndirectedCsvWithHeader) {
    {
        std::ofstream out(root_ / "edges.csv");
        out << "from,to\n";
        auto g = testkit::random_graph(80, 0.08, 2, false);
        for (const auto& e : g.edges()) out << e.src << ',' << e.dst << '\n';
    }
    auto ctx = context("u");
    ctx.config.dataset_path = root_ / "edges.csv";
    ctx.config.directed = false;
    auto stats = cmd_ingest(ctx);
    auto g = read_graph(ctx.out_dir / artifact::graph);
    EXPECT_FALSE(g.directed());
    EXPECT_EQ(g.edge_count(), stats.edges);
    for (const auto& a : g.arcs()) EXPECT_TRUE(g.has_edge(a.dst, a.src));
}

// Stand-in for the social datasets: a community-structured directed graph
// with reciprocity and triadic closure, where heuristic features carry signal.
TEST_F(PipelineTest, SurrogateSocialGraphIsPredictable) {
    auto ctx = context("s");
    ctx.config.train.epochs = 30;
    auto report = cmd_run(ctx);
    EXPECT_GE(report.metrics.f1, 0.8);
}
