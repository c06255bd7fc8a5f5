#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"

namespace linkpred {

namespace {

constexpr int kFormatVersion = 1;

template <class Vector>
void write_row(std::ostream& out, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v(i);
    out << '\n';
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-comment line as a stream.
    std::istringstream next(const char* what) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line[0] != '#') return std::istringstream(line);
        }
        throw ParseError(line_no_, std::string("unexpected end of model file, expected ") + what);
    }

    std::istringstream keyed(const std::string& key) {
        auto s = next(key.c_str());
        std::string word;
        s >> word;
        if (word != key) throw ParseError(line_no_, "expected '" + key + "', found '" + word + "'");
        return s;
    }

    template <class T>
    T value(const std::string& key) {
        auto s = keyed(key);
        T v{};
        if (!(s >> v)) throw ParseError(line_no_, "missing value for '" + key + "'");
        return v;
    }

    template <class Vector>
    void row(Vector&& v, const char* what) {
        auto s = next(what);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (!(s >> v(i))) throw ParseError(line_no_, std::string("too few values in ") + what);
        }
        double extra = 0;
        if (s >> extra) throw ParseError(line_no_, std::string("too many values in ") + what);
    }

    std::size_t line() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

void LinkClassifier::rebuild_spec() {
    spec = logistic ? logistic_spec(input_dims) : parse_architecture(architecture, input_dims, options);
}

void save_classifier(std::ostream& out, const LinkClassifier& model, const std::vector<std::string>& provenance) {
    for (const auto& line : provenance) out << "# " << line << '\n';
    out.precision(17);
    out << "linkpred-model " << kFormatVersion << '\n';
    out << "architecture " << model.architecture << '\n';
    out << "logistic " << (model.logistic ? 1 : 0) << '\n';
    out << "activation " << to_string(model.options.activation) << '\n';
    out << "tower_width " << model.options.tower_width << '\n';
    out << "head";
    for (std::size_t w : model.options.head_widths) out << ' ' << w;
    out << '\n';
    out << "inputs " << model.input_dims.size() << '\n';
    for (const auto& [name, dim] : model.input_dims) out << "input " << name << ' ' << dim << '\n';
    out << "scaler " << model.scaler.mean.size() << '\n';
    write_row(out, model.scaler.mean);
    write_row(out, model.scaler.scale);
    out << "layers " << model.params.layers.size() << '\n';
    for (std::size_t i = 0; i < model.params.layers.size(); ++i) {
        const auto& layer = model.params.layers[i];
        out << "layer " << i << ' ' << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) write_row(out, layer.weight.row(r));
        write_row(out, layer.bias);
    }
}

void save_classifier(const std::filesystem::path& path, const LinkClassifier& model,
                     const std::vector<std::string>& provenance) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model to '" + path.string() + "'");
    save_classifier(out, model, provenance);
}

LinkClassifier load_classifier(std::istream& in) {
    LineReader reader(in);
    LinkClassifier model;
    if (reader.value<int>("linkpred-model") != kFormatVersion) throw ParseError(reader.line(), "unsupported model version");
    {
        auto s = reader.keyed("architecture");
        std::getline(s >> std::ws, model.architecture);
    }
    model.logistic = reader.value<int>("logistic") != 0;
    model.options.activation = parse_activation(reader.value<std::string>("activation"));
    model.options.tower_width = reader.value<std::size_t>("tower_width");
    {
        auto s = reader.keyed("head");
        model.options.head_widths.clear();
        std::size_t w = 0;
        while (s >> w) model.options.head_widths.push_back(w);
    }
    const auto inputs = reader.value<std::size_t>("inputs");
    for (std::size_t i = 0; i < inputs; ++i) {
        auto s = reader.keyed("input");
        std::string name;
        std::size_t dim = 0;
        if (!(s >> name >> dim)) throw ParseError(reader.line(), "expected `input NAME DIM`");
        model.input_dims[name] = dim;
    }
    const auto width = reader.value<Eigen::Index>("scaler");
    model.scaler.mean.resize(width);
    model.scaler.scale.resize(width);
    reader.row(model.scaler.mean, "scaler mean");
    reader.row(model.scaler.scale, "scaler scale");

    model.rebuild_spec();
    const auto layers = reader.value<std::size_t>("layers");
    if (layers != model.spec.dense_count()) throw ParseError(reader.line(), "layer count does not match architecture");
    model.params.layers.resize(layers);
    for (std::size_t i = 0; i < layers; ++i) {
        auto s = reader.keyed("layer");
        std::size_t index = 0;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        if (!(s >> index >> rows >> cols) || index != i) throw ParseError(reader.line(), "bad layer header");
        auto& layer = model.params.layers[i];
        layer.weight.resize(rows, cols);
        layer.bias.resize(rows);
        for (Eigen::Index r = 0; r < rows; ++r) reader.row(layer.weight.row(r), "weight row");
        reader.row(layer.bias, "bias");
    }
    for (const auto& n : model.spec.nodes()) {
        if (n.kind != TowerSpec::Kind::dense) continue;
        const auto& w = model.params.layers[n.layer].weight;
        if (static_cast<std::size_t>(w.rows()) != n.dim ||
            static_cast<std::size_t>(w.cols()) != model.spec.node(n.operands[0]).dim) {
            throw ParseError(reader.line(), "layer " + std::to_string(n.layer) + " shape does not match architecture");
        }
    }
    return model;
}

LinkClassifier load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model '" + path.string() + "'");
    return load_classifier(in);
}

void write_metrics(std::ostream& out, const Metrics& m) {
    std::ostringstream s;
    s.precision(10);
    s << "precision=" << m.precision << '\n'
      << "recall=" << m.recall << '\n'
      << "f1=" << m.f1 << '\n'
      << "accuracy=" << m.accuracy << '\n'
      << "tp=" << m.tp << '\n'
      << "fp=" << m.fp << '\n'
      << "tn=" << m.tn << '\n'
      << "fn=" << m.fn << '\n';
    out << s.str();
}

}  // namespace linkpred
