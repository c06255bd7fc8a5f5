#include <cctype>

#include "linkpred/errors.hpp"
#include "linkpred/model.hpp"

namespace linkpred {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::elu: return "elu";
        case Activation::identity: return "identity";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "relu" || name == "ReLU") return Activation::relu;
    if (name == "elu" || name == "ELU") return Activation::elu;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw Error("unknown activation '" + std::string(name) + "'");
}

std::size_t TowerSpec::push(Node node) {
    if (finished_) throw Error("tower spec is already finished");
    for (std::size_t op : node.operands) {
        if (op >= nodes_.size()) throw Error("tower spec operand refers to an undefined node");
    }
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

std::size_t TowerSpec::add_input(const std::string& name, std::size_t dim) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == Kind::input && nodes_[i].name == name) {
            if (nodes_[i].dim != dim) throw Error("input '" + name + "' declared with two widths");
            return i;
        }
    }
    if (dim == 0) throw Error("input '" + name + "' has zero width");
    Node n;
    n.kind = Kind::input;
    n.name = name;
    n.dim = dim;
    return push(std::move(n));
}

std::size_t TowerSpec::add_dense(std::size_t operand, std::size_t width, Activation activation) {
    if (width == 0) throw Error("dense layer width must be positive");
    Node n;
    n.kind = Kind::dense;
    n.dim = width;
    n.operands = {operand};
    n.activation = activation;
    n.layer = dense_count_;
    std::size_t id = push(std::move(n));
    ++dense_count_;
    return id;
}

std::size_t TowerSpec::add_hadamard(std::vector<std::size_t> operands) {
    if (operands.size() < 2) throw Error("hadamard needs at least two operands");
    Node n;
    n.kind = Kind::hadamard;
    n.operands = std::move(operands);
    for (std::size_t op : n.operands) {
        if (op >= nodes_.size()) throw Error("tower spec operand refers to an undefined node");
        if (nodes_[op].dim != nodes_[n.operands.front()].dim) {
            throw Error("hadamard operands differ in width (" + std::to_string(nodes_[n.operands.front()].dim) +
                        " vs " + std::to_string(nodes_[op].dim) + ")");
        }
    }
    n.dim = nodes_[n.operands.front()].dim;
    return push(std::move(n));
}

std::size_t TowerSpec::add_concat(std::vector<std::size_t> operands) {
    if (operands.empty()) throw Error("concatenation needs operands");
    if (operands.size() == 1) return operands.front();
    Node n;
    n.kind = Kind::concat;
    n.operands = std::move(operands);
    for (std::size_t op : n.operands) {
        if (op >= nodes_.size()) throw Error("tower spec operand refers to an undefined node");
        n.dim += nodes_[op].dim;
    }
    return push(std::move(n));
}

void TowerSpec::finish(std::size_t body, const std::vector<std::size_t>& head_widths, Activation activation) {
    std::size_t top = body;
    for (std::size_t w : head_widths) top = add_dense(top, w, activation);
    add_dense(top, 1, Activation::identity);
    finished_ = true;
}

std::vector<std::pair<std::string, std::size_t>> TowerSpec::inputs() const {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const Node& n : nodes_) {
        if (n.kind == Kind::input) out.emplace_back(n.name, n.dim);
    }
    return out;
}

namespace {

class ArchitectureParser {
public:
    ArchitectureParser(std::string_view text, const std::map<std::string, std::size_t>& inputs,
                       const ArchitectureOptions& options, TowerSpec& spec)
        : text_(text), inputs_(inputs), options_(options), spec_(spec) {}

    std::size_t parse() {
        std::size_t node = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error("architecture '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view token) {
        if (!consume(token)) fail("expected '" + std::string(token) + "'");
    }

    bool concat_operator() { return consume("||") || consume("‖") || consume("|"); }

    std::size_t expression() {
        std::vector<std::size_t> parts{term()};
        while (concat_operator()) parts.push_back(term());
        return spec_.add_concat(std::move(parts));
    }

    std::string identifier() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) fail("expected an input name or operator");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t term() {
        if (consume("(")) {
            std::size_t inner = expression();
            expect(")");
            return inner;
        }
        const std::size_t start = pos_;
        std::string word = identifier();
        skip_space();
        const bool call = pos_ < text_.size() && text_[pos_] == '(';
        if (call && word == "e") {
            expect("(");
            std::vector<std::size_t> operands{expression()};
            while (consume(",")) operands.push_back(expression());
            expect(")");
            return spec_.add_hadamard(std::move(operands));
        }
        if (call && word.size() > 1 && word[0] == 'f' &&
            word.find_first_not_of("0123456789", 1) == std::string::npos) {
            const std::size_t depth = std::stoul(word.substr(1));
            expect("(");
            std::size_t node = expression();
            expect(")");
            for (std::size_t i = 0; i < depth; ++i) node = spec_.add_dense(node, options_.tower_width, options_.activation);
            return node;
        }
        if (call) {
            pos_ = start;
            fail("unknown operator '" + word + "'");
        }
        auto it = inputs_.find(word);
        if (it == inputs_.end()) {
            pos_ = start;
            fail("no input named '" + word + "'");
        }
        return spec_.add_input(word, it->second);
    }

    std::string_view text_;
    const std::map<std::string, std::size_t>& inputs_;
    const ArchitectureOptions& options_;
    TowerSpec& spec_;
    std::size_t pos_ = 0;
};

}  // namespace

TowerSpec parse_architecture(std::string_view expression, const std::map<std::string, std::size_t>& inputs,
                             const ArchitectureOptions& options) {
    TowerSpec spec;
    spec.description = std::string(expression);
    std::size_t body = ArchitectureParser(expression, inputs, options, spec).parse();
    spec.finish(body, options.head_widths, options.activation);
    return spec;
}

TowerSpec logistic_spec(const std::map<std::string, std::size_t>& inputs) {
    if (inputs.empty()) throw Error("logistic model needs at least one input");
    TowerSpec spec;
    std::vector<std::size_t> parts;
    std::string description;
    for (const auto& [name, dim] : inputs) {
        parts.push_back(spec.add_input(name, dim));
        description += (description.empty() ? "" : " | ") + name;
    }
    spec.description = description;
    spec.finish(spec.add_concat(std::move(parts)), {}, Activation::identity);
    return spec;
}

}  // namespace linkpred
