#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modalnet/graph.hpp"
#include "modalnet/scalar.hpp"

namespace modalnet {

class NegationOracle;

enum class Aggregation { Mean, Sum, Max };
enum class Activation { TrRelu, Relu, Step, Sigmoid, Identity };

std::string to_string(Aggregation a);
std::string to_string(Activation a);
Aggregation parse_aggregation(const std::string& s);
Activation parse_activation(const std::string& s);

// Row-major rows x cols matrix; row = input channel, column = output channel.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Scalar& at(std::size_t r, std::size_t c) { return data_.at(r * cols_ + c); }
    const Scalar& at(std::size_t r, std::size_t c) const { return data_.at(r * cols_ + c); }
    void add(std::size_t r, std::size_t c, const Rational& v);
    const std::vector<Scalar>& data() const { return data_; }

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

// f(x.C + y.A + b)
struct SimpleComb {
    Matrix C;
    Matrix A;
    Vector b;
    Activation activation = Activation::TrRelu;

    SimpleComb() = default;
    SimpleComb(std::size_t in, std::size_t out, Activation act)
        : C(in, out), A(in, out), b(out), activation(act) {}
    std::size_t in_dim() const { return C.rows(); }
    std::size_t out_dim() const { return C.cols(); }
};

// One output channel of a built-in combination. Channel indices are 0-based.
struct ChannelRecipe {
    enum class Kind { Constant, Affine, Own, Aggregated, Average, Negation };
    Kind kind = Kind::Constant;
    std::size_t i = 0;
    std::size_t j = 0;
    QuadExt scale;   // Affine: scale * x_i + offset
    QuadExt offset;  // Constant value or Affine offset
};

// Two-layer stand-in for a deeper MEAN network on depth-2 trees; see collapse_depth2_trees.
struct CollapseStage {
    int stage = 1;
    std::vector<SimpleComb> original;
    std::vector<Vector> leaf_plus;   // a+^0 .. a+^L
    std::vector<Vector> leaf_minus;  // a-^0 .. a-^L
};

struct BuiltinComb {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::vector<ChannelRecipe> channels;
    std::shared_ptr<NegationOracle> oracle;
    std::shared_ptr<const CollapseStage> collapse;
};

struct Layer {
    Aggregation agg = Aggregation::Mean;
    std::variant<SimpleComb, BuiltinComb> comb;

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    bool is_simple() const { return std::holds_alternative<SimpleComb>(comb); }
    const SimpleComb& simple() const { return std::get<SimpleComb>(comb); }
    SimpleComb& simple() { return std::get<SimpleComb>(comb); }
};

struct Classifier {
    enum class Kind { Threshold, Irrationality };
    Kind kind = Kind::Threshold;
    std::size_t index = 0;  // 0-based
    bool strict = true;     // > when true, >= otherwise
    Scalar constant;

    static Classifier threshold(std::size_t index, bool strict, Scalar c) {
        return {Kind::Threshold, index, strict, std::move(c)};
    }
    static Classifier irrational(std::size_t index) { return {Kind::Irrationality, index, true, Scalar()}; }
};

struct Gnn {
    std::size_t input_dim = 0;
    std::vector<Layer> layers;
    Classifier cls;
    std::vector<std::string> alphabet;       // optional; empty = unchecked
    std::vector<std::string> channel_names;  // optional sidecar

    std::size_t output_dim() const { return layers.empty() ? input_dim : layers.back().out_dim(); }
    // Throws when dimensions do not chain or the classifier index is out of range.
    void validate() const;
};

Domain gnn_domain(const Gnn& g);

Vector initial_features(const LabeledDigraph& g, VertexIndex v, std::size_t dim);
Vector initial_features(const LabeledDigraph& g, const std::string& v, std::size_t dim);

struct EvaluationTrace {
    Domain domain = Domain::Rational;
    std::vector<std::vector<Vector>> layers;  // layers[l][v], l = 0..L
    std::vector<bool> accepted;
};

// Compiles the layers once for repeated evaluation. Copies share the compiled
// state, including any negation oracle.
class Evaluator {
public:
    explicit Evaluator(const Gnn& gnn);
    Domain domain() const;
    const Gnn& gnn() const;
    EvaluationTrace trace(const LabeledDigraph& g) const;
    std::vector<bool> classify_all(const LabeledDigraph& g) const;
    std::vector<Vector> final_vectors(const LabeledDigraph& g) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

EvaluationTrace evaluate(const Gnn& gnn, const LabeledDigraph& g);
std::vector<bool> classify_all(const Gnn& gnn, const LabeledDigraph& g);
bool classify(const Gnn& gnn, const LabeledDigraph& g, VertexIndex v);
bool classify(const Gnn& gnn, const LabeledDigraph& g, const std::string& v);
bool classify_vector(const Classifier& cls, const Vector& x);

// One combination prepared for repeated application in a fixed domain.
class CompiledComb {
public:
    CompiledComb(const Layer& layer, Domain d);
    Vector apply(const Vector& own, const Vector& aggregated) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// Applies one combination to explicit (own, aggregated) vectors in the given domain.
Vector apply_comb(const Layer& layer, const Vector& own, const Vector& aggregated, Domain d);
Scalar apply_activation(Activation a, const Scalar& x, Domain d);

// Mean-only reduction to a 2-layer network that agrees at roots of depth-2 trees
// (root -> middle vertices -> leaves, every middle vertex with a leaf, P = first label).
Gnn collapse_depth2_trees(const Gnn& gnn);

nlohmann::json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const nlohmann::json& j);
nlohmann::json gnn_to_json(const Gnn& g);
Gnn gnn_from_json(const nlohmann::json& j);

}  // namespace modalnet
