#include <stdexcept>

#include "modalnet/gnn.hpp"
#include "modalnet/negation_oracle.hpp"

namespace modalnet {

using nlohmann::json;

namespace {

json quad_to_json(const QuadExt& q) { return {{"p", q.p().str()}, {"q", q.q().str()}}; }

QuadExt quad_from_json(const json& j) {
    if (j.is_object()) return {Rational::parse(j.at("p").get<std::string>()), Rational::parse(j.at("q").get<std::string>())};
    return scalar_from_json(j).as<QuadExt>();
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (const auto& s : v) out.push_back(scalar_to_json(s));
    return out;
}

Vector vector_from_json(const json& j) {
    Vector out;
    for (const auto& x : j) out.push_back(scalar_from_json(x));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m.at(r, c)));
        out.push_back(row);
    }
    return out;
}

Matrix matrix_from_json(const json& j, std::size_t cols_hint) {
    std::size_t rows = j.size();
    std::size_t cols = rows ? j.at(0).size() : cols_hint;
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j.at(r).size() != cols) throw std::invalid_argument("ragged matrix in GNN JSON");
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = scalar_from_json(j.at(r).at(c));
    }
    return m;
}

json simple_to_json(const SimpleComb& s) {
    return {{"C", matrix_to_json(s.C)}, {"A", matrix_to_json(s.A)}, {"b", vector_to_json(s.b)},
            {"activation", to_string(s.activation)}};
}

SimpleComb simple_from_json(const json& j, std::size_t in_dim) {
    SimpleComb s;
    s.b = vector_from_json(j.at("b"));
    s.C = matrix_from_json(j.at("C"), s.b.size());
    s.A = matrix_from_json(j.at("A"), s.b.size());
    if (s.C.rows() == 0) s.C = Matrix(in_dim, s.b.size());
    if (s.A.rows() == 0) s.A = Matrix(in_dim, s.b.size());
    s.activation = parse_activation(j.at("activation").get<std::string>());
    return s;
}

const char* recipe_name(ChannelRecipe::Kind k) {
    using K = ChannelRecipe::Kind;
    switch (k) {
        case K::Constant: return "constant";
        case K::Affine: return "affine";
        case K::Own: return "own";
        case K::Aggregated: return "aggregated";
        case K::Average: return "average";
        case K::Negation: return "negation";
    }
    return "?";
}

ChannelRecipe::Kind recipe_kind(const std::string& s) {
    using K = ChannelRecipe::Kind;
    for (K k : {K::Constant, K::Affine, K::Own, K::Aggregated, K::Average, K::Negation})
        if (s == recipe_name(k)) return k;
    throw std::invalid_argument("unknown built-in recipe '" + s + "'");
}

json builtin_to_json(const BuiltinComb& b) {
    json out = {{"input_dim", b.input_dim}, {"output_dim", b.output_dim}};
    if (b.collapse) {
        json orig = json::array();
        for (const auto& s : b.collapse->original) orig.push_back(simple_to_json(s));
        json plus = json::array(), minus = json::array();
        for (const auto& v : b.collapse->leaf_plus) plus.push_back(vector_to_json(v));
        for (const auto& v : b.collapse->leaf_minus) minus.push_back(vector_to_json(v));
        out["collapse"] = {{"stage", b.collapse->stage}, {"layers", orig}, {"leaf_plus", plus}, {"leaf_minus", minus}};
        return out;
    }
    json channels = json::array();
    using K = ChannelRecipe::Kind;
    for (const auto& ch : b.channels) {
        json c = {{"op", recipe_name(ch.kind)}};
        if (ch.kind != K::Constant) c["i"] = ch.i + 1;
        if (ch.kind == K::Average) c["j"] = ch.j + 1;
        if (ch.kind == K::Affine) c["scale"] = quad_to_json(ch.scale);
        if (ch.kind == K::Affine || ch.kind == K::Constant) c["offset"] = quad_to_json(ch.offset);
        channels.push_back(c);
    }
    out["channels"] = channels;
    if (b.oracle) out["oracle"] = {{"a", quad_to_json(b.oracle->lower())}, {"b", quad_to_json(b.oracle->upper())}};
    return out;
}

BuiltinComb builtin_from_json(const json& j, std::shared_ptr<NegationOracle>& shared_oracle) {
    BuiltinComb b;
    b.input_dim = j.at("input_dim").get<std::size_t>();
    b.output_dim = j.at("output_dim").get<std::size_t>();
    if (j.contains("collapse")) {
        const auto& c = j.at("collapse");
        auto stage = std::make_shared<CollapseStage>();
        stage->stage = c.at("stage").get<int>();
        std::size_t in = 0;
        for (const auto& l : c.at("layers")) {
            stage->original.push_back(simple_from_json(l, in));
            in = stage->original.back().out_dim();
        }
        for (const auto& v : c.at("leaf_plus")) stage->leaf_plus.push_back(vector_from_json(v));
        for (const auto& v : c.at("leaf_minus")) stage->leaf_minus.push_back(vector_from_json(v));
        b.collapse = stage;
        return b;
    }
    for (const auto& c : j.at("channels")) {
        ChannelRecipe r;
        r.kind = recipe_kind(c.at("op").get<std::string>());
        auto index = [&](const char* key) {
            std::size_t i = c.at(key).get<std::size_t>();
            if (i == 0) throw std::invalid_argument("channel indices are 1-based");
            return i - 1;
        };
        if (r.kind != ChannelRecipe::Kind::Constant) r.i = index("i");
        if (r.kind == ChannelRecipe::Kind::Average) r.j = index("j");
        if (c.contains("scale")) r.scale = quad_from_json(c.at("scale"));
        if (c.contains("offset")) r.offset = quad_from_json(c.at("offset"));
        b.channels.push_back(r);
    }
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        NegationOracle probe;
        if (!(quad_from_json(o.at("a")) == probe.lower()) || !(quad_from_json(o.at("b")) == probe.upper()))
            throw std::invalid_argument("only the oracle on [0, sqrt2] is supported");
        if (!shared_oracle) shared_oracle = std::make_shared<NegationOracle>();
        b.oracle = shared_oracle;
    }
    return b;
}

}  // namespace

json scalar_to_json(const Scalar& s) {
    return std::visit(
        [](const auto& x) -> json {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, Rational>) return x.str();
            else if constexpr (std::is_same_v<X, double>) return x;
            else return quad_to_json(x);
        },
        s.storage());
}

Scalar scalar_from_json(const json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return j.get<double>();
    if (j.is_object()) {
        QuadExt q = quad_from_json(j);
        return q;
    }
    throw std::invalid_argument("cannot read a scalar from " + j.dump());
}

json gnn_to_json(const Gnn& g) {
    json layers = json::array();
    for (const auto& l : g.layers) {
        json lj = {{"agg", to_string(l.agg)}};
        if (l.is_simple()) lj.update(simple_to_json(l.simple()));
        else lj["builtin"] = builtin_to_json(std::get<BuiltinComb>(l.comb));
        layers.push_back(lj);
    }
    json cls;
    if (g.cls.kind == Classifier::Kind::Threshold)
        cls = {{"kind", "threshold"}, {"index", g.cls.index + 1}, {"rel", g.cls.strict ? ">" : ">="},
               {"c", scalar_to_json(g.cls.constant)}};
    else
        cls = {{"kind", "irrational"}, {"index", g.cls.index + 1}};
    json out = {{"input_dim", g.input_dim}, {"layers", layers}, {"cls", cls}};
    if (!g.alphabet.empty()) out["alphabet"] = g.alphabet;
    if (!g.channel_names.empty()) out["channels"] = g.channel_names;
    return out;
}

Gnn gnn_from_json(const json& j) {
    Gnn g;
    if (j.contains("alphabet")) g.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    if (j.contains("input_dim")) {
        g.input_dim = j.at("input_dim").get<std::size_t>();
    } else if (!j.at("layers").empty() && j.at("layers").at(0).contains("C")) {
        g.input_dim = j.at("layers").at(0).at("C").size();
    } else {
        g.input_dim = g.alphabet.size();
    }
    if (j.contains("channels")) g.channel_names = j.at("channels").get<std::vector<std::string>>();
    std::shared_ptr<NegationOracle> oracle;
    std::size_t d = g.input_dim;
    for (const auto& lj : j.at("layers")) {
        Layer l;
        l.agg = parse_aggregation(lj.at("agg").get<std::string>());
        if (lj.contains("builtin")) l.comb = builtin_from_json(lj.at("builtin"), oracle);
        else l.comb = simple_from_json(lj, d);
        d = l.out_dim();
        g.layers.push_back(std::move(l));
    }
    const auto& cj = j.at("cls");
    std::string kind = cj.at("kind").get<std::string>();
    std::size_t index = cj.at("index").get<std::size_t>();
    if (index == 0) throw std::invalid_argument("classifier index is 1-based");
    if (kind == "threshold") {
        std::string rel = cj.at("rel").get<std::string>();
        if (rel != ">" && rel != ">=") throw std::invalid_argument("classifier relation must be > or >=");
        g.cls = Classifier::threshold(index - 1, rel == ">", scalar_from_json(cj.at("c")));
    } else if (kind == "irrational") {
        g.cls = Classifier::irrational(index - 1);
    } else {
        throw std::invalid_argument("unknown classifier kind '" + kind + "'");
    }
    g.validate();
    return g;
}

}  // namespace modalnet
