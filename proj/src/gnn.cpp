#include "modalnet/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modalnet/negation_oracle.hpp"

namespace modalnet {

std::string to_string(Aggregation a) {
    switch (a) {
        case Aggregation::Mean: return "mean";
        case Aggregation::Sum: return "sum";
        case Aggregation::Max: return "max";
    }
    return "?";
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::TrRelu: return "trrelu";
        case Activation::Relu: return "relu";
        case Activation::Step: return "step";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Aggregation parse_aggregation(const std::string& s) {
    if (s == "mean") return Aggregation::Mean;
    if (s == "sum") return Aggregation::Sum;
    if (s == "max") return Aggregation::Max;
    throw std::invalid_argument("unknown aggregation '" + s + "'");
}

Activation parse_activation(const std::string& s) {
    if (s == "trrelu") return Activation::TrRelu;
    if (s == "relu") return Activation::Relu;
    if (s == "step") return Activation::Step;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

void Matrix::add(std::size_t r, std::size_t c, const Rational& v) { at(r, c) = at(r, c).as<Rational>() + v; }

std::size_t Layer::in_dim() const {
    if (auto s = std::get_if<SimpleComb>(&comb)) return s->in_dim();
    return std::get<BuiltinComb>(comb).input_dim;
}

std::size_t Layer::out_dim() const {
    if (auto s = std::get_if<SimpleComb>(&comb)) return s->out_dim();
    return std::get<BuiltinComb>(comb).output_dim;
}

void Gnn::validate() const {
    if (input_dim < alphabet.size()) throw std::invalid_argument("input dimension smaller than the alphabet");
    std::size_t d = input_dim;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.in_dim() != d)
            throw std::invalid_argument("layer " + std::to_string(l + 1) + " expects input dimension " +
                                        std::to_string(layer.in_dim()) + " but receives " + std::to_string(d));
        if (auto s = std::get_if<SimpleComb>(&layer.comb)) {
            if (s->A.rows() != s->C.rows() || s->A.cols() != s->C.cols() || s->b.size() != s->C.cols())
                throw std::invalid_argument("inconsistent matrix shapes in layer " + std::to_string(l + 1));
        } else {
            const auto& b = std::get<BuiltinComb>(layer.comb);
            if (!b.collapse && b.channels.size() != b.output_dim)
                throw std::invalid_argument("built-in layer lists the wrong number of channels");
            for (const auto& ch : b.channels)
                if (ch.i >= d || ch.j >= d) throw std::invalid_argument("built-in recipe reads a missing channel");
        }
        d = layer.out_dim();
    }
    if (cls.index >= d) throw std::invalid_argument("classifier index outside the final dimension");
}

Domain gnn_domain(const Gnn& g) {
    bool is_float = false, is_quad = false;
    auto see = [&](const Scalar& s) {
        if (s.domain() == Domain::Float) is_float = true;
        if (s.domain() == Domain::Quad) is_quad = true;
    };
    auto see_simple = [&](const SimpleComb& s) {
        if (s.activation == Activation::Sigmoid) is_float = true;
        for (const auto& x : s.C.data()) see(x);
        for (const auto& x : s.A.data()) see(x);
        for (const auto& x : s.b) see(x);
    };
    for (const auto& layer : g.layers) {
        if (auto s = std::get_if<SimpleComb>(&layer.comb)) {
            see_simple(*s);
        } else {
            const auto& b = std::get<BuiltinComb>(layer.comb);
            if (b.oracle) is_quad = true;
            for (const auto& ch : b.channels)
                if (!ch.scale.is_rational() || !ch.offset.is_rational()) is_quad = true;
            if (b.collapse) {
                for (const auto& s : b.collapse->original) see_simple(s);
                for (const auto& v : b.collapse->leaf_plus)
                    for (const auto& x : v) see(x);
            }
        }
    }
    if (g.cls.kind == Classifier::Kind::Irrationality) is_quad = true;
    see(g.cls.constant);
    if (is_float && is_quad) throw std::invalid_argument("network mixes float and quadratic-extension values");
    if (is_float) return Domain::Float;
    if (is_quad) return Domain::Quad;
    return Domain::Rational;
}

Vector initial_features(const LabeledDigraph& g, VertexIndex v, std::size_t dim) {
    if (dim < g.alphabet().size()) throw std::invalid_argument("feature dimension smaller than the alphabet");
    Vector x(dim, Scalar(Rational(0)));
    for (std::size_t i = 0; i < g.alphabet().size(); ++i)
        if (g.has_label(v, i)) x[i] = Scalar(Rational(1));
    return x;
}

Vector initial_features(const LabeledDigraph& g, const std::string& v, std::size_t dim) {
    return initial_features(g, g.index(v), dim);
}

namespace {

template <class T>
using Vec = std::vector<T>;

template <class T>
T activate(Activation a, const T& x) {
    const T zero = Num<T>::zero(), one = Num<T>::one();
    switch (a) {
        case Activation::TrRelu: return x < zero ? zero : (x > one ? one : x);
        case Activation::Relu: return x < zero ? zero : x;
        case Activation::Step: return x > zero ? one : zero;
        case Activation::Identity: return x;
        case Activation::Sigmoid:
            if constexpr (std::is_same_v<T, double>) {
                return 1.0 / (1.0 + std::exp(-x));
            } else {
                throw std::domain_error("sigmoid requires the float domain");
            }
    }
    return x;
}

template <class T>
struct SparseComb {
    struct Entry {
        std::size_t from;
        T w;
    };
    std::size_t in = 0;
    std::vector<std::vector<Entry>> own, agg;
    std::vector<T> bias;
    Activation act = Activation::Identity;

    explicit SparseComb(const SimpleComb& s) : in(s.in_dim()), act(s.activation) {
        const std::size_t out = s.out_dim();
        own.resize(out);
        agg.resize(out);
        bias.reserve(out);
        for (std::size_t k = 0; k < out; ++k) {
            bias.push_back(s.b[k].as<T>());
            for (std::size_t j = 0; j < in; ++j) {
                if (!s.C.at(j, k).is_zero()) own[k].push_back({j, s.C.at(j, k).as<T>()});
                if (!s.A.at(j, k).is_zero()) agg[k].push_back({j, s.A.at(j, k).as<T>()});
            }
        }
    }

    Vec<T> apply(const Vec<T>& x, const Vec<T>& y) const {
        Vec<T> out(bias.size());
        [[maybe_unused]] ExactSum sum;
        for (std::size_t k = 0; k < bias.size(); ++k) {
            if constexpr (std::is_same_v<T, double>) {
                sum.clear();
                for (const auto& e : own[k]) sum.add(e.w * x[e.from]);
                for (const auto& e : agg[k]) sum.add(e.w * y[e.from]);
                sum.add(bias[k]);
                out[k] = activate(act, sum.result());
            } else {
                T acc = bias[k];
                for (const auto& e : own[k]) acc += e.w * x[e.from];
                for (const auto& e : agg[k]) acc += e.w * y[e.from];
                out[k] = activate(act, acc);
            }
        }
        return out;
    }
};

template <class T>
Vec<T> convert(const Vector& v) {
    Vec<T> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(s.as<T>());
    return out;
}

template <class T>
Vec<T> mix(const T& y, const Vec<T>& plus, const Vec<T>& minus) {
    Vec<T> out(plus.size());
    const T one_minus = Num<T>::one() - y;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        if constexpr (std::is_same_v<T, double>) {
            ExactSum s;
            s.add(y * plus[i]);
            s.add(one_minus * minus[i]);
            out[i] = s.result();
        } else {
            out[i] = y * plus[i] + one_minus * minus[i];
        }
    }
    return out;
}

template <class T>
struct CompiledBuiltin {
    const BuiltinComb* src;
    std::vector<T> scale, offset;
    std::vector<SparseComb<T>> original;
    std::vector<Vec<T>> plus, minus;

    explicit CompiledBuiltin(const BuiltinComb& b) : src(&b) {
        for (const auto& ch : b.channels) {
            if constexpr (std::is_same_v<T, QuadExt>) {
                scale.push_back(ch.scale);
                offset.push_back(ch.offset);
            } else {
                if (!ch.scale.is_rational() || !ch.offset.is_rational())
                    throw std::domain_error("irrational recipe constant outside the quadratic domain");
                scale.push_back(Num<T>::from(ch.scale.p()));
                offset.push_back(Num<T>::from(ch.offset.p()));
            }
        }
        if (b.collapse) {
            for (const auto& s : b.collapse->original) original.emplace_back(s);
            for (const auto& v : b.collapse->leaf_plus) plus.push_back(convert<T>(v));
            for (const auto& v : b.collapse->leaf_minus) minus.push_back(convert<T>(v));
        }
    }

    Vec<T> apply(const Vec<T>& x, const Vec<T>& y) const {
        if (src->collapse) return src->collapse->stage == 1 ? stage_one(y) : stage_two(y);
        Vec<T> out(src->channels.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto& ch = src->channels[k];
            using K = ChannelRecipe::Kind;
            switch (ch.kind) {
                case K::Constant: out[k] = offset[k]; break;
                case K::Affine: out[k] = scale[k] * x[ch.i] + offset[k]; break;
                case K::Own: out[k] = x[ch.i]; break;
                case K::Aggregated: out[k] = y[ch.i]; break;
                case K::Average:
                    if constexpr (std::is_same_v<T, double>) {
                        ExactSum s;
                        s.add(x[ch.i]);
                        s.add(x[ch.j]);
                        out[k] = s.result() / 2.0;
                    } else {
                        out[k] = Num<T>::div(x[ch.i] + x[ch.j], 2);
                    }
                    break;
                case K::Negation:
                    if constexpr (std::is_same_v<T, QuadExt>) {
                        if (!src->oracle) throw std::logic_error("negation recipe without an oracle");
                        out[k] = src->oracle->query(x[ch.i]);
                    } else {
                        throw std::domain_error("negation oracle requires the quadratic domain");
                    }
                    break;
            }
        }
        return out;
    }

    // y = fraction of P-labelled successors (first aggregated channel)
    Vec<T> stage_one(const Vec<T>& agg) const {
        const T y = agg.empty() ? Num<T>::zero() : agg[0];
        Vec<T> out;
        Vec<T> v = minus[0];
        for (std::size_t i = 0; i < original.size(); ++i) {
            v = original[i].apply(v, mix(y, plus[i], minus[i]));
            out.insert(out.end(), v.begin(), v.end());
        }
        return out;
    }

    Vec<T> stage_two(const Vec<T>& agg) const {
        Vec<T> u = original[0].apply(minus[0], minus[0]);
        std::size_t offset_in = 0;
        for (std::size_t i = 1; i < original.size(); ++i) {
            const std::size_t width = u.size();
            Vec<T> slice(agg.begin() + offset_in, agg.begin() + offset_in + width);
            offset_in += width;
            u = original[i].apply(u, slice);
        }
        return u;
    }
};

template <class T>
struct CompiledLayer {
    using value_type = T;
    Aggregation agg;
    std::size_t in;
    std::optional<SparseComb<T>> simple;
    std::optional<CompiledBuiltin<T>> builtin;

    explicit CompiledLayer(const Layer& l) : agg(l.agg), in(l.in_dim()) {
        if (l.is_simple()) simple.emplace(l.simple());
        else builtin.emplace(std::get<BuiltinComb>(l.comb));
    }

    Vec<T> aggregate(const std::vector<Vec<T>>& prev, const std::vector<VertexIndex>& succ) const {
        Vec<T> out(in, Num<T>::zero());
        if (succ.empty()) return out;
        if (agg == Aggregation::Max) {
            out = prev[succ[0]];
            for (std::size_t s = 1; s < succ.size(); ++s)
                for (std::size_t i = 0; i < in; ++i)
                    if (prev[succ[s]][i] > out[i]) out[i] = prev[succ[s]][i];
            return out;
        }
        [[maybe_unused]] ExactSum s;
        for (std::size_t i = 0; i < in; ++i) {
            if constexpr (std::is_same_v<T, double>) {
                s.clear();
                for (auto u : succ) s.add(prev[u][i]);
                out[i] = s.result();
            } else {
                T acc = Num<T>::zero();
                for (auto u : succ) acc += prev[u][i];
                out[i] = acc;
            }
            if (agg == Aggregation::Mean) out[i] = Num<T>::div(out[i], succ.size());
        }
        return out;
    }

    Vec<T> apply(const Vec<T>& x, const Vec<T>& y) const { return simple ? simple->apply(x, y) : builtin->apply(x, y); }
};

template <class T>
bool classify_value(const Classifier& cls, const Vec<T>& x) {
    const T& v = x.at(cls.index);
    if (cls.kind == Classifier::Kind::Irrationality) {
        if constexpr (std::is_same_v<T, QuadExt>) return v.q().sign() > 0;
        else return false;
    }
    const T c = cls.constant.as<T>();
    return cls.strict ? v > c : v >= c;
}

template <class T>
using Compiled = std::vector<CompiledLayer<T>>;

template <class T>
Compiled<T> compile_layers(const Gnn& gnn) {
    Compiled<T> layers;
    layers.reserve(gnn.layers.size());
    for (const auto& l : gnn.layers) layers.emplace_back(l);
    return layers;
}

template <class T>
std::vector<std::vector<Vec<T>>> run(const Gnn& gnn, const Compiled<T>& layers, const LabeledDigraph& g, bool keep_all) {
    if (!gnn.alphabet.empty() && gnn.alphabet != g.alphabet())
        throw std::invalid_argument("graph alphabet differs from the network alphabet");
    if (g.alphabet().size() > gnn.input_dim)
        throw std::invalid_argument("graph alphabet larger than the network input dimension");
    std::vector<Vec<T>> cur(g.size());
    for (VertexIndex v = 0; v < g.size(); ++v) {
        cur[v].assign(gnn.input_dim, Num<T>::zero());
        for (std::size_t i = 0; i < g.alphabet().size(); ++i)
            if (g.has_label(v, i)) cur[v][i] = Num<T>::one();
    }
    std::vector<std::vector<Vec<T>>> trace;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        std::vector<Vec<T>> next(g.size());
        for (VertexIndex v = 0; v < g.size(); ++v)
            next[v] = layers[l].apply(cur[v], layers[l].aggregate(cur, g.successors(v)));
        if (keep_all) trace.push_back(std::move(cur));
        cur = std::move(next);
    }
    trace.push_back(std::move(cur));
    return trace;
}

template <class T>
EvaluationTrace evaluate_in(const Gnn& gnn, const Compiled<T>& layers, const LabeledDigraph& g) {
    auto raw = run<T>(gnn, layers, g, true);
    EvaluationTrace t;
    t.domain = Num<T>::domain;
    for (auto& layer : raw) {
        std::vector<Vector> out;
        out.reserve(layer.size());
        for (auto& v : layer) out.emplace_back(v.begin(), v.end());
        t.layers.push_back(std::move(out));
    }
    for (const auto& v : raw.back()) t.accepted.push_back(classify_value(gnn.cls, v));
    return t;
}

template <class T>
std::vector<bool> classify_in(const Gnn& gnn, const Compiled<T>& layers, const LabeledDigraph& g) {
    auto raw = run<T>(gnn, layers, g, false);
    std::vector<bool> out;
    for (const auto& v : raw.back()) out.push_back(classify_value(gnn.cls, v));
    return out;
}

template <class T>
std::vector<Vector> final_in(const Gnn& gnn, const Compiled<T>& layers, const LabeledDigraph& g) {
    auto raw = run<T>(gnn, layers, g, false);
    std::vector<Vector> out;
    for (const auto& v : raw.back()) out.emplace_back(v.begin(), v.end());
    return out;
}

template <class T>
Vector to_scalars(const Vec<T>& v) {
    return Vector(v.begin(), v.end());
}

}  // namespace

struct Evaluator::Impl {
    Gnn gnn;
    Domain domain;
    std::variant<Compiled<Rational>, Compiled<double>, Compiled<QuadExt>> layers;

    explicit Impl(const Gnn& g) : gnn(g), domain(gnn_domain(g)) {
        gnn.validate();
        switch (domain) {
            case Domain::Rational: layers = compile_layers<Rational>(gnn); break;
            case Domain::Float: layers = compile_layers<double>(gnn); break;
            case Domain::Quad: layers = compile_layers<QuadExt>(gnn); break;
        }
    }
};

Evaluator::Evaluator(const Gnn& gnn) : impl_(std::make_shared<Impl>(gnn)) {}

Domain Evaluator::domain() const { return impl_->domain; }
const Gnn& Evaluator::gnn() const { return impl_->gnn; }

EvaluationTrace Evaluator::trace(const LabeledDigraph& g) const {
    return std::visit([&](const auto& ls) { return evaluate_in(impl_->gnn, ls, g); }, impl_->layers);
}

std::vector<bool> Evaluator::classify_all(const LabeledDigraph& g) const {
    return std::visit([&](const auto& ls) { return classify_in(impl_->gnn, ls, g); }, impl_->layers);
}

std::vector<Vector> Evaluator::final_vectors(const LabeledDigraph& g) const {
    return std::visit([&](const auto& ls) { return final_in(impl_->gnn, ls, g); }, impl_->layers);
}

EvaluationTrace evaluate(const Gnn& gnn, const LabeledDigraph& g) { return Evaluator(gnn).trace(g); }

std::vector<bool> classify_all(const Gnn& gnn, const LabeledDigraph& g) { return Evaluator(gnn).classify_all(g); }

bool classify(const Gnn& gnn, const LabeledDigraph& g, VertexIndex v) { return classify_all(gnn, g).at(v); }

bool classify(const Gnn& gnn, const LabeledDigraph& g, const std::string& v) {
    return classify(gnn, g, g.index(v));
}

bool classify_vector(const Classifier& cls, const Vector& x) {
    bool quad = cls.kind == Classifier::Kind::Irrationality, fl = false;
    for (const auto& s : x) {
        if (s.domain() == Domain::Quad) quad = true;
        if (s.domain() == Domain::Float) fl = true;
    }
    if (fl) return classify_value(cls, convert<double>(x));
    if (quad) return classify_value(cls, convert<QuadExt>(x));
    return classify_value(cls, convert<Rational>(x));
}

struct CompiledComb::Impl {
    Layer layer;
    Domain domain;
    std::variant<std::monostate, CompiledLayer<Rational>, CompiledLayer<double>, CompiledLayer<QuadExt>> c;

    Impl(const Layer& l, Domain d) : layer(l), domain(d) {
        switch (d) {
            case Domain::Rational: c.emplace<CompiledLayer<Rational>>(layer); break;
            case Domain::Float: c.emplace<CompiledLayer<double>>(layer); break;
            case Domain::Quad: c.emplace<CompiledLayer<QuadExt>>(layer); break;
        }
    }
};

CompiledComb::CompiledComb(const Layer& layer, Domain d) : impl_(std::make_shared<Impl>(layer, d)) {}

Vector CompiledComb::apply(const Vector& own, const Vector& aggregated) const {
    return std::visit(
        [&](const auto& cl) -> Vector {
            using C = std::decay_t<decltype(cl)>;
            if constexpr (std::is_same_v<C, std::monostate>) {
                throw std::logic_error("empty compiled combination");
            } else {
                using T = typename C::value_type;
                return to_scalars(cl.apply(convert<T>(own), convert<T>(aggregated)));
            }
        },
        impl_->c);
}

Vector apply_comb(const Layer& layer, const Vector& own, const Vector& aggregated, Domain d) {
    return CompiledComb(layer, d).apply(own, aggregated);
}

Scalar apply_activation(Activation a, const Scalar& x, Domain d) {
    switch (d) {
        case Domain::Rational: return activate(a, x.as<Rational>());
        case Domain::Float: return activate(a, x.as<double>());
        case Domain::Quad: return activate(a, x.as<QuadExt>());
    }
    throw std::logic_error("unknown domain");
}

Gnn collapse_depth2_trees(const Gnn& gnn) {
    gnn.validate();
    if (gnn.layers.empty()) throw std::invalid_argument("collapse needs at least one layer");
    auto stage = std::make_shared<CollapseStage>();
    for (const auto& l : gnn.layers) {
        if (l.agg != Aggregation::Mean) throw std::invalid_argument("collapse requires MEAN aggregation in every layer");
        if (!l.is_simple()) throw std::invalid_argument("collapse requires simple combinations");
        stage->original.push_back(l.simple());
    }
    // leaf trajectories: single vertex with and without the first label
    std::vector<std::string> alphabet = gnn.alphabet.empty() ? std::vector<std::string>{"P"} : gnn.alphabet;
    Gnn probe = gnn;
    probe.alphabet.clear();
    for (int labelled = 0; labelled < 2; ++labelled) {
        LabeledDigraph leaf(alphabet);
        leaf.add_vertex("leaf", labelled ? LabelSet{1} : LabelSet{0});
        auto t = evaluate(probe, leaf);
        auto& dst = labelled ? stage->leaf_plus : stage->leaf_minus;
        for (const auto& layer : t.layers) dst.push_back(layer[0]);
    }
    std::size_t concat = 0;
    for (const auto& l : gnn.layers) concat += l.out_dim();

    Gnn out;
    out.input_dim = gnn.input_dim;
    out.alphabet = gnn.alphabet;
    out.cls = gnn.cls;
    BuiltinComb first;
    first.input_dim = gnn.input_dim;
    first.output_dim = concat;
    first.collapse = stage;
    auto second_stage = std::make_shared<CollapseStage>(*stage);
    second_stage->stage = 2;
    BuiltinComb second;
    second.input_dim = concat;
    second.output_dim = gnn.output_dim();
    second.collapse = second_stage;
    out.layers.push_back({Aggregation::Mean, first});
    out.layers.push_back({Aggregation::Mean, second});
    return out;
}

}  // namespace modalnet
