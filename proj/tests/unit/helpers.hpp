#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <modalnet/formula.hpp>
#include <modalnet/gnn.hpp>
#include <modalnet/graph.hpp>

namespace testutil {

using namespace modalnet;

inline LabeledDigraph make_graph(const std::vector<std::string>& alphabet, const std::vector<std::string>& vertices,
                                 const std::vector<std::pair<std::string, std::string>>& edges,
                                 const std::map<std::string, std::vector<std::string>>& labeling = {}) {
    LabeledDigraph g(alphabet);
    for (const auto& v : vertices) g.add_vertex(v);
    for (const auto& [a, b] : edges) g.add_edge(a, b);
    for (const auto& [v, ls] : labeling) g.set_labels(v, ls);
    return g;
}

// Fixtures A, B1, B2 over {P, Q}
inline LabeledDigraph fixture_a() {
    return make_graph({"P", "Q"}, {"a", "b", "c"}, {{"a", "b"}, {"a", "c"}}, {{"b", {"P", "Q"}}, {"c", {"Q"}}});
}
inline LabeledDigraph fixture_b1() {
    return make_graph({"P", "Q"}, {"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"a", "d"}},
                      {{"b", {"P", "Q"}}, {"c", {"Q"}}});
}
inline LabeledDigraph fixture_b2() { return make_graph({"P", "Q"}, {"a", "c"}, {{"a", "c"}}, {{"c", {"Q"}}}); }

// Textbook recursive semantics, written independently of the bitset checker.
inline bool naive_check(const LabeledDigraph& g, VertexIndex v, const Formula& f) {
    const auto& succ = g.successors(v);
    auto count = [&](const Formula& s) {
        long k = 0;
        for (auto u : succ) k += naive_check(g, u, s);
        return k;
    };
    const long m = static_cast<long>(succ.size());
    switch (f.op()) {
        case Op::Atom: return g.has_label(v, g.label_index(f.atom()));
        case Op::Top: return true;
        case Op::Bottom: return false;
        case Op::Not: return !naive_check(g, v, f.sub());
        case Op::And: return naive_check(g, v, f.left()) && naive_check(g, v, f.right());
        case Op::Or: return naive_check(g, v, f.left()) || naive_check(g, v, f.right());
        case Op::Dia: return count(f.sub()) > 0;
        case Op::Box: return count(f.sub()) == m;
        case Op::GDia: {
            long k = count(f.sub());
            return f.rel() == Rel::Eq ? k == long(f.count()) : k >= long(f.count());
        }
        case Op::RDia: {
            if (m == 0) return f.rel() != Rel::Gt;  // leaf: fraction of an empty set
            long k = count(f.sub());
            // k/m vs p/q by cross-multiplication
            long lhs = k * f.ratio().den(), rhs = f.ratio().num() * m;
            if (f.rel() == Rel::Gt) return lhs > rhs;
            if (f.rel() == Rel::Geq) return lhs >= rhs;
            return lhs == rhs;
        }
    }
    return false;
}

enum class Frag { ML, GML, RML, AFML1, AFML2 };

// Seeded random formula of the requested fragment and modal depth <= depth.
inline Formula random_formula(std::mt19937_64& rng, Frag frag, int depth, const std::vector<std::string>& atoms,
                              std::uint32_t max_count = 3) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    auto literal = [&]() {
        Formula a = atom(atoms[pick(static_cast<int>(atoms.size()))]);
        return pick(2) ? a : neg(a);
    };
    if (depth == 0 || pick(4) == 0) {
        if (frag == Frag::AFML1 && pick(5) == 0) return box(bottom());
        if (frag == Frag::AFML2 && pick(5) == 0) return dia(top());
        return literal();
    }
    int c = pick(4);
    if (c == 0) return conj(random_formula(rng, frag, depth - 1, atoms, max_count),
                            random_formula(rng, frag, depth, atoms, max_count));
    if (c == 1) return disj(random_formula(rng, frag, depth - 1, atoms, max_count),
                           random_formula(rng, frag, depth, atoms, max_count));
    Formula s = random_formula(rng, frag, depth - 1, atoms, max_count);
    switch (frag) {
        case Frag::ML: return pick(3) == 0 ? neg(dia(s)) : (pick(2) ? dia(s) : box(s));
        case Frag::GML: {
            Formula d = gdia(pick(3) ? Rel::Geq : Rel::Eq, 1 + pick(static_cast<int>(max_count)), s);
            return pick(3) == 0 ? neg(d) : d;
        }
        case Frag::RML: {
            static const std::vector<Rational> ts = {Rational(0), Rational(1, 4), Rational(1, 3),
                                                     Rational(1, 2), Rational(2, 3), Rational(1)};
            Rational t = ts[pick(static_cast<int>(ts.size()))];
            Rel r = pick(2) ? Rel::Gt : Rel::Geq;
            if (t == Rational(1) && r == Rel::Gt) r = Rel::Geq;
            Formula d = rdia(r, t, s);
            return pick(3) == 0 ? neg(d) : d;
        }
        case Frag::AFML1: return dia(s);
        case Frag::AFML2: return box(s);
    }
    return s;
}

// Small rational in [-2, 2] with denominator <= 4.
inline Rational random_rational(std::mt19937_64& rng) {
    std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 4);
    std::int64_t num = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(4 * den + 1)) - 2 * den;
    return Rational(num, den);
}

// Random simple network, every layer the given aggregation; dims in 1..max_dim.
inline Gnn random_simple_gnn(std::mt19937_64& rng, std::size_t input_dim, std::size_t layers, std::size_t max_dim,
                             Aggregation agg, Activation act = Activation::TrRelu) {
    Gnn g;
    g.input_dim = input_dim;
    std::size_t in = input_dim;
    for (std::size_t l = 0; l < layers; ++l) {
        std::size_t out = 1 + rng() % max_dim;
        SimpleComb c(in, out, act);
        for (std::size_t i = 0; i < in; ++i)
            for (std::size_t j = 0; j < out; ++j) {
                c.C.at(i, j) = random_rational(rng);
                c.A.at(i, j) = random_rational(rng);
            }
        for (auto& b : c.b) b = random_rational(rng);
        g.layers.push_back(Layer{agg, c});
        in = out;
    }
    g.cls = Classifier::threshold(rng() % in, rng() % 2, Scalar(Rational(static_cast<std::int64_t>(rng() % 3), 4)));
    return g;
}

// root -> 0..3 middles -> 1..3 leaves each; P (the only label) only on leaves.
inline LabeledDigraph random_depth2_tree(std::mt19937_64& rng, std::size_t max_mid = 3, std::size_t max_leaf = 3) {
    LabeledDigraph t({"P"});
    t.add_vertex("r");
    std::size_t mids = rng() % (max_mid + 1);
    for (std::size_t m = 0; m < mids; ++m) {
        std::string mid = "m" + std::to_string(m);
        t.add_vertex(mid);
        t.add_edge("r", mid);
        std::size_t leaves = 1 + rng() % max_leaf;
        for (std::size_t l = 0; l < leaves; ++l) {
            std::string leaf = mid + "." + std::to_string(l);
            t.add_vertex(leaf, rng() % 2 ? 1u : 0u);
            t.add_edge(mid, leaf);
        }
    }
    return t;
}

}  // namespace testutil
