#include <doctest.h>

#include <cmath>
#include <set>

#include <modalnet/compiler.hpp>

#include "helpers.hpp"

using namespace modalnet;
using testutil::Frag;
using testutil::make_graph;
using testutil::random_formula;

namespace {

// Compiled net vs model checker on random graphs.
void agrees_on_random(const Gnn& net, const Formula& f, const std::vector<std::string>& ab, std::mt19937_64& rng,
                      int graphs, std::size_t max_size) {
    Evaluator ev(net);
    for (int i = 0; i < graphs; ++i) {
        auto g = random_graph(ab, 1 + rng() % max_size, rng, 0.35);
        CHECK_MESSAGE(ev.classify_all(g) == check_all(g, f), print(f));
    }
}

Rational value(const Scalar& s) { return s.as<Rational>(); }

}  // namespace

TEST_CASE("bounded RML weights and hand evaluation") {
    auto net = compile_rml_bounded(parse("<>{>1/2} P"), 2);
    REQUIRE(net.layers.size() == 2);
    const auto& c = net.layers[0].simple();
    CHECK(c.A.at(0, 1) == Scalar(Rational(4)));
    CHECK(c.b[1] == Scalar(Rational(-2)));
    CHECK(net.layers[0].agg == Aggregation::Mean);

    auto half = make_graph({"P"}, {"v", "u", "w"}, {{"v", "u"}, {"v", "w"}}, {{"u", {"P"}}});
    CHECK(value(Evaluator(net).final_vectors(half)[0][1]) == Rational(0));
    CHECK_FALSE(classify(net, half, "v"));
    auto one = make_graph({"P"}, {"v", "u"}, {{"v", "u"}}, {{"u", {"P"}}});
    CHECK(value(Evaluator(net).final_vectors(one)[0][1]) == Rational(1));
    CHECK(classify(net, one, "v"));
    CHECK_THROWS(compile_rml_bounded(parse("<>{>1/2} P"), 0));
    CHECK_THROWS(compile_rml_bounded(parse("<>{>=2} P"), 3));
}

TEST_CASE("bounded RML channels are exact truth values") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 25; ++trial) {
        Formula f = random_formula(rng, Frag::RML, 2, {"P"});
        const std::uint32_t n = 3;
        auto net = compile_rml_bounded(f, n);
        std::vector<Formula> channels;
        for (const auto& name : net.channel_names) channels.push_back(parse(name));
        Evaluator ev(net);
        std::size_t seen = 0;
        enumerate_unpointed({"P"}, 1, n, [&](const LabeledDigraph& g) {
            if (++seen % 5) return true;
            auto tr = ev.trace(g);
            bool ok = true;
            for (std::size_t k = 0; k < channels.size(); ++k) {
                auto truth = check_all(g, channels[k]);
                for (std::size_t l = k + 1; l < tr.layers.size(); ++l)
                    for (VertexIndex v = 0; v < g.size(); ++v)
                        ok = ok && value(tr.layers[l][v][k]) == Rational(truth[v] ? 1 : 0);
            }
            CHECK_MESSAGE(ok, print(f));
            return ok;
        });
    }
}

TEST_CASE("fraction gap") {
    for (std::int64_t n = 1; n <= 6; ++n) {
        std::set<Rational> fr;
        for (std::int64_t m = 1; m <= n; ++m)
            for (std::int64_t l = 0; l <= m; ++l) fr.insert(Rational(l, m));
        Rational prev(-1);
        for (const auto& x : fr) {
            if (prev >= Rational(0)) CHECK(x - prev >= Rational(1, n * n));
            prev = x;
        }
    }
}

TEST_CASE("trrelu to relu") {
    for (auto [probe, expect] : std::vector<std::pair<Rational, Rational>>{
             {Rational(3, 2), Rational(1)}, {Rational(-3, 10), Rational(0)}, {Rational(2, 5), Rational(2, 5)}}) {
        Gnn g;
        g.input_dim = 1;
        SimpleComb c(1, 1, Activation::TrRelu);
        c.b[0] = probe;
        g.layers.push_back(Layer{Aggregation::Mean, c});
        g.cls = Classifier::threshold(0, true, Scalar(Rational(0)));
        auto r = trrelu_to_relu(g);
        CHECK(r.layers.size() == 2);
        CHECK(r.layers[0].simple().activation == Activation::Relu);
        auto single = make_graph({"P"}, {"v"}, {});
        CHECK(value(Evaluator(g).final_vectors(single)[0][0]) == expect);
        CHECK(value(Evaluator(r).final_vectors(single)[0][0]) == expect);
    }
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = testutil::random_simple_gnn(rng, 2, 1 + rng() % 3, 3,
                                               std::vector{Aggregation::Mean, Aggregation::Sum, Aggregation::Max}[trial % 3]);
        auto relu = trrelu_to_relu(net);
        auto g = random_graph({"P", "Q"}, 1 + rng() % 6, rng);
        CHECK(Evaluator(relu).final_vectors(g) == Evaluator(net).final_vectors(g));
    }
    CHECK_THROWS(trrelu_to_relu(compile_rml_step(parse("<>{>1/2} P"))));
}

TEST_CASE("max compiler") {
    auto dp = compile_ml_max(parse("<>P"));
    auto g = make_graph({"P"}, {"v", "u", "leaf"}, {{"v", "u"}}, {{"u", {"P"}}});
    CHECK(classify(dp, g, "v"));
    CHECK_FALSE(classify(dp, g, "leaf"));
    CHECK(classify(compile_ml_max(parse("!<>P")), g, "leaf"));
    CHECK(dp.layers[0].agg == Aggregation::Max);
    CHECK_THROWS(compile_ml_max(parse("<>{>=2} P")));
    std::mt19937_64 rng(71);
    for (int i = 0; i < 30; ++i) {
        Formula f = random_formula(rng, Frag::ML, 3, {"P", "Q"});
        agrees_on_random(compile_ml_max(f, {"P", "Q"}), f, {"P", "Q"}, rng, 20, 8);
    }
}

TEST_CASE("sum compiler") {
    auto net = compile_gml_sum(parse("<>{>=2} P"));
    auto two = make_graph({"P"}, {"v", "a", "b", "c"}, {{"v", "a"}, {"v", "b"}, {"v", "c"}},
                          {{"a", {"P"}}, {"b", {"P"}}});
    auto one = make_graph({"P"}, {"v", "a", "c"}, {{"v", "a"}, {"v", "c"}}, {{"a", {"P"}}});
    CHECK(value(Evaluator(net).final_vectors(two)[0][1]) == Rational(1));
    CHECK(value(Evaluator(net).final_vectors(one)[0][1]) == Rational(0));
    CHECK(net.layers[0].simple().b[1] == Scalar(Rational(-1)));
    std::mt19937_64 rng(73);
    for (int i = 0; i < 30; ++i) {
        Formula f = random_formula(rng, Frag::GML, 3, {"P", "Q"});
        agrees_on_random(compile_gml_sum(f, {"P", "Q"}), f, {"P", "Q"}, rng, 20, 8);
    }
    // <>{>=1} behaves like <>
    auto g1 = compile_gml_sum(parse("<>{>=1} P"));
    auto d = compile_ml_max(parse("<>P"));
    for (int i = 0; i < 30; ++i) {
        auto g = random_graph({"P"}, 1 + rng() % 6, rng);
        CHECK(classify_all(g1, g) == classify_all(d, g));
    }
}

TEST_CASE("afml trrelu gadget and constants") {
    auto net = compile_afml_trrelu(parse("<>P & <>Q"));
    std::size_t conj_ch = 0;
    for (std::size_t k = 0; k < net.channel_names.size(); ++k)
        if (net.channel_names[k] == print(parse("<>P & <>Q"))) conj_ch = k;
    // successors: two P, one Q, one unlabeled -> (1/2, 1/4)
    auto g = make_graph({"P", "Q"}, {"v", "a", "b", "c", "d"}, {{"v", "a"}, {"v", "b"}, {"v", "c"}, {"v", "d"}},
                        {{"a", {"P"}}, {"b", {"P"}}, {"c", {"Q"}}});
    CHECK(value(Evaluator(net).final_vectors(g)[0][conj_ch]) == Rational(1, 2));
    // (0, 7/10)
    LabeledDigraph h({"P", "Q"});
    h.add_vertex("v");
    for (int i = 0; i < 10; ++i) {
        h.add_vertex("u" + std::to_string(i), i < 7 ? 2u : 0u);
        h.add_edge("v", "u" + std::to_string(i));
    }
    CHECK(value(Evaluator(net).final_vectors(h)[0][conj_ch]) == Rational(0));

    auto bb = compile_afml_trrelu(parse("[]false"));
    auto leafy = make_graph({}, {"leaf", "v"}, {{"v", "leaf"}});
    CHECK(classify(bb, leafy, "leaf"));
    CHECK_FALSE(classify(bb, leafy, "v"));
    auto dt = compile_afml_trrelu(parse("<>true"));
    CHECK_FALSE(classify(dt, leafy, "leaf"));
    CHECK(classify(dt, leafy, "v"));
    CHECK_THROWS(compile_afml_trrelu(parse("<>P & []Q")));
}

TEST_CASE("afml trrelu truth encoding") {
    std::mt19937_64 rng(79);
    const std::vector<std::string> ab = {"P", "Q"};
    for (int i = 0; i < 30; ++i) {
        bool first = i % 2 == 0;
        Formula f = random_formula(rng, first ? Frag::AFML1 : Frag::AFML2, 3, ab);
        auto net = compile_afml_trrelu(f, ab);
        agrees_on_random(net, f, ab, rng, 15, 8);
        if (!first) continue;
        const std::size_t L = (net.layers[0].out_dim() - 1) / 3;
        Evaluator ev(net);
        for (int j = 0; j < 5; ++j) {
            auto g = random_graph(ab, 1 + rng() % 7, rng);
            auto tr = ev.trace(g);
            for (std::size_t k = 0; k < L; ++k) {
                auto truth = check_all(g, parse(net.channel_names[k]));
                for (std::size_t l = 2 * (k + 1); l < tr.layers.size(); ++l)
                    for (VertexIndex v = 0; v < g.size(); ++v) {
                        Rational x = value(tr.layers[l][v][k]);
                        if (truth[v]) CHECK((x > Rational(0) && x <= Rational(1)));
                        else CHECK(x == Rational(0));
                    }
            }
        }
    }
}

TEST_CASE("sigmoid gadget") {
    using namespace gadget;
    CHECK(std::abs(e_min() - (-2.0 / (1.0 + std::exp(-0.5)))) < 1e-15);
    CHECK(std::abs(e_min() + 1.24492) < 1e-5);
    CHECK(tau(0.0) == doctest::Approx(e_min()).epsilon(1e-15));
    for (int i = 1; i <= 100; ++i) {
        double x = i / 25.0;
        CHECK(tau(x) == tau(-x));
        CHECK(tau(x) > tau(0.0));
    }
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            double x = i / 99.0, y = j / 99.0;
            double a = alpha(x, y);
            if (std::abs(x - 0.5) < 1e-12 || std::abs(y - 0.5) < 1e-12) CHECK(std::abs(a) < 1e-15);
            else CHECK(a > 0);
        }
    CHECK(alpha(0.5, 0.9) == doctest::Approx(0.0));
    CHECK(alpha(0.9, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("sigmoid compiler") {
    auto textbook = compile_afml_sigmoid(parse("[]false"), {}, 1, 1);
    auto g = make_graph({}, {"leaf", "v"}, {{"v", "leaf"}});
    auto out = Evaluator(textbook).final_vectors(g);
    const auto root = textbook.cls.index;
    CHECK(out[0][root].to_double() == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
    CHECK(std::abs(out[0][root].to_double() - 0.62246) < 1e-5);
    CHECK(out[1][root].to_double() == 0.5);
    CHECK(classify(textbook, g, "leaf"));
    CHECK_FALSE(classify(textbook, g, "v"));
    CHECK(gnn_domain(textbook) == Domain::Float);

    std::mt19937_64 rng(83);
    const std::vector<std::string> ab = {"P"};
    for (int i = 0; i < 20; ++i) {
        Formula f = random_formula(rng, i % 2 ? Frag::AFML2 : Frag::AFML1, 3, ab);
        agrees_on_random(compile_afml_sigmoid(f, ab), f, ab, rng, 10, 6);
    }
}

TEST_CASE("step compiler") {
    auto dp = compile_rml_step(parse("<>{>0/1} P"));
    auto g = make_graph({"P"}, {"v", "a", "b", "w"}, {{"v", "a"}, {"v", "b"}, {"w", "b"}}, {{"a", {"P"}}});
    CHECK(classify(dp, g, "v"));
    CHECK_FALSE(classify(dp, g, "w"));
    CHECK_FALSE(classify(compile_rml_step(parse("<>{>1/2} P")), g, "v"));
    CHECK(rewrite_geq_as_strict_dual(parse("<>{>=1/2} P")) == parse("!<>{>1/2} !P"));
    CHECK(dp.layers[0].simple().activation == Activation::Step);
    std::mt19937_64 rng(89);
    for (int i = 0; i < 30; ++i) {
        Formula f = random_formula(rng, Frag::RML, 3, {"P", "Q"});
        agrees_on_random(compile_rml_step(f, {"P", "Q"}), f, {"P", "Q"}, rng, 20, 8);
    }
}

TEST_CASE("irrational compiler") {
    auto g = make_graph({"P"}, {"v", "w", "x"}, {{"v", "w"}, {"v", "x"}}, {{"w", {"P"}}, {"v", {"P"}}});
    auto p = compile_ml_irrational(parse("P"));
    CHECK(Evaluator(p).final_vectors(g)[0][0] == Scalar(QuadExt::sqrt2()));
    CHECK(classify(p, g, "v"));
    auto np = compile_ml_irrational(parse("!P"));
    auto vals = Evaluator(np).final_vectors(g);
    CHECK(vals[0][1].as<QuadExt>() == QuadExt(Rational(0)));
    CHECK_FALSE(classify(np, g, "v"));
    auto dp = compile_ml_irrational(parse("<>P"));
    auto dv = Evaluator(dp).final_vectors(g)[0][1].as<QuadExt>();
    CHECK(dv == QuadExt(Rational(0), Rational(1, 2)));
    CHECK(classify(dp, g, "v"));
    CHECK(gnn_domain(dp) == Domain::Quad);

    std::mt19937_64 rng(97);
    for (int i = 0; i < 15; ++i) {
        Formula f = random_formula(rng, Frag::ML, 2, {"P"});
        auto net = compile_ml_irrational(f, {"P"});
        agrees_on_random(net, f, {"P"}, rng, 10, 5);
    }
}

TEST_CASE("negation oracle") {
    NegationOracle o;
    QuadExt a(Rational(0)), b = QuadExt::sqrt2();
    CHECK(o.query(a) == b);
    CHECK(o.query(b) == a);
    std::mt19937_64 rng(101);
    std::vector<QuadExt> asked;
    for (int i = 0; i < 60; ++i) {
        QuadExt x = (i % 2) ? NegationOracle::f_element(rng() % 40) : NegationOracle::t_element(rng() % 40);
        QuadExt y = o.query(x);
        CHECK(NegationOracle::in_f(x) != NegationOracle::in_f(y));
        CHECK(o.query(y) == x);
        asked.push_back(x);
    }
    std::string why;
    CHECK_MESSAGE(o.check_invariants(&why), why);
    for (const auto& x : asked)
        for (const auto& y : asked)
            if (x < y) CHECK(o.query(y) < o.query(x));
    for (std::size_t n = 0; n < 50; ++n) {
        CHECK(NegationOracle::in_f(NegationOracle::f_element(n)));
        CHECK(NegationOracle::in_t(NegationOracle::t_element(n)));
        CHECK(NegationOracle::f_element(n) >= a);
        CHECK(NegationOracle::t_element(n) <= b);
    }
    CHECK_THROWS(o.query(QuadExt(Rational(2))));
    CHECK_THROWS(o.query(QuadExt(Rational(1), Rational(-1, 4))));
}

TEST_CASE("compile by name") {
    Formula f = parse("<>{>1/2} P");
    CHECK(compile_named(f, "rml", "step", 0).layers[0].simple().activation == Activation::Step);
    CHECK(compile_named(f, "rml", "relu", 3).layers[0].simple().activation == Activation::Relu);
    CHECK_THROWS(compile_named(f, "rml", "trrelu", 0));
    CHECK(compile_named(parse("<>P"), "ml", "trrelu", 0).layers[0].agg == Aggregation::Max);
    CHECK(gnn_domain(compile_named(parse("<>P"), "ml", "irrational", 0)) == Domain::Quad);
    CHECK(compile_named(parse("<>{>=2} P"), "gml", "trrelu", 0).layers[0].agg == Aggregation::Sum);
    CHECK(gnn_domain(compile_named(parse("<>P"), "afml", "sigmoid", 0)) == Domain::Float);
    CHECK_THROWS(compile_named(f, "gml", "sigmoid", 0));
    CHECK_THROWS(compile_named(f, "fol", "trrelu", 0));
}
