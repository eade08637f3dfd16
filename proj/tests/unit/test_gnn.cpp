#include <doctest.h>

#include <cmath>

#include <modalnet/compiler.hpp>

#include "helpers.hpp"

using namespace modalnet;
using testutil::make_graph;

namespace {

Gnn one_layer(Aggregation agg, const std::vector<std::vector<Rational>>& C, const std::vector<std::vector<Rational>>& A,
              const std::vector<Rational>& b, Activation act = Activation::Identity) {
    Gnn g;
    g.input_dim = C.size();
    SimpleComb c(C.size(), b.size(), act);
    for (std::size_t i = 0; i < C.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            c.C.at(i, j) = C[i][j];
            c.A.at(i, j) = A[i][j];
        }
    for (std::size_t j = 0; j < b.size(); ++j) c.b[j] = b[j];
    g.layers.push_back(Layer{agg, c});
    g.cls = Classifier::threshold(0, true, Scalar(Rational(0)));
    return g;
}

// aggregated value of channel 0 at vertex v
Scalar agg_value(Aggregation agg, const LabeledDigraph& g, const std::string& v) {
    auto net = one_layer(agg, {{0}}, {{1}}, {0});
    return evaluate(net, g).layers[1][g.index(v)][0];
}

}  // namespace

TEST_CASE("initial features") {
    auto g = make_graph({"P", "Q"}, {"v", "w", "x"}, {}, {{"v", {"Q"}}, {"x", {"P", "Q"}}});
    CHECK(initial_features(g, "v", 3) == Vector{0, 1, 0});
    CHECK(initial_features(g, "w", 2) == Vector{0, 0});
    CHECK(initial_features(g, "x", 2) == Vector{1, 1});
    CHECK_THROWS(initial_features(g, "v", 1));
}

TEST_CASE("aggregation on small graphs") {
    auto g = make_graph({"P"}, {"v", "a", "b", "c", "leaf"}, {{"v", "a"}, {"v", "b"}, {"v", "c"}},
                        {{"a", {"P"}}, {"b", {"P"}}});
    CHECK(agg_value(Aggregation::Mean, g, "v") == Scalar(Rational(2, 3)));
    CHECK(agg_value(Aggregation::Sum, g, "v") == Scalar(Rational(2)));
    CHECK(agg_value(Aggregation::Max, g, "v") == Scalar(Rational(1)));
    for (auto agg : {Aggregation::Mean, Aggregation::Sum, Aggregation::Max})
        CHECK(agg_value(agg, g, "leaf") == Scalar(Rational(0)));
}

TEST_CASE("classifier boundaries") {
    CHECK_FALSE(classify_vector(Classifier::threshold(0, true, Scalar(Rational(0))), {Scalar(Rational(0))}));
    CHECK(classify_vector(Classifier::threshold(0, false, Scalar(Rational(0))), {Scalar(Rational(0))}));
    CHECK(classify_vector(Classifier::irrational(0), {Scalar(QuadExt::sqrt2())}));
    CHECK_FALSE(classify_vector(Classifier::irrational(0), {Scalar(QuadExt(Rational(3, 2)))}));
    CHECK_FALSE(classify_vector(Classifier::irrational(0), {Scalar(QuadExt(Rational(0), Rational(-1)))}));
    CHECK(classify_vector(Classifier::threshold(1, true, Scalar(0.5)), {Scalar(0.0), Scalar(0.5000001)}));
}

TEST_CASE("activations stay rational") {
    auto d = Domain::Rational;
    CHECK(apply_activation(Activation::TrRelu, Rational(3, 2), d) == Scalar(Rational(1)));
    CHECK(apply_activation(Activation::TrRelu, Rational(-3, 10), d) == Scalar(Rational(0)));
    CHECK(apply_activation(Activation::TrRelu, Rational(2, 5), d) == Scalar(Rational(2, 5)));
    CHECK(apply_activation(Activation::Relu, Rational(7, 3), d) == Scalar(Rational(7, 3)));
    CHECK(apply_activation(Activation::Step, Rational(0), d) == Scalar(Rational(0)));
    CHECK(apply_activation(Activation::Step, Rational(1, 100), d) == Scalar(Rational(1)));
    CHECK(std::abs(apply_activation(Activation::Sigmoid, 0.0, Domain::Float).to_double() - 0.5) < 1e-15);
}

TEST_CASE("mean and sum commute with linear maps, max does not") {
    std::mt19937_64 rng(41);
    // one layer scaling by A after aggregation vs a layer scaling by A before it
    for (auto agg : {Aggregation::Mean, Aggregation::Sum}) {
        for (int trial = 0; trial < 50; ++trial) {
            auto g = random_graph({"P", "Q"}, 1 + rng() % 6, rng, 0.4);
            Rational a00 = testutil::random_rational(rng), a01 = testutil::random_rational(rng);
            Rational a10 = testutil::random_rational(rng), a11 = testutil::random_rational(rng);
            auto after = one_layer(agg, {{0, 0}, {0, 0}}, {{a00, a01}, {a10, a11}}, {0, 0});
            auto first = one_layer(agg, {{a00, a01}, {a10, a11}}, {{0, 0}, {0, 0}}, {0, 0});
            auto pass = one_layer(agg, {{0, 0}, {0, 0}}, {{1, 0}, {0, 1}}, {0, 0});
            Gnn before = first;
            before.layers.push_back(pass.layers[0]);
            auto x = Evaluator(after).final_vectors(g), y = Evaluator(before).final_vectors(g);
            CHECK(x == y);
        }
    }
    // successors with values 0 and 1, A = (-1)
    auto g = make_graph({"P"}, {"v", "a", "b"}, {{"v", "a"}, {"v", "b"}}, {{"b", {"P"}}});
    auto after = one_layer(Aggregation::Max, {{0}}, {{-1}}, {0});
    auto first = one_layer(Aggregation::Max, {{-1}}, {{0}}, {0});
    auto pass = one_layer(Aggregation::Max, {{0}}, {{1}}, {0});
    Gnn before = first;
    before.layers.push_back(pass.layers[0]);
    CHECK(Evaluator(after).final_vectors(g)[0][0] == Scalar(Rational(-1)));
    CHECK(Evaluator(before).final_vectors(g)[0][0] == Scalar(Rational(0)));
}

TEST_CASE("evaluation is reproducible") {
    std::mt19937_64 rng(43);
    auto net = testutil::random_simple_gnn(rng, 2, 3, 3, Aggregation::Mean);
    auto g = random_graph({"P", "Q"}, 7, rng, 0.4);
    auto a = evaluate(net, g), b = evaluate(net, g);
    CHECK(a.layers == b.layers);
    CHECK(a.accepted == b.accepted);
    for (const auto& v : a.layers[0])
        for (const auto& x : v) CHECK((x == Scalar(Rational(0)) || x == Scalar(Rational(1))));
}

TEST_CASE("gnn json round trip") {
    std::mt19937_64 rng(47);
    for (auto agg : {Aggregation::Mean, Aggregation::Sum, Aggregation::Max}) {
        auto net = testutil::random_simple_gnn(rng, 2, 2, 2, agg);
        auto back = gnn_from_json(gnn_to_json(net));
        CHECK(gnn_to_json(back) == gnn_to_json(net));
        auto g = random_graph({"P", "Q"}, 5, rng);
        CHECK(Evaluator(back).final_vectors(g) == Evaluator(net).final_vectors(g));
    }
    auto irr = compile_ml_irrational(parse("<>!P"));
    auto j = gnn_to_json(irr);
    auto back = gnn_from_json(j);
    auto g = make_graph({"P"}, {"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"c", "c"}}, {{"b", {"P"}}});
    CHECK(classify_all(back, g) == classify_all(irr, g));
    CHECK(classify_all(back, g) == check_all(g, parse("<>!P")));
    auto bad = gnn_to_json(compile_ml_max(parse("<>P")));
    bad["cls"]["index"] = 99;
    CHECK_THROWS(gnn_from_json(bad));
}

TEST_CASE("dimension mismatches are rejected") {
    Gnn g = one_layer(Aggregation::Mean, {{1}}, {{1}}, {0});
    g.input_dim = 2;
    CHECK_THROWS(g.validate());
    Gnn h = one_layer(Aggregation::Mean, {{1}}, {{1}}, {0});
    h.cls.index = 3;
    CHECK_THROWS(h.validate());
}

TEST_CASE("collapse on depth-2 trees") {
    std::mt19937_64 rng(53);
    auto compiled = compile_rml_bounded(parse("<>{>1/2} <>{>1/2} P"), 4);
    auto collapsed = collapse_depth2_trees(compiled);
    CHECK(collapsed.layers.size() == 2);

    // root -> two middles -> leaves
    auto t = make_graph({"P"}, {"r", "m1", "m2", "l1", "l2", "l3"},
                        {{"r", "m1"}, {"r", "m2"}, {"m1", "l1"}, {"m1", "l2"}, {"m2", "l3"}},
                        {{"l1", {"P"}}, {"l2", {"P"}}, {"l3", {"P"}}});
    CHECK(Evaluator(collapsed).final_vectors(t)[0] == Evaluator(compiled).final_vectors(t)[0]);
    CHECK(classify(collapsed, t, "r") == classify(compiled, t, "r"));
    CHECK(classify(compiled, t, "r"));

    auto single = make_graph({"P"}, {"r"}, {});
    CHECK(classify(collapsed, single, "r") == classify(compiled, single, "r"));

    for (int trial = 0; trial < 40; ++trial) {
        auto net = testutil::random_simple_gnn(rng, 1, 1 + rng() % 3, 2, Aggregation::Mean);
        auto col = collapse_depth2_trees(net);
        auto tree = testutil::random_depth2_tree(rng);
        CHECK(Evaluator(col).final_vectors(tree)[0] == Evaluator(net).final_vectors(tree)[0]);
    }
    CHECK_THROWS(collapse_depth2_trees(compile_ml_max(parse("<>P"))));
}
