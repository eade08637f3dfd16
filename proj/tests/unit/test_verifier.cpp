#include <doctest.h>

#include <cmath>

#include <modalnet/compiler.hpp>
#include <modalnet/extractor.hpp>
#include <modalnet/games.hpp>
#include <modalnet/verifier.hpp>

#include "helpers.hpp"

using namespace modalnet;
using testutil::make_graph;

namespace {

// v with p P-successors and q unlabeled successors
PointedGraph fan(std::size_t p, std::size_t q, const std::vector<std::string>& ab = {"P"}) {
    LabeledDigraph g(ab);
    g.add_vertex("v");
    for (std::size_t i = 0; i < p + q; ++i) {
        std::string id = "u" + std::to_string(i);
        g.add_vertex(id, i < p ? 1u : 0u);
        g.add_edge("v", id);
    }
    return PointedGraph(g, "v");
}

}  // namespace

TEST_CASE("exhaustive equivalence counts pointed graphs") {
    auto v = equiv_exhaustive(compile_ml_max(parse("<>P")), parse("<>P"), {"P"}, 2);
    CHECK(v.equivalent());
    CHECK(v.graphs_checked == 132);
    auto r = equiv_exhaustive(parse("<>{>1/3} P"), parse("<>{>1/3} P"), {"P"}, 3);
    CHECK(r.equivalent());
}

TEST_CASE("counterexamples replay") {
    Formula lhs = parse("<>{>=1/2} P"), rhs = parse("<>{>=1} P");
    auto v = equiv_exhaustive(lhs, rhs, {"P"}, 2);
    REQUIRE(v.status == Verdict::Status::Counterexample);
    REQUIRE(v.counterexample);
    const auto& cx = *v.counterexample;
    CHECK(cx.lhs);
    CHECK_FALSE(cx.rhs);
    CHECK(cx.graph.graph.successors(cx.graph.point).empty());
    CHECK(side_accepts(lhs, cx.graph) == cx.lhs);
    CHECK(side_accepts(rhs, cx.graph) == cx.rhs);
    auto again = equiv_exhaustive(lhs, rhs, {"P"}, 2);
    CHECK(graph_to_json(again.counterexample->graph) == graph_to_json(cx.graph));
    auto j = verdict_to_json(v);
    CHECK(j.at("status") == "counterexample");
    CHECK(j.contains("counterexample"));
}

TEST_CASE("random and explicit corpora") {
    Formula f = parse("<>(P & <>!P)");
    auto net = compile_ml_max(f);
    auto a = equiv_random(net, f, {"P"}, 8, 50, 9);
    CHECK(a.equivalent());
    CHECK(a.graphs_checked > 50);
    auto bad = equiv_random(parse("<>P"), parse("[]P"), {"P"}, 5, 50, 9);
    CHECK(bad.status == Verdict::Status::Counterexample);
    auto bad2 = equiv_random(parse("<>P"), parse("[]P"), {"P"}, 5, 50, 9);
    CHECK(graph_to_json(bad.counterexample->graph) == graph_to_json(bad2.counterexample->graph));
    auto on = equiv_on(parse("<>P"), parse("<>{>=1} P"), {testutil::fixture_a(), testutil::fixture_b1()});
    CHECK(on.equivalent());
    CHECK(on.graphs_checked == 7);
}

TEST_CASE("guards") {
    auto v = equiv_exhaustive(parse("P"), parse("P"), {"P"}, 4);
    CHECK(v.status == Verdict::Status::GuardExceeded);
    auto w = equiv_exhaustive(parse("P"), parse("P"), {"P", "Q", "R"}, 1);
    CHECK(w.status == Verdict::Status::GuardExceeded);
    VerifyOptions o;
    o.max_size = 4;
    CHECK(equiv_exhaustive(parse("true"), parse("[]false | <>true"), {}, 4, o).equivalent());
}

TEST_CASE("float verdicts report margins") {
    auto net = compile_afml_sigmoid(parse("<>P"));
    auto v = equiv_exhaustive(net, parse("<>P"), {"P"}, 2);
    CHECK(v.equivalent());
    REQUIRE(v.min_margin);
    REQUIRE(v.boundary_deviation);
    CHECK(*v.min_margin > 1e-6);
    CHECK(*v.boundary_deviation <= 1e-9);
}

TEST_CASE("scaling and unraveling invariance") {
    std::mt19937_64 rng(109);
    auto net = compile_rml_bounded(parse("<>{>1/2} (P | <>{>=1/3} P)"), 3);
    for (int i = 0; i < 10; ++i) {
        auto g = random_graph({"P"}, 1 + rng() % 5, rng, 0.4);
        PointedGraph pg(g, VertexIndex{0});
        CHECK(check_invariance(net, pg, {InvarianceKind::Scaling, 2}));
        CHECK(check_invariance(net, pg, {InvarianceKind::Scaling, 3}));
        CHECK(check_invariance(net, pg, {InvarianceKind::Unraveling, 0}));
        CHECK(check_invariance(compile_gml_sum(parse("<>{>=2} P")), pg, {InvarianceKind::Unraveling, 0}));
    }
    // SUM is not scale invariant: the guard refuses it, and the vectors really do move
    auto sum = compile_gml_sum(parse("<>{>=2} P"));
    auto g = make_graph({"P"}, {"v", "u"}, {{"v", "u"}}, {{"u", {"P"}}});
    CHECK_THROWS(check_invariance(sum, PointedGraph(g, "v"), {InvarianceKind::Scaling, 2}));
    auto h = scale(g, 2);
    auto base = Evaluator(sum).final_vectors(g)[g.index("v")];
    auto scaled = Evaluator(sum).final_vectors(h)[h.index(scaled_id("v", 1))];
    CHECK_FALSE(base == scaled);
}

TEST_CASE("perturbation experiment") {
    std::mt19937_64 rng(113);
    auto net = testutil::random_simple_gnn(rng, 1, 2, 2, Aggregation::Mean);
    auto g = make_graph({"P"}, {"v", "a", "b"}, {{"v", "a"}, {"v", "b"}, {"a", "b"}}, {{"a", {"P"}}});
    auto rep = perturbation_experiment(net, PointedGraph(g, "v"), 2, {2, 8, 64}, 20, 5);
    REQUIRE(rep.rows.size() == 3);
    for (const auto& row : rep.rows) {
        CHECK(row.distances.size() == 20);
        for (double d : row.distances) CHECK((d >= 0 && std::isfinite(d)));
        CHECK(row.max >= row.median);
    }
    CHECK(rep.soft_check.has_value());
    auto zero = perturbation_experiment(net, PointedGraph(g, "v"), 0, {2}, 5, 5);
    for (double d : zero.rows[0].distances) CHECK(d == 0);
    CHECK_THROWS(perturbation_experiment(compile_rml_step(parse("<>{>1/2} P")), PointedGraph(g, "v"), 1, {2}, 1, 1));
    auto again = perturbation_experiment(net, PointedGraph(g, "v"), 2, {2, 8, 64}, 20, 5);
    CHECK(perturbation_to_json(again) == perturbation_to_json(rep));
}

TEST_CASE("round trips") {
    CHECK(roundtrip(parse("<>{>1/2} P"), {PipelineKind::Rml, 2}).equivalent());
    CHECK(roundtrip(parse("<>{>=2} P"), {PipelineKind::Gml, 3}).equivalent());
    CHECK(roundtrip(parse("<>P"), {PipelineKind::Ml, 0}).equivalent());
}

TEST_CASE("separation fixtures") {
    for (std::size_t c = 1; c <= 3; ++c) {
        auto a = fan(c, c), b = fan(c, c + 1);
        CHECK(check(a, parse("<>{>=1/2} P")));
        CHECK_FALSE(check(b, parse("<>{>=1/2} P")));
        for (std::size_t l = 0; l <= 3; ++l)
            CHECK(solve_game({GameKind::GML, c, l, a, b}).winner == Player::Duplicator);
    }
    // one of two vs one of three: the strict half diamond is false on both, the inclusive one separates
    auto two = fan(1, 1), three = fan(1, 2);
    CHECK_FALSE(check(two, parse("<>{>1/2} P")));
    CHECK_FALSE(check(three, parse("<>{>1/2} P")));
    CHECK(check(two, parse("<>{>=1/2} P")));
    CHECK_FALSE(check(three, parse("<>{>=1/2} P")));
    for (std::size_t l = 0; l <= 3; ++l) CHECK(solve_game({GameKind::ML, 1, l, two, three}).winner == Player::Duplicator);

    // one P-successor vs two: fractions agree, counts do not
    auto p1 = fan(1, 0), p2 = fan(2, 0);
    CHECK_FALSE(check(p1, parse("<>{>=2} P")));
    CHECK(check(p2, parse("<>{>=2} P")));
    std::mt19937_64 rng(127);
    for (int i = 0; i < 200; ++i) {
        Formula f = testutil::random_formula(rng, testutil::Frag::RML, 3, {"P"});
        CHECK(check(p1, f) == check(p2, f));
    }
}

TEST_CASE("more P1 than P2 successors") {
    Gnn g;
    g.input_dim = 2;
    g.alphabet = {"P1", "P2"};
    SimpleComb c(2, 1, Activation::Identity);
    c.A.at(0, 0) = Rational(1);
    c.A.at(1, 0) = Rational(-1);
    g.layers.push_back(Layer{Aggregation::Mean, c});
    g.cls = Classifier::threshold(0, true, Scalar(Rational(0)));
    std::uint64_t seen = 0;
    enumerate_unpointed({"P1", "P2"}, 1, 2, [&](const LabeledDigraph& h) {
        auto acc = classify_all(g, h);
        for (VertexIndex v = 0; v < h.size(); ++v) {
            int more = 0;
            for (auto u : h.successors(v)) more += int(h.has_label(u, 0)) - int(h.has_label(u, 1));
            CHECK(acc[v] == (more > 0));
            ++seen;
        }
        return true;
    });
    CHECK(seen == pointed_graph_count(1, 2) + pointed_graph_count(2, 2));
}
