#include <doctest.h>

#include <modalnet/compiler.hpp>
#include <modalnet/extractor.hpp>
#include <modalnet/verifier.hpp>

#include "helpers.hpp"

using namespace modalnet;

namespace {

Gnn constant_net(Aggregation agg, Rational bias) {
    Gnn g;
    g.input_dim = 1;
    g.alphabet = {"P"};
    SimpleComb c(1, 1, Activation::TrRelu);
    c.b[0] = bias;
    g.layers.push_back(Layer{agg, c});
    g.cls = Classifier::threshold(0, true, Scalar(Rational(0)));
    return g;
}

// accepts iff exactly one successor carries P: trReLU(y) - trReLU(y - 1) over integer counts
Gnn exactly_one_net() {
    Gnn g;
    g.input_dim = 1;
    g.alphabet = {"P"};
    SimpleComb l1(1, 2, Activation::TrRelu);
    l1.A.at(0, 0) = Rational(1);
    l1.A.at(0, 1) = Rational(1);
    l1.b[1] = Rational(-1);
    SimpleComb l2(2, 1, Activation::TrRelu);
    l2.C.at(0, 0) = Rational(1);
    l2.C.at(1, 0) = Rational(-1);
    g.layers = {Layer{Aggregation::Sum, l1}, Layer{Aggregation::Sum, l2}};
    g.cls = Classifier::threshold(0, true, Scalar(Rational(0)));
    return g;
}

bool same_on(const Side& a, const Side& b, std::size_t n) {
    return equiv_exhaustive(a, b, {"P"}, n).equivalent();
}

}  // namespace

TEST_CASE("realizable feature spaces") {
    auto net = compile_rml_bounded(parse("<>{>1/2} P"), 2);
    auto fs = feature_space_bounded(net, 2);
    REQUIRE(fs.layers.size() == 3);
    CHECK(fs.layers[1].size() <= 4);
    for (const auto& x : fs.layers[1])
        for (const auto& s : x) CHECK((s == Scalar(Rational(0)) || s == Scalar(Rational(1))));
    CHECK(fs.layers[0].size() == 2);
    for (const auto& x : fs.layers[0]) {
        CHECK((x[0] == Scalar(Rational(0)) || x[0] == Scalar(Rational(1))));
        CHECK(x[1] == Scalar(Rational(0)));
    }
}

TEST_CASE("max overapproximation is a finite superset") {
    auto net = compile_ml_max(parse("<>P & []!P | P"));
    auto over = feature_space_bounded(net, 0, FeatureMode::Overapprox);
    auto real = feature_space_bounded(net, 3);
    REQUIRE(over.layers.size() == real.layers.size());
    for (std::size_t l = 0; l < real.layers.size(); ++l)
        for (const auto& x : real.layers[l]) CHECK(over.contains(l, x));
    CHECK_THROWS(feature_space_bounded(compile_rml_bounded(parse("<>{>1/2} P"), 2), 0, FeatureMode::Overapprox));
}

TEST_CASE("mean extraction") {
    auto net = compile_rml_bounded(parse("<>{>1/2} P"), 2);
    Formula psi = extract_rml(net, 2);
    CHECK(in_rml(psi));
    CHECK(same_on(net, psi, 2));

    Formula rej = extract_rml(constant_net(Aggregation::Mean, Rational(0)), 2);
    CHECK(same_on(rej, bottom(), 2));
    Formula acc = extract_rml(constant_net(Aggregation::Mean, Rational(1)), 2);
    CHECK(same_on(acc, top(), 2));

    Gnn id = constant_net(Aggregation::Mean, Rational(0));
    id.layers[0].simple().C.at(0, 0) = Rational(1);
    CHECK(same_on(extract_rml(id, 2), atom("P"), 2));

    ExtractionTrace tr;
    extract_rml(net, 2, {}, &tr);
    CHECK(!tr.disjuncts.empty());
    CHECK(tr.space.n == 2);
}

TEST_CASE("sum extraction") {
    auto net = compile_gml_sum(parse("<>{>=2} P"));
    Formula psi = extract_gml(net, 3);
    CHECK(in_gml(psi));
    CHECK(same_on(net, psi, 3));
    CHECK(same_on(extract_gml(constant_net(Aggregation::Sum, Rational(1)), 2), top(), 2));
    auto one = exactly_one_net();
    Formula e = extract_gml(one, 3);
    CHECK(same_on(e, parse("<>{=1} P"), 3));
    CHECK(same_on(one, parse("<>{=1} P"), 3));
}

TEST_CASE("max extraction is uniform") {
    std::mt19937_64 rng(103);
    for (const char* s : {"<>P", "[](P | <>P)", "!<>!P & <>P"}) {
        Formula f = parse(s);
        auto net = compile_ml_max(f, {"P"});
        Formula psi = extract_ml(net);
        CHECK(in_ml(psi));
        CHECK(same_on(psi, f, 3));
        auto v = equiv_random(psi, f, {"P"}, 8, 100, rng());
        CHECK(v.equivalent());
    }
    // a net that ignores aggregation yields a formula without diamonds
    Gnn own = constant_net(Aggregation::Max, Rational(0));
    own.layers[0].simple().C.at(0, 0) = Rational(1);
    ExtractOptions o;
    o.simplify = true;
    Formula psi = extract_ml(own, o);
    CHECK(modal_depth(psi) == 0);
    CHECK(same_on(psi, atom("P"), 3));
}

TEST_CASE("extractors reject the wrong aggregation") {
    CHECK_THROWS(extract_rml(compile_ml_max(parse("<>P")), 2));
    CHECK_THROWS(extract_gml(compile_rml_bounded(parse("<>{>1/2} P"), 2), 2));
    CHECK_THROWS(extract_ml(compile_gml_sum(parse("<>{>=2} P"))));
}

TEST_CASE("random mean and sum nets round trip") {
    std::mt19937_64 rng(107);
    for (int i = 0; i < 6; ++i) {
        auto mean = testutil::random_simple_gnn(rng, 1, 1 + i % 2, 2, Aggregation::Mean);
        mean.alphabet = {"P"};
        CHECK(same_on(mean, extract_rml(mean, 2), 2));
        auto sum = testutil::random_simple_gnn(rng, 1, 1 + i % 2, 2, Aggregation::Sum);
        sum.alphabet = {"P"};
        CHECK(same_on(sum, extract_gml(sum, 2), 2));
    }
}
