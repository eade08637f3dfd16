#include "modalnet/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "modalnet/compiler.hpp"
#include "modalnet/extractor.hpp"

namespace modalnet {

namespace {

class Decider {
public:
    explicit Decider(const Side& s) {
        if (auto f = std::get_if<Formula>(&s)) impl_.emplace<FormulaEvaluator>(*f);
        else impl_.emplace<Evaluator>(std::get<Gnn>(s));
    }

    std::vector<bool> decide(const LabeledDigraph& g, Verdict& v) const {
        if (auto f = std::get_if<FormulaEvaluator>(&impl_)) return f->check_all(g);
        const auto& ev = std::get<Evaluator>(impl_);
        if (ev.domain() != Domain::Float) return ev.classify_all(g);
        const Classifier& cls = ev.gnn().cls;
        std::vector<bool> out;
        for (const auto& x : ev.final_vectors(g)) {
            bool acc = classify_vector(cls, x);
            out.push_back(acc);
            double d = std::abs(x.at(cls.index).to_double() - cls.constant.to_double());
            if (acc == cls.strict) v.min_margin = std::min(v.min_margin.value_or(INFINITY), d);
            else v.boundary_deviation = std::max(v.boundary_deviation.value_or(0.0), d);
        }
        return out;
    }

private:
    std::variant<std::monostate, FormulaEvaluator, Evaluator> impl_;
};

class Run {
public:
    Run(const Side& lhs, const Side& rhs) : l_(lhs), r_(rhs), start_(std::chrono::steady_clock::now()) {}

    // false once a counterexample is found
    bool visit(const LabeledDigraph& g) {
        auto a = l_.decide(g, v_);
        auto b = r_.decide(g, v_);
        for (VertexIndex p = 0; p < g.size(); ++p) {
            ++v_.graphs_checked;
            if (a[p] != b[p]) {
                v_.status = Verdict::Status::Counterexample;
                v_.counterexample = Counterexample{PointedGraph(g, p), a[p], b[p]};
                return false;
            }
        }
        return true;
    }

    Verdict finish(const VerifyOptions& opts) {
        v_.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (v_.equivalent() && v_.min_margin && *v_.min_margin <= opts.float_margin) {
            v_.status = Verdict::Status::GuardExceeded;
            v_.message = "float decision margin " + std::to_string(*v_.min_margin) + " is not above " +
                         std::to_string(opts.float_margin);
        }
        return v_;
    }

private:
    Decider l_, r_;
    Verdict v_;
    std::chrono::steady_clock::time_point start_;
};

Verdict guard(const std::string& why) {
    Verdict v;
    v.status = Verdict::Status::GuardExceeded;
    v.message = why;
    return v;
}

double median(std::vector<double> xs) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2;
}

}  // namespace

std::string to_string(Verdict::Status s) {
    switch (s) {
        case Verdict::Status::Equivalent: return "equivalent";
        case Verdict::Status::Counterexample: return "counterexample";
        case Verdict::Status::GuardExceeded: return "guard-exceeded";
    }
    return "?";
}

Verdict equiv_exhaustive(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t n,
                         const VerifyOptions& opts) {
    if (alphabet.size() > opts.max_labels)
        return guard("exhaustive check over " + std::to_string(alphabet.size()) + " labels exceeds the guard of " +
                     std::to_string(opts.max_labels));
    if (n > opts.max_size)
        return guard("exhaustive check up to size " + std::to_string(n) + " exceeds the guard of " +
                     std::to_string(opts.max_size));
    Run run(lhs, rhs);
    enumerate_unpointed(alphabet, 1, n, [&](const LabeledDigraph& g) { return run.visit(g); });
    return run.finish(opts);
}

Verdict equiv_random(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t max_size,
                     std::size_t trials, std::uint64_t seed, const VerifyOptions& opts) {
    if (max_size == 0) throw std::invalid_argument("random graphs need a positive size bound");
    Run run(lhs, rhs);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n = 1 + rng() % max_size;
        if (!run.visit(random_graph(alphabet, n, rng))) break;
    }
    return run.finish(opts);
}

Verdict equiv_corpus(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t n,
                     std::size_t random_max_size, std::size_t trials, std::uint64_t seed, const VerifyOptions& opts) {
    Verdict a = equiv_exhaustive(lhs, rhs, alphabet, n, opts);
    if (!a.equivalent()) return a;
    Verdict b = equiv_random(lhs, rhs, alphabet, random_max_size, trials, seed, opts);
    b.graphs_checked += a.graphs_checked;
    b.elapsed_seconds += a.elapsed_seconds;
    if (a.min_margin) b.min_margin = std::min(*a.min_margin, b.min_margin.value_or(INFINITY));
    if (a.boundary_deviation) b.boundary_deviation = std::max(*a.boundary_deviation, b.boundary_deviation.value_or(0.0));
    return b;
}

Verdict equiv_on(const Side& lhs, const Side& rhs, const std::vector<LabeledDigraph>& graphs, const VerifyOptions& opts) {
    Run run(lhs, rhs);
    for (const auto& g : graphs)
        if (!run.visit(g)) break;
    return run.finish(opts);
}

bool side_accepts(const Side& s, const PointedGraph& g) {
    Verdict scratch;
    return Decider(s).decide(g.graph, scratch).at(g.point);
}

bool check_invariance(const Gnn& gnn, const PointedGraph& g, Invariance inv) {
    Evaluator ev(gnn);
    auto base = ev.trace(g.graph);
    if (inv.kind == InvarianceKind::Scaling) {
        for (const auto& l : gnn.layers)
            if (l.agg != Aggregation::Mean) throw std::invalid_argument("scaling invariance applies to MEAN networks only");
        if (inv.c == 0) throw std::invalid_argument("scaling factor must be positive");
        LabeledDigraph h = scale(g.graph, inv.c);
        auto t = ev.trace(h);
        for (VertexIndex v = 0; v < g.graph.size(); ++v)
            for (std::size_t i = 1; i <= inv.c; ++i) {
                VertexIndex w = h.index(scaled_id(g.graph.id(v), i));
                for (std::size_t l = 0; l < t.layers.size(); ++l)
                    if (!(t.layers[l][w] == base.layers[l][v])) return false;
            }
        return true;
    }
    PointedGraph u = unravel(g.graph, g.point, gnn.layers.size());
    auto t = ev.trace(u.graph);
    for (std::size_t l = 0; l < t.layers.size(); ++l)
        if (!(t.layers[l][u.point] == base.layers[l][g.point])) return false;
    return true;
}

PerturbationReport perturbation_experiment(const Gnn& gnn, const PointedGraph& g, std::size_t n,
                                           const std::vector<std::size_t>& scales, std::size_t trials,
                                           std::uint64_t seed) {
    for (const auto& l : gnn.layers) {
        if (l.agg != Aggregation::Mean) throw std::invalid_argument("perturbation experiment needs a MEAN network");
        if (!l.is_simple()) throw std::invalid_argument("perturbation experiment needs simple combinations");
        if (l.simple().activation == Activation::Step)
            throw std::invalid_argument("perturbation experiment needs continuous activations; step is not");
    }
    Evaluator ev(gnn);
    PerturbationReport rep;
    rep.n = n;
    for (std::size_t c : scales) {
        LabeledDigraph h = scale(g.graph, c);
        const std::string point = scaled_id(g.point_id(), 1);
        Vector base = ev.final_vectors(h).at(h.index(point));
        PerturbationRow row;
        row.c = c;
        for (std::size_t t = 0; t < trials; ++t) {
            LabeledDigraph h2 = n_extend(h, n, seed + 1000003ull * c + t);
            Vector x = ev.final_vectors(h2).at(h2.index(point));
            double d = 0;
            for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i].to_double() - base[i].to_double()));
            row.distances.push_back(d);
        }
        row.median = median(row.distances);
        row.max = row.distances.empty() ? 0 : *std::max_element(row.distances.begin(), row.distances.end());
        rep.rows.push_back(std::move(row));
    }
    if (rep.rows.size() >= 2) {
        auto lo = std::min_element(rep.rows.begin(), rep.rows.end(), [](auto& a, auto& b) { return a.c < b.c; });
        auto hi = std::max_element(rep.rows.begin(), rep.rows.end(), [](auto& a, auto& b) { return a.c < b.c; });
        rep.soft_check = hi->median <= lo->median;
    }
    return rep;
}

Verdict roundtrip(const Formula& phi, Pipeline p, std::vector<std::string> alphabet, std::uint64_t seed) {
    if (alphabet.empty()) alphabet = atoms_of(phi);
    try {
        switch (p.kind) {
            case PipelineKind::Rml: {
                Formula psi = extract_rml(compile_rml_bounded(phi, static_cast<std::uint32_t>(p.n), alphabet), p.n);
                return equiv_exhaustive(phi, psi, alphabet, p.n);
            }
            case PipelineKind::Gml: {
                Formula psi = extract_gml(compile_gml_sum(phi, alphabet), p.n);
                return equiv_exhaustive(phi, psi, alphabet, p.n);
            }
            case PipelineKind::Ml: {
                Formula psi = extract_ml(compile_ml_max(phi, alphabet));
                return equiv_corpus(phi, psi, alphabet, 3, 8, 200, seed);
            }
        }
    } catch (const GuardExceeded& e) {
        return guard(e.what());
    }
    throw std::logic_error("unknown pipeline");
}

nlohmann::json verdict_to_json(const Verdict& v) {
    nlohmann::json j = {{"status", to_string(v.status)},
                        {"graphs_checked", v.graphs_checked},
                        {"elapsed_seconds", v.elapsed_seconds}};
    if (v.counterexample) {
        j["counterexample"] = graph_to_json(v.counterexample->graph);
        j["lhs"] = v.counterexample->lhs;
        j["rhs"] = v.counterexample->rhs;
    }
    if (v.min_margin) j["min_margin"] = *v.min_margin;
    if (v.boundary_deviation) j["boundary_deviation"] = *v.boundary_deviation;
    if (!v.message.empty()) j["message"] = v.message;
    return j;
}

nlohmann::json perturbation_to_json(const PerturbationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"c", row.c}, {"median", row.median}, {"max", row.max}, {"distances", row.distances}});
    nlohmann::json j = {{"n", r.n}, {"rows", rows}};
    if (r.soft_check) j["soft_check"] = *r.soft_check;
    return j;
}

}  // namespace modalnet
