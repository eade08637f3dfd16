#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modalnet/formula.hpp"
#include "modalnet/gnn.hpp"

namespace modalnet {

using Side = std::variant<Formula, Gnn>;

struct Counterexample {
    PointedGraph graph;
    bool lhs = false;
    bool rhs = false;
};

struct Verdict {
    enum class Status { Equivalent, Counterexample, GuardExceeded };
    Status status = Status::Equivalent;
    std::optional<Counterexample> counterexample;
    std::uint64_t graphs_checked = 0;  // pointed graphs
    double elapsed_seconds = 0;
    // Float networks only. margin: least distance from the threshold on the
    // strict side of the classifier (accepted for '>', rejected for '>=').
    // boundary: largest distance on the other side, which should sit at the threshold.
    std::optional<double> min_margin;
    std::optional<double> boundary_deviation;
    std::string message;

    bool equivalent() const { return status == Status::Equivalent; }
};

struct VerifyOptions {
    std::size_t max_labels = 2;      // exhaustive guard
    std::size_t max_size = 3;        // exhaustive guard
    double float_margin = 1e-9;      // float equivalence needs min_margin above this
};

// Every pointed graph with 1..n vertices over the alphabet, in enumeration order.
Verdict equiv_exhaustive(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t n,
                         const VerifyOptions& opts = {});
// `trials` random graphs with 1..max_size vertices (every vertex a point).
Verdict equiv_random(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t max_size,
                     std::size_t trials, std::uint64_t seed, const VerifyOptions& opts = {});
// Runs both and merges the verdicts (exhaustive first).
Verdict equiv_corpus(const Side& lhs, const Side& rhs, const std::vector<std::string>& alphabet, std::size_t n,
                     std::size_t random_max_size, std::size_t trials, std::uint64_t seed, const VerifyOptions& opts = {});
// On an explicit list of graphs.
Verdict equiv_on(const Side& lhs, const Side& rhs, const std::vector<LabeledDigraph>& graphs,
                 const VerifyOptions& opts = {});

bool side_accepts(const Side& s, const PointedGraph& g);

enum class InvarianceKind { Scaling, Unraveling };
struct Invariance {
    InvarianceKind kind = InvarianceKind::Scaling;
    std::size_t c = 2;
};

// Scaling: every layer vector at each copy (v,i) equals the one at v (MEAN only).
// Unraveling: layer l at the root of unravel(g, v, L) equals layer l at v, l <= L.
bool check_invariance(const Gnn& gnn, const PointedGraph& g, Invariance inv);

struct PerturbationRow {
    std::size_t c = 0;
    std::vector<double> distances;
    double median = 0;
    double max = 0;
};

struct PerturbationReport {
    std::size_t n = 0;
    std::vector<PerturbationRow> rows;
    // median at the largest scale <= median at the smallest; report-only
    std::optional<bool> soft_check;
};

PerturbationReport perturbation_experiment(const Gnn& gnn, const PointedGraph& g, std::size_t n,
                                           const std::vector<std::size_t>& scales, std::size_t trials,
                                           std::uint64_t seed);

enum class PipelineKind { Rml, Gml, Ml };
struct Pipeline {
    PipelineKind kind = PipelineKind::Rml;
    std::size_t n = 2;
};

// compile, extract, then compare against the formula. ML uses exhaustive <= 3
// plus 200 random graphs of size <= 8.
Verdict roundtrip(const Formula& phi, Pipeline p, std::vector<std::string> alphabet = {},
                  std::uint64_t seed = 1);

nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json perturbation_to_json(const PerturbationReport& r);
std::string to_string(Verdict::Status s);

}  // namespace modalnet
