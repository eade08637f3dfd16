#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "modalnet/formula.hpp"
#include "modalnet/gnn.hpp"

namespace modalnet {

// Raised when an enumeration would exceed its configured size guard.
class GuardExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FeatureMode { Realizable, Overapprox };

struct FeatureSpace {
    FeatureMode mode = FeatureMode::Realizable;
    std::size_t n = 0;                       // graph size bound (realizable mode)
    std::vector<std::string> alphabet;
    std::vector<std::vector<Vector>> layers;  // chi^0 .. chi^L, each sorted and unique

    bool contains(std::size_t layer, const Vector& x) const;
};

struct ExtractOptions {
    std::vector<std::string> alphabet;  // empty: the network's, else P1..Pd
    std::size_t max_vectors = 64;       // per layer
    std::size_t max_profiles = 200000;  // per layer
    std::size_t max_subset_vectors = 12;  // MAX: larger bases switch from subsets to distinct maxima
    std::size_t max_joins = 4096;         // MAX: distinct maxima per layer
    bool simplify = false;
};

// One disjunct of an extracted layer formula.
struct ExtractedDisjunct {
    std::size_t layer = 0;
    Vector x;        // the vector it characterizes
    Vector own;      // y-bar
    std::string profile;
};

struct ExtractionTrace {
    FeatureSpace space;
    std::vector<ExtractedDisjunct> disjuncts;
};

std::vector<std::string> extraction_alphabet(const Gnn& gnn, const ExtractOptions& opts = {});

// Realizable: every vector of every layer over all graphs with at most n vertices.
// Overapprox (MAX networks only): the inductive closure under COM(y, max S); n is ignored.
FeatureSpace feature_space_bounded(const Gnn& gnn, std::size_t n, FeatureMode mode = FeatureMode::Realizable,
                                   const ExtractOptions& opts = {});

// Equivalent to gnn on every graph with at most n vertices.
Formula extract_rml(const Gnn& gnn, std::size_t n, const ExtractOptions& opts = {}, ExtractionTrace* trace = nullptr);
Formula extract_gml(const Gnn& gnn, std::size_t n, const ExtractOptions& opts = {}, ExtractionTrace* trace = nullptr);
// Equivalent to gnn on every graph.
Formula extract_ml(const Gnn& gnn, const ExtractOptions& opts = {}, ExtractionTrace* trace = nullptr);

}  // namespace modalnet
