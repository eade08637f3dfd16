#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace modalnet {

// Bit i set <=> the i-th alphabet label holds. Alphabets are capped at 64 labels.
using LabelSet = std::uint64_t;
using VertexIndex = std::size_t;

inline constexpr std::size_t kMaxLabels = 64;

class LabeledDigraph {
public:
    LabeledDigraph() = default;
    explicit LabeledDigraph(std::vector<std::string> alphabet);

    VertexIndex add_vertex(const std::string& id, LabelSet labels = 0);
    void add_edge(VertexIndex from, VertexIndex to);
    void add_edge(const std::string& from, const std::string& to);
    void set_labels(VertexIndex v, LabelSet labels);
    void set_labels(const std::string& v, const std::vector<std::string>& labels);

    const std::vector<std::string>& alphabet() const { return alphabet_; }
    std::size_t size() const { return ids_.size(); }
    std::size_t edge_count() const;

    const std::string& id(VertexIndex v) const { return ids_.at(v); }
    const std::vector<std::string>& ids() const { return ids_; }
    VertexIndex index(const std::string& id) const;
    std::optional<VertexIndex> find(const std::string& id) const;

    // Successors in vertex declaration order.
    const std::vector<VertexIndex>& successors(VertexIndex v) const { return succ_.at(v); }
    LabelSet labels(VertexIndex v) const { return labels_.at(v); }
    bool has_label(VertexIndex v, std::size_t label) const { return (labels_.at(v) >> label) & 1u; }
    std::size_t label_index(const std::string& label) const;
    std::optional<std::size_t> find_label(const std::string& label) const;
    LabelSet label_mask(const std::vector<std::string>& labels) const;
    std::vector<std::string> label_names(LabelSet s) const;

    std::vector<std::pair<VertexIndex, VertexIndex>> edges() const;
    bool has_edge(VertexIndex from, VertexIndex to) const;

    friend bool operator==(const LabeledDigraph& a, const LabeledDigraph& b);

private:
    std::vector<std::string> alphabet_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, VertexIndex> index_;
    std::vector<std::vector<VertexIndex>> succ_;
    std::vector<LabelSet> labels_;
};

struct PointedGraph {
    LabeledDigraph graph;
    VertexIndex point = 0;

    PointedGraph() = default;
    PointedGraph(LabeledDigraph g, VertexIndex p);
    PointedGraph(LabeledDigraph g, const std::string& p);

    const std::string& point_id() const { return graph.id(point); }
};

std::vector<std::string> neighborhood(const LabeledDigraph& g, const std::string& v);

LabeledDigraph scale(const LabeledDigraph& g, std::size_t c);
std::string scaled_id(const std::string& v, std::size_t i);

PointedGraph unravel(const LabeledDigraph& g, const std::string& v, std::size_t depth);
PointedGraph unravel(const LabeledDigraph& g, VertexIndex v, std::size_t depth);

LabeledDigraph n_extend(const LabeledDigraph& g, std::size_t n, std::uint64_t seed);
bool is_n_extension(const LabeledDigraph& g, const LabeledDigraph& h, std::size_t n);

// Rooted at the point, every other vertex has exactly one parent and is reachable.
bool is_tree(const PointedGraph& t);
std::size_t tree_depth(const PointedGraph& t);

// All labeled digraphs with exactly n named vertices "v1".."vn", indexed by
// [0, graph_count(n, r)). Edge bits come first (row-major), then label bits.
std::uint64_t graph_count(std::size_t n, std::size_t num_labels);
std::uint64_t pointed_graph_count(std::size_t n, std::size_t num_labels);
LabeledDigraph graph_at(const std::vector<std::string>& alphabet, std::size_t n, std::uint64_t index);

// Visits every pointed graph with 1..max_size vertices; the callback returns
// false to stop early. Returns the number of pointed graphs visited.
std::uint64_t enumerate_graphs(const std::vector<std::string>& alphabet, std::size_t max_size,
                               const std::function<bool(const PointedGraph&)>& fn);
// Same, but hands over a whole graph once; callers iterate the points.
std::uint64_t enumerate_unpointed(const std::vector<std::string>& alphabet, std::size_t min_size,
                                  std::size_t max_size, const std::function<bool(const LabeledDigraph&)>& fn);

LabeledDigraph random_graph(const std::vector<std::string>& alphabet, std::size_t n, std::mt19937_64& rng,
                            double edge_probability = 0.3);

nlohmann::json graph_to_json(const LabeledDigraph& g);
nlohmann::json graph_to_json(const PointedGraph& g);
LabeledDigraph graph_from_json(const nlohmann::json& j);
// Requires a "point" key unless the graph has exactly one vertex.
PointedGraph pointed_graph_from_json(const nlohmann::json& j);

}  // namespace modalnet
