#include "modalnet/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace modalnet {

using nlohmann::json;

LabeledDigraph::LabeledDigraph(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {
    if (alphabet_.size() > kMaxLabels) throw std::invalid_argument("alphabet larger than 64 labels");
    std::set<std::string> seen(alphabet_.begin(), alphabet_.end());
    if (seen.size() != alphabet_.size()) throw std::invalid_argument("duplicate label in alphabet");
}

VertexIndex LabeledDigraph::add_vertex(const std::string& id, LabelSet labels) {
    if (index_.count(id)) throw std::invalid_argument("duplicate vertex id '" + id + "'");
    if (alphabet_.size() < kMaxLabels && (labels >> alphabet_.size()) != 0)
        throw std::invalid_argument("label set outside the alphabet for vertex '" + id + "'");
    VertexIndex v = ids_.size();
    ids_.push_back(id);
    index_.emplace(id, v);
    succ_.emplace_back();
    labels_.push_back(labels);
    return v;
}

void LabeledDigraph::add_edge(VertexIndex from, VertexIndex to) {
    if (from >= size() || to >= size()) throw std::out_of_range("edge endpoint out of range");
    auto& s = succ_[from];
    auto it = std::lower_bound(s.begin(), s.end(), to);
    if (it == s.end() || *it != to) s.insert(it, to);
}

void LabeledDigraph::add_edge(const std::string& from, const std::string& to) { add_edge(index(from), index(to)); }

void LabeledDigraph::set_labels(VertexIndex v, LabelSet labels) {
    if (alphabet_.size() < kMaxLabels && (labels >> alphabet_.size()) != 0)
        throw std::invalid_argument("label set outside the alphabet");
    labels_.at(v) = labels;
}

void LabeledDigraph::set_labels(const std::string& v, const std::vector<std::string>& labels) {
    set_labels(index(v), label_mask(labels));
}

std::size_t LabeledDigraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& s : succ_) n += s.size();
    return n;
}

VertexIndex LabeledDigraph::index(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("unknown vertex '" + id + "'");
    return it->second;
}

std::optional<VertexIndex> LabeledDigraph::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> LabeledDigraph::find_label(const std::string& label) const {
    auto it = std::find(alphabet_.begin(), alphabet_.end(), label);
    if (it == alphabet_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - alphabet_.begin());
}

std::size_t LabeledDigraph::label_index(const std::string& label) const {
    auto i = find_label(label);
    if (!i) throw std::invalid_argument("unknown label '" + label + "'");
    return *i;
}

LabelSet LabeledDigraph::label_mask(const std::vector<std::string>& labels) const {
    LabelSet m = 0;
    for (const auto& l : labels) m |= LabelSet{1} << label_index(l);
    return m;
}

std::vector<std::string> LabeledDigraph::label_names(LabelSet s) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if ((s >> i) & 1u) out.push_back(alphabet_[i]);
    return out;
}

std::vector<std::pair<VertexIndex, VertexIndex>> LabeledDigraph::edges() const {
    std::vector<std::pair<VertexIndex, VertexIndex>> out;
    for (VertexIndex v = 0; v < size(); ++v)
        for (auto u : succ_[v]) out.emplace_back(v, u);
    return out;
}

bool LabeledDigraph::has_edge(VertexIndex from, VertexIndex to) const {
    const auto& s = succ_.at(from);
    return std::binary_search(s.begin(), s.end(), to);
}

bool operator==(const LabeledDigraph& a, const LabeledDigraph& b) {
    return a.alphabet_ == b.alphabet_ && a.ids_ == b.ids_ && a.succ_ == b.succ_ && a.labels_ == b.labels_;
}

PointedGraph::PointedGraph(LabeledDigraph g, VertexIndex p) : graph(std::move(g)), point(p) {
    if (point >= graph.size()) throw std::out_of_range("point is not a vertex of the graph");
}

PointedGraph::PointedGraph(LabeledDigraph g, const std::string& p) : graph(std::move(g)) {
    point = graph.index(p);
}

std::vector<std::string> neighborhood(const LabeledDigraph& g, const std::string& v) {
    std::vector<std::string> out;
    for (auto u : g.successors(g.index(v))) out.push_back(g.id(u));
    return out;
}

std::string scaled_id(const std::string& v, std::size_t i) { return "(" + v + "," + std::to_string(i) + ")"; }

LabeledDigraph scale(const LabeledDigraph& g, std::size_t c) {
    if (c == 0) throw std::invalid_argument("scaling factor must be positive");
    LabeledDigraph h(g.alphabet());
    // copy (v,i) lives at index v*c + (i-1)
    for (VertexIndex v = 0; v < g.size(); ++v)
        for (std::size_t i = 1; i <= c; ++i) h.add_vertex(scaled_id(g.id(v), i), g.labels(v));
    for (VertexIndex v = 0; v < g.size(); ++v)
        for (auto u : g.successors(v))
            for (std::size_t i = 0; i < c; ++i)
                for (std::size_t j = 0; j < c; ++j) h.add_edge(v * c + i, u * c + j);
    return h;
}

PointedGraph unravel(const LabeledDigraph& g, VertexIndex v, std::size_t depth) {
    LabeledDigraph t(g.alphabet());
    struct Item {
        VertexIndex tail;
        VertexIndex node;
        std::size_t len;
    };
    std::deque<Item> queue;
    VertexIndex root = t.add_vertex(g.id(v), g.labels(v));
    queue.push_back({v, root, 0});
    while (!queue.empty()) {
        Item it = queue.front();
        queue.pop_front();
        if (it.len == depth) continue;
        for (auto u : g.successors(it.tail)) {
            VertexIndex child = t.add_vertex(t.id(it.node) + "." + g.id(u), g.labels(u));
            t.add_edge(it.node, child);
            queue.push_back({u, child, it.len + 1});
        }
    }
    return PointedGraph(std::move(t), root);
}

PointedGraph unravel(const LabeledDigraph& g, const std::string& v, std::size_t depth) {
    return unravel(g, g.index(v), depth);
}

LabeledDigraph n_extend(const LabeledDigraph& g, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    LabeledDigraph h = g;
    const std::size_t r = g.alphabet().size();
    const LabelSet mask = r >= 64 ? ~LabelSet{0} : ((LabelSet{1} << r) - 1);
    std::vector<VertexIndex> fresh;
    std::size_t counter = 0;
    for (VertexIndex v = 0; v < g.size(); ++v) {
        if (g.successors(v).empty()) continue;
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, n)(rng);
        for (std::size_t j = 0; j < k; ++j) {
            std::string id;
            do {
                id = "fresh" + std::to_string(++counter);
            } while (h.find(id));
            VertexIndex f = h.add_vertex(id, rng() & mask);
            h.add_edge(v, f);
            fresh.push_back(f);
        }
    }
    // optional structure among the fresh vertices only
    std::bernoulli_distribution coin(0.5);
    for (auto f : fresh) {
        if (coin(rng)) {
            auto target = fresh[std::uniform_int_distribution<std::size_t>(0, fresh.size() - 1)(rng)];
            h.add_edge(f, target);
        }
    }
    return h;
}

bool is_n_extension(const LabeledDigraph& g, const LabeledDigraph& h, std::size_t n) {
    if (g.alphabet() != h.alphabet()) return false;
    // (1) V subset of V', E subset of E'
    std::vector<VertexIndex> map(g.size());
    for (VertexIndex v = 0; v < g.size(); ++v) {
        auto hv = h.find(g.id(v));
        if (!hv) return false;
        map[v] = *hv;
    }
    for (auto [v, u] : g.edges())
        if (!h.has_edge(map[v], map[u])) return false;
    // (2) labels agree on old vertices
    for (VertexIndex v = 0; v < g.size(); ++v)
        if (g.labels(v) != h.labels(map[v])) return false;
    for (VertexIndex v = 0; v < g.size(); ++v) {
        const auto& hs = h.successors(map[v]);
        if (g.successors(v).empty()) {
            // (4) leaves stay leaves
            if (!hs.empty()) return false;
            continue;
        }
        // (3) at most n new successors
        std::size_t added = 0;
        for (auto u : hs) {
            bool was_edge = false;
            for (auto gu : g.successors(v))
                if (map[gu] == u) was_edge = true;
            if (!was_edge) ++added;
        }
        if (added > n) return false;
    }
    return true;
}

bool is_tree(const PointedGraph& t) {
    const auto& g = t.graph;
    std::vector<std::size_t> indeg(g.size(), 0);
    for (auto [v, u] : g.edges()) ++indeg[u];
    if (indeg[t.point] != 0) return false;
    for (VertexIndex v = 0; v < g.size(); ++v)
        if (v != t.point && indeg[v] != 1) return false;
    std::vector<bool> seen(g.size(), false);
    std::deque<VertexIndex> q{t.point};
    seen[t.point] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto u : g.successors(v)) {
            if (seen[u]) return false;
            seen[u] = true;
            ++reached;
            q.push_back(u);
        }
    }
    return reached == g.size();
}

std::size_t tree_depth(const PointedGraph& t) {
    if (!is_tree(t)) throw std::invalid_argument("graph is not tree-shaped at its point");
    std::size_t depth = 0;
    std::vector<std::pair<VertexIndex, std::size_t>> stack{{t.point, 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        depth = std::max(depth, d);
        for (auto u : t.graph.successors(v)) stack.emplace_back(u, d + 1);
    }
    return depth;
}

std::uint64_t graph_count(std::size_t n, std::size_t num_labels) {
    std::size_t bits = n * n + n * num_labels;
    if (bits >= 63) throw std::overflow_error("graph space too large to index");
    return std::uint64_t{1} << bits;
}

std::uint64_t pointed_graph_count(std::size_t n, std::size_t num_labels) { return n * graph_count(n, num_labels); }

LabeledDigraph graph_at(const std::vector<std::string>& alphabet, std::size_t n, std::uint64_t index) {
    LabeledDigraph g(alphabet);
    const std::size_t r = alphabet.size();
    for (std::size_t v = 0; v < n; ++v) {
        LabelSet labels = (index >> (n * n + v * r)) & ((LabelSet{1} << r) - 1);
        g.add_vertex("v" + std::to_string(v + 1), labels);
    }
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u)
            if ((index >> (v * n + u)) & 1u) g.add_edge(v, u);
    return g;
}

std::uint64_t enumerate_unpointed(const std::vector<std::string>& alphabet, std::size_t min_size,
                                  std::size_t max_size, const std::function<bool(const LabeledDigraph&)>& fn) {
    std::uint64_t visited = 0;
    for (std::size_t n = min_size; n <= max_size; ++n) {
        std::uint64_t total = graph_count(n, alphabet.size());
        for (std::uint64_t i = 0; i < total; ++i) {
            ++visited;
            if (!fn(graph_at(alphabet, n, i))) return visited;
        }
    }
    return visited;
}

std::uint64_t enumerate_graphs(const std::vector<std::string>& alphabet, std::size_t max_size,
                               const std::function<bool(const PointedGraph&)>& fn) {
    if (max_size == 0) throw std::invalid_argument("max_size must be at least 1");
    std::uint64_t visited = 0;
    bool stop = false;
    enumerate_unpointed(alphabet, 1, max_size, [&](const LabeledDigraph& g) {
        PointedGraph pg(g, VertexIndex{0});
        for (VertexIndex p = 0; p < g.size(); ++p) {
            pg.point = p;
            ++visited;
            if (!fn(pg)) {
                stop = true;
                return false;
            }
        }
        return true;
    });
    (void)stop;
    return visited;
}

LabeledDigraph random_graph(const std::vector<std::string>& alphabet, std::size_t n, std::mt19937_64& rng,
                            double edge_probability) {
    LabeledDigraph g(alphabet);
    const std::size_t r = alphabet.size();
    const LabelSet mask = (LabelSet{1} << r) - 1;
    for (std::size_t v = 0; v < n; ++v) g.add_vertex("v" + std::to_string(v + 1), rng() & mask);
    std::bernoulli_distribution edge(edge_probability);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u)
            if (edge(rng)) g.add_edge(v, u);
    return g;
}

json graph_to_json(const LabeledDigraph& g) {
    json j;
    j["labels"] = g.alphabet();
    j["vertices"] = g.ids();
    json edges = json::array();
    for (auto [v, u] : g.edges()) edges.push_back({g.id(v), g.id(u)});
    j["edges"] = edges;
    json labeling = json::object();
    for (VertexIndex v = 0; v < g.size(); ++v)
        if (g.labels(v) != 0) labeling[g.id(v)] = g.label_names(g.labels(v));
    j["labeling"] = labeling;
    return j;
}

json graph_to_json(const PointedGraph& g) {
    json j = graph_to_json(g.graph);
    j["point"] = g.point_id();
    return j;
}

LabeledDigraph graph_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("graph JSON must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "labels" && key != "vertices" && key != "edges" && key != "labeling" && key != "point")
            throw std::invalid_argument("unknown key '" + key + "' in graph JSON");
    }
    LabeledDigraph g(j.value("labels", std::vector<std::string>{}));
    for (const auto& v : j.at("vertices")) g.add_vertex(v.get<std::string>());
    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair of vertex ids");
            g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
        }
    }
    if (j.contains("labeling")) {
        for (const auto& [v, labels] : j.at("labeling").items())
            g.set_labels(v, labels.get<std::vector<std::string>>());
    }
    return g;
}

PointedGraph pointed_graph_from_json(const json& j) {
    LabeledDigraph g = graph_from_json(j);
    if (j.contains("point")) return PointedGraph(std::move(g), j.at("point").get<std::string>());
    if (g.size() == 1) return PointedGraph(std::move(g), VertexIndex{0});
    throw std::invalid_argument("graph JSON lacks a \"point\"");
}

}  // namespace modalnet
