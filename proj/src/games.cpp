#include "modalnet/games.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "modalnet/extractor.hpp"

namespace modalnet {

namespace {

constexpr std::size_t kLiteralDegreeGuard = 6;

void subsets_of_size(const std::vector<VertexIndex>& from, std::size_t s,
                     std::vector<std::vector<VertexIndex>>& out) {
    if (s > from.size()) return;
    std::vector<std::size_t> pick(s);
    for (std::size_t i = 0; i < s; ++i) pick[i] = i;
    while (true) {
        std::vector<VertexIndex> set;
        for (auto i : pick) set.push_back(from[i]);
        out.push_back(std::move(set));
        // next combination
        std::size_t i = s;
        while (i > 0 && pick[i - 1] == from.size() - s + i - 1) --i;
        if (i == 0) return;
        ++pick[i - 1];
        for (std::size_t j = i; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
}

void push_unique(std::vector<Formula>& fs, Formula f) {
    if (std::find(fs.begin(), fs.end(), f) == fs.end()) fs.push_back(std::move(f));
}

}  // namespace

std::string to_string(GameKind k) {
    switch (k) {
        case GameKind::ML: return "ml";
        case GameKind::GML: return "gml";
        case GameKind::AFML1: return "afml1";
        case GameKind::AFML2: return "afml2";
    }
    return "?";
}

std::string to_string(Player p) { return p == Player::Spoiler ? "Spoiler" : "Duplicator"; }

std::pair<GameKind, std::size_t> parse_game_kind(const std::string& s) {
    if (s == "ml") return {GameKind::ML, 1};
    if (s == "afml1") return {GameKind::AFML1, 1};
    if (s == "afml2") return {GameKind::AFML2, 1};
    if (s == "gml") return {GameKind::GML, 1};
    if (s.rfind("gml:", 0) == 0) {
        std::size_t c = 0;
        try {
            c = std::stoul(s.substr(4));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad counting bound in game kind '" + s + "'");
        }
        if (c == 0) throw std::invalid_argument("GML games need a counting bound of at least 1");
        return {GameKind::GML, c};
    }
    throw std::invalid_argument("unknown game kind '" + s + "' (ml, gml:C, afml1, afml2)");
}

GameArena::GameArena(const GameConfig& cfg, bool literal) : cfg_(cfg), literal_(literal) {
    const auto& g1 = cfg.g1.graph;
    const auto& g2 = cfg.g2.graph;
    if (g1.alphabet() != g2.alphabet()) throw std::invalid_argument("game graphs use different alphabets");
    if (cfg.kind == GameKind::GML && cfg.c == 0) throw std::invalid_argument("GML games need c >= 1");
    n1_ = g1.size();
    n2_ = g2.size();
    u_ = LabeledDigraph(g1.alphabet());
    for (VertexIndex v = 0; v < n1_; ++v) u_.add_vertex("1:" + g1.id(v), g1.labels(v));
    for (VertexIndex v = 0; v < n2_; ++v) u_.add_vertex("2:" + g2.id(v), g2.labels(v));
    for (auto [a, b] : g1.edges()) u_.add_edge(a, b);
    for (auto [a, b] : g2.edges()) u_.add_edge(a + n1_, b + n1_);
    s1_ = cfg.g1.point;
    s2_ = cfg.g2.point + n1_;
    memo_.assign(n1_ * n2_ * (cfg.rounds + 1), -1);

    if (literal_ && cfg.kind == GameKind::GML)
        for (VertexIndex v = 0; v < u_.size(); ++v)
            if (u_.successors(v).size() > kLiteralDegreeGuard)
                throw GuardExceeded("set-move game needs out-degree <= " + std::to_string(kLiteralDegreeGuard));

    if (cfg.kind != GameKind::GML) return;
    // level 0: labels; level k: label plus capped counts over level k-1
    std::map<LabelSet, std::size_t> first;
    std::vector<std::size_t> c0(u_.size());
    for (VertexIndex v = 0; v < u_.size(); ++v) c0[v] = first.emplace(u_.labels(v), first.size()).first->second;
    classes_.push_back(std::move(c0));
    for (std::size_t k = 1; k <= cfg.rounds; ++k) {
        const auto& prev = classes_.back();
        std::map<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>, std::size_t> ids;
        std::vector<std::size_t> next(u_.size());
        for (VertexIndex v = 0; v < u_.size(); ++v) {
            std::map<std::size_t, std::size_t> counts;
            for (auto w : u_.successors(v)) ++counts[prev[w]];
            std::vector<std::pair<std::size_t, std::size_t>> sig;
            for (auto [cl, n] : counts) sig.emplace_back(cl, std::min(n, cfg.c));
            next[v] = ids.emplace(std::make_pair(prev[v], std::move(sig)), ids.size()).first->second;
        }
        classes_.push_back(std::move(next));
    }
}

bool GameArena::won_pair(VertexIndex a, VertexIndex b, std::size_t k) {
    return side_of(a) == 1 ? duplicator_wins(a, b, k) : duplicator_wins(b, a, k);
}

bool GameArena::duplicator_wins(VertexIndex x, VertexIndex y, std::size_t k) {
    if (side_of(x) != 1 || side_of(y) != 2 || y >= n1_ + n2_) throw std::out_of_range("position off the game graphs");
    if (k > cfg_.rounds) throw std::out_of_range("more rounds than the game was set up for");
    std::int8_t& slot = memo_[(x * n2_ + (y - n1_)) * (cfg_.rounds + 1) + k];
    if (slot >= 0) return slot;
    bool d;
    if (u_.labels(x) != u_.labels(y)) d = false;
    else if (k == 0) d = true;
    else if (refinement()) d = classes_[k][x] == classes_[k][y];
    else d = literal_round(x, y, k);
    slot = d;  // memo_ never reallocates
    return d;
}

bool GameArena::literal_round(VertexIndex x, VertexIndex y, std::size_t k) {
    for (auto& m : spoiler_moves(x, y)) {
        if (!duplicator_reply(x, y, k, m)) {
            witness_[{local(x), local(y), k}] = std::move(m);
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> GameArena::spoiler_rounds(VertexIndex x, VertexIndex y) {
    for (std::size_t k = 0; k <= cfg_.rounds; ++k)
        if (!duplicator_wins(x, y, k)) return k;
    return std::nullopt;
}

std::vector<SpoilerMove> GameArena::spoiler_moves(VertexIndex x, VertexIndex y) const {
    const auto& nx = u_.successors(x);
    const auto& ny = u_.successors(y);
    std::vector<SpoilerMove> out;
    auto singles = [&](int side, const std::vector<VertexIndex>& ns) {
        for (auto u : ns) out.push_back({side, {u}});
    };
    switch (cfg_.kind) {
        case GameKind::ML:
            singles(1, nx);
            singles(2, ny);
            break;
        case GameKind::AFML1:
            singles(1, nx);
            if (nx.empty()) singles(2, ny);
            break;
        case GameKind::AFML2:
            singles(2, ny);
            if (ny.empty()) singles(1, nx);
            break;
        case GameKind::GML:
            for (int side = 1; side <= 2; ++side) {
                std::vector<std::vector<VertexIndex>> sets;
                const auto& ns = side == 1 ? nx : ny;
                for (std::size_t s = 1; s <= std::min(cfg_.c, ns.size()); ++s) subsets_of_size(ns, s, sets);
                for (auto& set : sets) out.push_back({side, std::move(set)});
            }
            break;
    }
    return out;
}

std::vector<std::vector<VertexIndex>> GameArena::duplicator_sets(VertexIndex x, VertexIndex y,
                                                                 const SpoilerMove& m) const {
    std::vector<std::vector<VertexIndex>> out;
    subsets_of_size(u_.successors(m.side == 1 ? y : x), m.set.size(), out);
    return out;
}

std::optional<std::vector<VertexIndex>> GameArena::duplicator_reply(VertexIndex x, VertexIndex y, std::size_t k,
                                                                    const SpoilerMove& m) {
    if (k == 0) throw std::invalid_argument("no rounds left to play");
    for (auto& reply : duplicator_sets(x, y, m)) {
        bool ok = std::all_of(reply.begin(), reply.end(), [&](VertexIndex r) {
            return std::any_of(m.set.begin(), m.set.end(), [&](VertexIndex u) { return won_pair(u, r, k - 1); });
        });
        if (ok) return reply;
    }
    return std::nullopt;
}

std::optional<VertexIndex> GameArena::spoiler_pick(const std::vector<VertexIndex>& own,
                                                   const std::vector<VertexIndex>& other, std::size_t k) {
    for (auto r : other)
        if (std::none_of(own.begin(), own.end(), [&](VertexIndex u) { return won_pair(u, r, k - 1); })) return r;
    return std::nullopt;
}

std::optional<VertexIndex> GameArena::duplicator_pick(VertexIndex picked, const std::vector<VertexIndex>& own,
                                                      std::size_t k) {
    for (auto u : own)
        if (won_pair(u, picked, k - 1)) return u;
    return std::nullopt;
}

std::optional<SpoilerMove> GameArena::class_witness(VertexIndex x, VertexIndex y, std::size_t k) const {
    const auto& prev = classes_.at(k - 1);
    std::vector<VertexIndex> all = u_.successors(x);
    all.insert(all.end(), u_.successors(y).begin(), u_.successors(y).end());
    std::vector<std::size_t> seen;
    for (auto w : all) {
        std::size_t cl = prev[w];
        if (std::find(seen.begin(), seen.end(), cl) != seen.end()) continue;
        seen.push_back(cl);
        auto in_class = [&](VertexIndex v) {
            std::vector<VertexIndex> r;
            for (auto s : u_.successors(v))
                if (prev[s] == cl) r.push_back(s);
            return r;
        };
        auto a = in_class(x), b = in_class(y);
        std::size_t m1 = std::min(cfg_.c, a.size()), m2 = std::min(cfg_.c, b.size());
        if (m1 == m2) continue;
        if (m1 > m2) return SpoilerMove{1, std::vector<VertexIndex>(a.begin(), a.begin() + m1)};
        return SpoilerMove{2, std::vector<VertexIndex>(b.begin(), b.begin() + m2)};
    }
    return std::nullopt;
}

std::optional<SpoilerMove> GameArena::winning_spoiler_move(VertexIndex x, VertexIndex y, std::size_t k) {
    if (duplicator_wins(x, y, k) || k == 0 || u_.labels(x) != u_.labels(y)) return std::nullopt;
    if (refinement()) return class_witness(x, y, k);
    return witness_.at({local(x), local(y), k});
}

Formula GameArena::label_literal(VertexIndex a, VertexIndex b) const {
    LabelSet diff = u_.labels(a) ^ u_.labels(b);
    std::size_t i = static_cast<std::size_t>(__builtin_ctzll(diff));
    Formula p = atom(u_.alphabet()[i]);
    return u_.has_label(a, i) ? p : neg(p);
}

std::optional<std::size_t> GameArena::class_split(VertexIndex a, VertexIndex b) const {
    for (std::size_t k = 0; k < classes_.size(); ++k)
        if (classes_[k][a] != classes_[k][b]) return k;
    return std::nullopt;
}

Formula GameArena::gml_distinguish(VertexIndex a, VertexIndex b) {
    if (auto it = formulas_.find({a, b}); it != formulas_.end()) return it->second;
    auto k = class_split(a, b);
    if (!k) throw std::logic_error("vertices are not separated within the round bound");
    Formula out;
    if (*k == 0) {
        out = label_literal(a, b);
    } else {
        const auto& prev = classes_[*k - 1];
        std::vector<VertexIndex> all = u_.successors(a);
        all.insert(all.end(), u_.successors(b).begin(), u_.successors(b).end());
        std::optional<std::size_t> split;
        std::size_t m1 = 0, m2 = 0;
        for (auto w : all) {
            auto count = [&](VertexIndex v) {
                std::size_t n = 0;
                for (auto s : u_.successors(v)) n += prev[s] == prev[w];
                return std::min(n, cfg_.c);
            };
            m1 = count(a);
            m2 = count(b);
            if (m1 != m2) {
                split = prev[w];
                break;
            }
        }
        if (!split) throw std::logic_error("refinement classes disagree without a witness");
        VertexIndex rep = *std::find_if(all.begin(), all.end(), [&](VertexIndex w) { return prev[w] == *split; });
        std::vector<std::size_t> done{*split};
        std::vector<Formula> parts;
        for (auto w : all) {
            if (std::find(done.begin(), done.end(), prev[w]) != done.end()) continue;
            done.push_back(prev[w]);
            push_unique(parts, gml_distinguish(rep, w));
        }
        Formula chi = conj_all(parts);
        out = m1 > m2 ? gdia(Rel::Geq, static_cast<std::uint32_t>(m1), chi)
                      : neg(gdia(Rel::Geq, static_cast<std::uint32_t>(m2), chi));
    }
    formulas_.emplace(std::make_pair(a, b), out);
    return out;
}

Formula GameArena::distinguish(VertexIndex x, VertexIndex y) {
    if (cfg_.kind == GameKind::GML) return gml_distinguish(x, y);
    if (auto it = formulas_.find({x, y}); it != formulas_.end()) return it->second;
    auto k = spoiler_rounds(x, y);
    if (!k) throw std::logic_error("Duplicator wins this position");
    Formula out;
    const auto& nx = u_.successors(x);
    const auto& ny = u_.successors(y);
    if (*k == 0) {
        out = label_literal(x, y);
    } else {
        const SpoilerMove& m = witness_.at({local(x), local(y), *k});
        const VertexIndex u = m.set.front();
        std::vector<Formula> parts;
        switch (cfg_.kind) {
            case GameKind::ML:
                if (m.side == 1) {
                    for (auto v : ny) push_unique(parts, distinguish(u, v));
                    out = dia(conj_all(parts));
                } else {
                    for (auto v : nx) push_unique(parts, neg(distinguish(v, u)));
                    out = neg(dia(conj_all(parts)));
                }
                break;
            case GameKind::AFML1:
                if (m.side == 2) {
                    out = box(bottom());
                } else {
                    for (auto v : ny) push_unique(parts, distinguish(u, v));
                    out = dia(conj_all(parts));
                }
                break;
            case GameKind::AFML2:
                if (m.side == 1) {
                    out = dia(top());
                } else {
                    for (auto v : nx) push_unique(parts, distinguish(v, u));
                    out = box(disj_all(parts));
                }
                break;
            case GameKind::GML: break;
        }
    }
    formulas_.emplace(std::make_pair(x, y), out);
    return out;
}

GameResult GameArena::export_result() {
    GameResult r;
    r.winner = duplicator_wins(s1_, s2_, cfg_.rounds) ? Player::Duplicator : Player::Spoiler;
    for (VertexIndex x = 0; x < n1_; ++x)
        for (VertexIndex y = 0; y < n2_; ++y)
            for (std::size_t k = 0; k <= cfg_.rounds; ++k) {
                std::int8_t s = memo_[(x * n2_ + y) * (cfg_.rounds + 1) + k];
                if (s >= 0) r.table[{x, y, k}] = s;
            }
    auto localize = [&](SpoilerMove m) {
        for (auto& v : m.set) v = local(v);
        return m;
    };
    if (refinement()) {
        for (const auto& [pos, d] : r.table) {
            auto [x, y, k] = pos;
            if (d) continue;
            if (auto m = winning_spoiler_move(x, y + n1_, k)) r.witness_move[pos] = localize(*m);
        }
    } else {
        for (const auto& [pos, m] : witness_) r.witness_move[pos] = localize(m);
    }
    return r;
}

GameResult solve_game(const GameConfig& cfg) {
    GameArena arena(cfg);
    return arena.export_result();
}

bool gml_setmove_duplicator_wins(const GameConfig& cfg) {
    if (cfg.kind != GameKind::GML) throw std::invalid_argument("set-move oracle is for GML games");
    GameArena arena(cfg, true);
    return arena.duplicator_wins(arena.start1(), arena.start2(), cfg.rounds);
}

std::optional<Formula> distinguishing_formula(const GameConfig& cfg) {
    GameArena arena(cfg);
    if (!arena.spoiler_rounds(arena.start1(), arena.start2())) return std::nullopt;
    return arena.distinguish(arena.start1(), arena.start2());
}

std::optional<DuplicatorStrategy> duplicator_strategy_tree(const PointedGraph& t, const PointedGraph& g2,
                                                           std::size_t rounds) {
    if (!is_tree(t)) throw std::invalid_argument("strategy extraction needs a tree-shaped first graph");
    GameArena arena(GameConfig{GameKind::AFML1, 1, rounds, t, g2});
    if (!arena.duplicator_wins(arena.start1(), arena.start2(), rounds)) return std::nullopt;
    DuplicatorStrategy ws;
    const auto& u = arena.graph();
    ws.ws[t.point_id()] = g2.point_id();
    std::deque<std::tuple<VertexIndex, VertexIndex, std::size_t>> queue{{arena.start1(), arena.start2(), 0}};
    while (!queue.empty()) {
        auto [p, q, d] = queue.front();
        queue.pop_front();
        if (d == rounds) continue;
        for (auto child : u.successors(p)) {
            const auto& options = u.successors(q);
            auto it = std::find_if(options.begin(), options.end(),
                                   [&](VertexIndex r) { return arena.duplicator_wins(child, r, rounds - d - 1); });
            if (it == options.end()) throw std::logic_error("winning position without a winning reply");
            ws.ws[t.graph.id(child)] = g2.graph.id(arena.local(*it));
            queue.emplace_back(child, *it, d + 1);
        }
    }
    return ws;
}

SeparatingGraph build_separating_graph(const PointedGraph& g, const PointedGraph& g2, std::size_t l, std::size_t L,
                                       std::size_t c) {
    if (g.graph.alphabet() != g2.graph.alphabet()) throw std::invalid_argument("graphs use different alphabets");
    SeparatingGraph out;
    out.K = std::max(l, L);
    out.m = g2.graph.size();
    PointedGraph t = unravel(g.graph, g.point, out.K);
    auto ws = duplicator_strategy_tree(t, g2, out.K);
    if (!ws)
        throw std::invalid_argument("Spoiler wins the AFML[1] game on the unraveling in " + std::to_string(out.K) +
                                    " rounds; no separating graph");
    out.trace.push_back("K = " + std::to_string(out.K) + ", m = " + std::to_string(out.m) + ", unraveling has " +
                        std::to_string(t.graph.size()) + " vertices");

    out.scaled = scale(t.graph, c);
    LabeledDigraph h = out.scaled;
    out.trace.push_back("scaled by " + std::to_string(c) + ": " + std::to_string(h.size()) + " vertices");

    const std::string prefix = "g2:";
    for (VertexIndex v = 0; v < g2.graph.size(); ++v) {
        PointedGraph r = unravel(g2.graph, v, out.K);
        std::vector<VertexIndex> at(r.graph.size());
        for (VertexIndex w = 0; w < r.graph.size(); ++w) at[w] = h.add_vertex(prefix + r.graph.id(w), r.graph.labels(w));
        for (auto [a, b] : r.graph.edges()) h.add_edge(at[a], at[b]);
    }
    out.trace.push_back("added unravelings of every vertex of the second graph: " + std::to_string(h.size()) +
                        " vertices");

    std::size_t wired = 0;
    for (VertexIndex tv = 0; tv < t.graph.size(); ++tv) {
        if (t.graph.successors(tv).empty()) continue;
        const std::string& target = ws->ws.at(t.graph.id(tv));
        const auto& succ = g2.graph.successors(g2.graph.index(target));
        for (std::size_t i = 1; i <= c; ++i) {
            VertexIndex from = h.index(scaled_id(t.graph.id(tv), i));
            for (auto q : succ) h.add_edge(from, h.index(prefix + g2.graph.id(q)));
            ++wired;
        }
    }
    out.trace.push_back("wired " + std::to_string(wired) + " scaled vertices to the roots for N(ws(u))");
    out.graph = PointedGraph(std::move(h), scaled_id(t.point_id(), 1));
    out.trace.push_back("point " + out.graph.point_id());
    return out;
}

nlohmann::json game_result_to_json(const GameConfig& cfg, const GameResult& r, const std::optional<Formula>& f) {
    nlohmann::json j = {{"winner", to_string(r.winner)}, {"rounds", cfg.rounds}, {"kind", to_string(cfg.kind)}};
    if (cfg.kind == GameKind::GML) j["c"] = cfg.c;
    if (f) j["formula"] = print(*f);
    return j;
}

}  // namespace modalnet
