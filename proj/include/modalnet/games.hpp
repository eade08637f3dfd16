#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "modalnet/formula.hpp"
#include "modalnet/graph.hpp"

namespace modalnet {

enum class GameKind { ML, GML, AFML1, AFML2 };
enum class Player { Spoiler, Duplicator };

std::string to_string(GameKind k);
std::string to_string(Player p);
// "ml", "gml:C", "afml1", "afml2"
std::pair<GameKind, std::size_t> parse_game_kind(const std::string& s);

struct GameConfig {
    GameKind kind = GameKind::ML;
    std::size_t c = 1;  // counting bound, GML only
    std::size_t rounds = 0;
    PointedGraph g1, g2;
};

// Step 1 of a round: Spoiler picks a side (1 or 2) and a set of successors there.
// ML and AFML moves are singletons.
struct SpoilerMove {
    int side = 1;
    std::vector<VertexIndex> set;  // vertices of the union graph
};

// (vertex of g1, vertex of g2, rounds left)
using Position = std::tuple<VertexIndex, VertexIndex, std::size_t>;

struct GameResult {
    Player winner = Player::Duplicator;
    std::map<Position, bool> table;  // true: Duplicator wins from there
    std::map<Position, SpoilerMove> witness_move;  // set holds vertices of g_side
};

// Both graphs side by side in one union graph: g1's vertices first, then g2's.
// Positions pair a side-1 vertex x with a side-2 vertex y; k counts the rounds left.
// Unless noted, vertex arguments are union indices.
class GameArena {
public:
    // literal: GML[c] through set moves instead of the refinement (tiny inputs only)
    explicit GameArena(const GameConfig& cfg, bool literal = false);

    const GameConfig& config() const { return cfg_; }
    const LabeledDigraph& graph() const { return u_; }
    VertexIndex start1() const { return s1_; }
    VertexIndex start2() const { return s2_; }
    int side_of(VertexIndex x) const { return x < n1_ ? 1 : 2; }
    VertexIndex local(VertexIndex x) const { return x < n1_ ? x : x - n1_; }
    VertexIndex on_side1(VertexIndex v) const { return v; }
    VertexIndex on_side2(VertexIndex v) const { return v + n1_; }
    std::string name(VertexIndex x) const { return u_.id(x); }

    bool duplicator_wins(VertexIndex x, VertexIndex y, std::size_t k);
    // least k <= rounds at which Spoiler wins, if any
    std::optional<std::size_t> spoiler_rounds(VertexIndex x, VertexIndex y);

    std::vector<SpoilerMove> spoiler_moves(VertexIndex x, VertexIndex y) const;
    std::optional<SpoilerMove> winning_spoiler_move(VertexIndex x, VertexIndex y, std::size_t k);
    // Duplicator's step-2 options; empty when the move is too large to answer.
    std::vector<std::vector<VertexIndex>> duplicator_sets(VertexIndex x, VertexIndex y, const SpoilerMove& m) const;
    std::optional<std::vector<VertexIndex>> duplicator_reply(VertexIndex x, VertexIndex y, std::size_t k,
                                                             const SpoilerMove& m);
    // Steps 3 and 4 with k rounds left before the round started. `own` is U_side.
    std::optional<VertexIndex> spoiler_pick(const std::vector<VertexIndex>& own, const std::vector<VertexIndex>& other,
                                            std::size_t k);
    std::optional<VertexIndex> duplicator_pick(VertexIndex picked, const std::vector<VertexIndex>& own, std::size_t k);

    // Formula of the game's logic, true at x and false at y; needs spoiler_rounds(x, y).
    Formula distinguish(VertexIndex x, VertexIndex y);

    // Capped-count refinement over the union graph, levels 0..rounds (GML only).
    const std::vector<std::vector<std::size_t>>& gml_classes() const { return classes_; }

    GameResult export_result();

private:
    bool refinement() const { return cfg_.kind == GameKind::GML && !literal_; }
    bool won_pair(VertexIndex a, VertexIndex b, std::size_t k);  // any orientation
    bool literal_round(VertexIndex x, VertexIndex y, std::size_t k);
    std::optional<SpoilerMove> class_witness(VertexIndex x, VertexIndex y, std::size_t k) const;
    Formula label_literal(VertexIndex a, VertexIndex b) const;
    Formula gml_distinguish(VertexIndex a, VertexIndex b);
    std::optional<std::size_t> class_split(VertexIndex a, VertexIndex b) const;

    GameConfig cfg_;
    bool literal_;
    LabeledDigraph u_;
    std::size_t n1_ = 0, n2_ = 0;
    VertexIndex s1_ = 0, s2_ = 0;
    std::vector<std::int8_t> memo_;  // (x, y, k) -> -1 unknown, 0 Spoiler, 1 Duplicator
    std::map<Position, SpoilerMove> witness_;
    std::vector<std::vector<std::size_t>> classes_;
    std::map<std::pair<VertexIndex, VertexIndex>, Formula> formulas_;
};

// ML and AFML: memoized recursion. GML: capped-count refinement.
GameResult solve_game(const GameConfig& cfg);
// Direct set-move recursion for GML[c]; exponential, for cross-checks on tiny graphs.
bool gml_setmove_duplicator_wins(const GameConfig& cfg);

std::optional<Formula> distinguishing_formula(const GameConfig& cfg);

struct DuplicatorStrategy {
    std::map<std::string, std::string> ws;  // tree vertex id -> vertex id of the second graph
};

std::optional<DuplicatorStrategy> duplicator_strategy_tree(const PointedGraph& t, const PointedGraph& g2,
                                                           std::size_t rounds);

struct SeparatingGraph {
    PointedGraph graph;
    std::size_t K = 0;
    std::size_t m = 0;
    LabeledDigraph scaled;  // c * Unr^K(g), ids as in scale()
    std::vector<std::string> trace;
};

SeparatingGraph build_separating_graph(const PointedGraph& g, const PointedGraph& g2, std::size_t l, std::size_t L,
                                       std::size_t c);

nlohmann::json game_result_to_json(const GameConfig& cfg, const GameResult& r, const std::optional<Formula>& f);

}  // namespace modalnet
