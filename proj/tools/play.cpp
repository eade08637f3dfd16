#include "play.hpp"

#include <algorithm>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace modalnet::play {

namespace {

std::string labels_of(const LabeledDigraph& g, VertexIndex v) {
    std::string s = "{";
    for (const auto& l : g.label_names(g.labels(v))) s += (s.size() > 1 ? "," : "") + l;
    return s + "}";
}

std::string set_names(const GameArena& a, const std::vector<VertexIndex>& set) {
    std::string s = "{";
    for (auto v : set) s += (s.size() > 1 ? ", " : "") + a.name(v);
    return s + "}";
}

void render(const GameArena& a, VertexIndex x, VertexIndex y, std::ostream& out) {
    const auto& g = a.graph();
    for (int side = 1; side <= 2; ++side) {
        out << "  G" << side << ":\n";
        for (VertexIndex v = 0; v < g.size(); ++v) {
            if (a.side_of(v) != side) continue;
            out << "    " << (v == x || v == y ? "* " : "  ") << a.name(v) << ' ' << labels_of(g, v);
            if (!g.successors(v).empty()) out << " -> " << set_names(a, g.successors(v));
            out << '\n';
        }
    }
}

}  // namespace

Human parse_human(const std::string& s) {
    if (s == "none") return Human::None;
    if (s == "spoiler") return Human::Spoiler;
    if (s == "duplicator") return Human::Duplicator;
    throw std::invalid_argument("human side must be spoiler, duplicator or none");
}

std::string to_string(Human h) {
    switch (h) {
        case Human::None: return "none";
        case Human::Spoiler: return "spoiler";
        case Human::Duplicator: return "duplicator";
    }
    return "?";
}

Outcome play_game(const GameConfig& cfg, Human human, const Chooser& choose, std::ostream& out) {
    GameArena a(cfg);
    Outcome o;
    VertexIndex x = a.start1(), y = a.start2();
    auto finish = [&](Player p, const std::string& why) {
        o.winner = p;
        out << to_string(p) << " wins: " << why << '\n';
        return o;
    };
    // index into options, asking the human or taking the solver's pick
    auto pick = [&](bool human_turn, const std::string& prompt, const std::vector<std::string>& options,
                    std::size_t solver) {
        if (options.size() == 1) return std::size_t{0};
        if (!human_turn) return solver;
        std::size_t i = choose(prompt, options);
        if (i >= options.size()) throw std::out_of_range("choice out of range");
        o.choices.push_back(i);
        return i;
    };
    const bool hs = human == Human::Spoiler, hd = human == Human::Duplicator;

    out << to_string(cfg.kind) << " game, " << cfg.rounds << " round(s)"
        << (cfg.kind == GameKind::GML ? ", c = " + std::to_string(cfg.c) : "") << '\n';
    for (std::size_t r = 0;; ++r) {
        out << "Position " << a.name(x) << " / " << a.name(y) << ":\n";
        render(a, x, y, out);
        if (a.graph().labels(x) != a.graph().labels(y)) return finish(Player::Spoiler, "labels differ");
        if (r == cfg.rounds) return finish(Player::Duplicator, "survived every round");
        const std::size_t k = cfg.rounds - r;
        out << "Round " << r + 1 << '\n';

        auto moves = a.spoiler_moves(x, y);
        if (moves.empty()) return finish(Player::Duplicator, "Spoiler has no move");
        std::vector<std::string> opts;
        for (const auto& m : moves) opts.push_back("side " + std::to_string(m.side) + " " + set_names(a, m.set));
        std::size_t best = 0;
        if (auto w = a.winning_spoiler_move(x, y, k))
            for (std::size_t i = 0; i < moves.size(); ++i)
                if (moves[i].side == w->side && moves[i].set == w->set) best = i;
        const SpoilerMove m = moves[pick(hs, "Spoiler, choose a side and set", opts, best)];
        out << "  Spoiler plays side " << m.side << ' ' << set_names(a, m.set) << '\n';

        auto sets = a.duplicator_sets(x, y, m);
        if (sets.empty()) return finish(Player::Spoiler, "Duplicator has too few successors to match");
        opts.clear();
        for (const auto& s : sets) opts.push_back(set_names(a, s));
        best = 0;
        if (auto reply = a.duplicator_reply(x, y, k, m))
            for (std::size_t i = 0; i < sets.size(); ++i)
                if (sets[i] == *reply) best = i;
        const auto reply = sets[pick(hd, "Duplicator, choose a matching set", opts, best)];
        out << "  Duplicator answers " << set_names(a, reply) << '\n';

        opts.clear();
        for (auto v : reply) opts.push_back(a.name(v));
        best = 0;
        if (auto p = a.spoiler_pick(m.set, reply, k))
            best = static_cast<std::size_t>(std::find(reply.begin(), reply.end(), *p) - reply.begin());
        const VertexIndex picked = reply[pick(hs, "Spoiler, pick a vertex of Duplicator's set", opts, best)];

        opts.clear();
        for (auto v : m.set) opts.push_back(a.name(v));
        best = 0;
        if (auto p = a.duplicator_pick(picked, m.set, k))
            best = static_cast<std::size_t>(std::find(m.set.begin(), m.set.end(), *p) - m.set.begin());
        const VertexIndex own = m.set[pick(hd, "Duplicator, pick a vertex of Spoiler's set", opts, best)];
        if (m.set.size() > 1) out << "  Spoiler picks " << a.name(picked) << ", Duplicator picks " << a.name(own) << '\n';

        x = m.side == 1 ? own : picked;
        y = m.side == 1 ? picked : own;
        ++o.rounds_played;
    }
}

Chooser stream_chooser(std::istream& in, std::ostream& out) {
    return [&in, &out](const std::string& prompt, const std::vector<std::string>& options) {
        while (true) {
            out << prompt << ":\n";
            for (std::size_t i = 0; i < options.size(); ++i) out << "  [" << i + 1 << "] " << options[i] << '\n';
            out << "> " << std::flush;
            std::string line;
            if (!std::getline(in, line)) throw std::runtime_error("input ended before the game did");
            std::istringstream ss(line);
            std::size_t n = 0;
            std::string rest;
            if (ss >> n && !(ss >> rest) && n >= 1 && n <= options.size()) return n - 1;
            out << "not a legal choice; enter a number from 1 to " << options.size() << '\n';
        }
    };
}

Chooser replay_chooser(std::vector<std::size_t> choices) {
    auto next = std::make_shared<std::size_t>(0);
    return [choices = std::move(choices), next](const std::string& prompt, const std::vector<std::string>& options) {
        if (*next >= choices.size()) throw std::runtime_error("transcript ran out of moves at: " + prompt);
        std::size_t i = choices[(*next)++];
        if (i >= options.size()) throw std::runtime_error("transcript move out of range at: " + prompt);
        return i;
    };
}

nlohmann::json transcript_json(const GameConfig& cfg, Human human, const Outcome& o) {
    return {{"kind", to_string(cfg.kind)},  {"c", cfg.c},
            {"rounds", cfg.rounds},         {"human", to_string(human)},
            {"choices", o.choices},         {"winner", modalnet::to_string(o.winner)},
            {"rounds_played", o.rounds_played}};
}

}  // namespace modalnet::play
