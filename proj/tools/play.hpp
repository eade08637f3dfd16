#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <modalnet/games.hpp>

namespace modalnet::play {

enum class Human { None, Spoiler, Duplicator };

Human parse_human(const std::string& s);
std::string to_string(Human h);

// Picks one of `options` for the human side; returns an index into options.
// Interactive choosers re-prompt on bad input; replay choosers throw.
using Chooser = std::function<std::size_t(const std::string& prompt, const std::vector<std::string>& options)>;

struct Outcome {
    Player winner = Player::Duplicator;
    std::size_t rounds_played = 0;
    std::vector<std::size_t> choices;  // human choices, in order
};

// Plays the game on the terminal. The solver side plays optimally; with
// Human::None both sides are the solver.
Outcome play_game(const GameConfig& cfg, Human human, const Chooser& choose, std::ostream& out);

Chooser stream_chooser(std::istream& in, std::ostream& out);
Chooser replay_chooser(std::vector<std::size_t> choices);

nlohmann::json transcript_json(const GameConfig& cfg, Human human, const Outcome& o);

}  // namespace modalnet::play
