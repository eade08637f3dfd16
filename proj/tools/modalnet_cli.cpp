#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include <modalnet/compiler.hpp>
#include <modalnet/extractor.hpp>
#include <modalnet/games.hpp>
#include <modalnet/gnn.hpp>
#include <modalnet/verifier.hpp>

#include "play.hpp"

using namespace modalnet;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// inline text, or a .formula file
Formula load_formula(const std::string& arg) {
    std::string text = ends_with(arg, ".formula") ? read_file(arg) : arg;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    return parse(text);
}

Side load_side(const std::string& arg) {
    if (ends_with(arg, ".json") || ends_with(arg, ".gnn")) return gnn_from_json(read_json(arg));
    return load_formula(arg);
}

std::vector<std::string> split_alphabet(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot write '" + out_path + "'");
    out << j.dump(2) << '\n';
}

struct CompileOpts {
    std::string logic, activation, agg, formula, alphabet, out;
    std::uint32_t bound = 0;
};

Gnn run_compile(const CompileOpts& o) {
    Gnn g = compile_named(load_formula(o.formula), o.logic, o.activation, o.bound, split_alphabet(o.alphabet));
    std::string agg = to_string(g.layers.front().agg);
    if (!o.agg.empty() && o.agg != agg) throw UsageError(o.logic + " compiles to " + agg + " aggregation, not " + o.agg);
    return g;
}

json vertex_map(const LabeledDigraph& g, const std::vector<bool>& values) {
    json j = json::array();
    for (VertexIndex v = 0; v < g.size(); ++v) j.push_back({{"vertex", g.id(v)}, {"value", bool(values[v])}});
    return j;
}

GameConfig game_config(const std::string& kind, std::size_t c, std::size_t rounds, const std::string& a,
                       const std::string& b) {
    auto [k, parsed_c] = parse_game_kind(kind);
    GameConfig cfg;
    cfg.kind = k;
    cfg.c = kind.rfind("gml:", 0) == 0 ? parsed_c : c;
    cfg.rounds = rounds;
    cfg.g1 = pointed_graph_from_json(read_json(a));
    cfg.g2 = pointed_graph_from_json(read_json(b));
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modalnet: modal logic and graph neural network workbench"};
    app.require_subcommand(1);
    int status = kOk;

    // compile
    CompileOpts co;
    auto* compile = app.add_subcommand("compile", "compile a formula into a GNN (JSON)");
    compile->add_option("formula", co.formula, "formula text or .formula file")->required();
    compile->add_option("--logic", co.logic, "ml, gml, rml or afml")->required()
        ->check(CLI::IsMember({"ml", "gml", "rml", "afml"}));
    compile->add_option("--bound", co.bound, "graph size bound n (rml)");
    compile->add_option("--activation", co.activation, "trrelu, relu, step, sigmoid or irrational")
        ->check(CLI::IsMember({"trrelu", "relu", "step", "sigmoid", "irrational"}));
    compile->add_option("--agg", co.agg, "expected aggregation")->check(CLI::IsMember({"mean", "sum", "max"}));
    compile->add_option("--alphabet", co.alphabet, "comma-separated labels (default: atoms of the formula)");
    compile->add_option("-o,--output", co.out, "output file");
    compile->callback([&] { emit(gnn_to_json(run_compile(co)), co.out); });

    // check
    std::string ck_formula, ck_gnn, ck_graph;
    auto* chk = app.add_subcommand("check", "evaluate a formula or GNN at every vertex of a graph");
    chk->add_option("graph", ck_graph, "graph JSON")->required();
    auto* f_opt = chk->add_option("--formula", ck_formula, "formula text or .formula file");
    auto* g_opt = chk->add_option("--gnn", ck_gnn, "GNN JSON");
    f_opt->excludes(g_opt);
    chk->callback([&] {
        if (ck_formula.empty() == ck_gnn.empty()) throw UsageError("check needs exactly one of --formula, --gnn");
        LabeledDigraph g = graph_from_json(read_json(ck_graph));
        std::vector<bool> vals = ck_formula.empty() ? classify_all(gnn_from_json(read_json(ck_gnn)), g)
                                                    : check_all(g, load_formula(ck_formula));
        std::cout << vertex_map(g, vals).dump(2) << '\n';
    });

    // extract
    std::string ex_logic, ex_gnn, ex_alphabet;
    std::size_t ex_bound = 0;
    auto* ext = app.add_subcommand("extract", "extract a formula from a GNN");
    ext->add_option("gnn", ex_gnn, "GNN JSON")->required();
    ext->add_option("--logic", ex_logic, "rml (MEAN), gml (SUM) or ml (MAX)")->required()
        ->check(CLI::IsMember({"rml", "gml", "ml"}));
    ext->add_option("--bound", ex_bound, "graph size bound n (rml, gml)");
    ext->add_option("--alphabet", ex_alphabet, "comma-separated labels");
    ext->callback([&] {
        Gnn g = gnn_from_json(read_json(ex_gnn));
        ExtractOptions opts;
        opts.alphabet = split_alphabet(ex_alphabet);
        opts.simplify = true;
        if (ex_logic != "ml" && ex_bound == 0) throw UsageError(ex_logic + " extraction needs --bound N");
        Formula f = ex_logic == "rml"   ? extract_rml(g, ex_bound, opts)
                    : ex_logic == "gml" ? extract_gml(g, ex_bound, opts)
                                        : extract_ml(g, opts);
        std::cout << print(f) << '\n';
    });

    // game
    std::string gm_kind = "ml", gm_a, gm_b;
    std::size_t gm_rounds = 1, gm_c = 1;
    auto* game = app.add_subcommand("game", "solve an EF game between two pointed graphs");
    game->add_option("g1", gm_a, "first pointed graph JSON")->required();
    game->add_option("g2", gm_b, "second pointed graph JSON")->required();
    game->add_option("--kind", gm_kind, "ml, gml:C, afml1 or afml2");
    game->add_option("--rounds", gm_rounds, "number of rounds");
    game->add_option("--c", gm_c, "counting bound for --kind gml");
    game->callback([&] {
        GameConfig cfg = game_config(gm_kind, gm_c, gm_rounds, gm_a, gm_b);
        GameResult r = solve_game(cfg);
        std::optional<Formula> f;
        if (r.winner == Player::Spoiler) f = distinguishing_formula(cfg);
        std::cout << game_result_to_json(cfg, r, f).dump(2) << '\n';
    });

    // play
    std::string pl_kind = "ml", pl_a, pl_b, pl_human = "spoiler", pl_replay, pl_transcript;
    std::size_t pl_rounds = 1, pl_c = 1;
    auto* pl = app.add_subcommand("play", "play an EF game against the solver in the terminal");
    pl->add_option("g1", pl_a, "first pointed graph JSON")->required();
    pl->add_option("g2", pl_b, "second pointed graph JSON")->required();
    pl->add_option("--kind", pl_kind, "ml, gml:C, afml1 or afml2");
    pl->add_option("--rounds", pl_rounds, "number of rounds");
    pl->add_option("--c", pl_c, "counting bound for --kind gml");
    pl->add_option("--human", pl_human, "spoiler, duplicator or none")
        ->check(CLI::IsMember({"spoiler", "duplicator", "none"}));
    pl->add_option("--replay", pl_replay, "transcript JSON to replay instead of reading moves");
    pl->add_option("--transcript", pl_transcript, "write the transcript here");
    pl->callback([&] {
        GameConfig cfg = game_config(pl_kind, pl_c, pl_rounds, pl_a, pl_b);
        play::Human human = play::parse_human(pl_human);
        play::Chooser chooser;
        if (!pl_replay.empty()) {
            json t = read_json(pl_replay);
            human = play::parse_human(t.at("human").get<std::string>());
            chooser = play::replay_chooser(t.at("choices").get<std::vector<std::size_t>>());
        } else {
            chooser = play::stream_chooser(std::cin, std::cout);
        }
        play::Outcome o = play::play_game(cfg, human, chooser, std::cout);
        if (!pl_transcript.empty()) emit(play::transcript_json(cfg, human, o), pl_transcript);
    });

    // verify
    std::string vf_lhs, vf_rhs, vf_alphabet;
    std::size_t vf_max = 3, vf_random_size = 0, vf_trials = 0, vf_guard = 0, vf_label_guard = 0;
    std::optional<std::uint64_t> vf_seed;
    bool vf_timing = false;
    auto* vf = app.add_subcommand("verify", "check a formula or GNN against another on small graphs");
    vf->add_option("--lhs", vf_lhs, "formula text, .formula file or GNN .json")->required();
    vf->add_option("--rhs", vf_rhs, "formula text, .formula file or GNN .json")->required();
    vf->add_option("--alphabet", vf_alphabet, "comma-separated labels");
    vf->add_option("--max-size", vf_max, "exhaustive size bound");
    vf->add_option("--guard", vf_guard, "raise the exhaustive size guard");
    vf->add_option("--label-guard", vf_label_guard, "raise the exhaustive label-count guard");
    vf->add_option("--random-size", vf_random_size, "size bound for random graphs");
    vf->add_option("--trials", vf_trials, "number of random graphs");
    vf->add_option("--seed", vf_seed, "seed for random graphs");
    vf->add_flag("--timing", vf_timing, "include elapsed time in the output");
    vf->callback([&] {
        Side lhs = load_side(vf_lhs), rhs = load_side(vf_rhs);
        auto alphabet = split_alphabet(vf_alphabet);
        if (alphabet.empty()) {
            std::set<std::string> atoms;
            for (const Side* s : {&lhs, &rhs}) {
                if (auto f = std::get_if<Formula>(s)) {
                    for (auto& a : atoms_of(*f)) atoms.insert(a);
                } else {
                    for (auto& a : std::get<Gnn>(*s).alphabet) atoms.insert(a);
                }
            }
            alphabet.assign(atoms.begin(), atoms.end());
        }
        VerifyOptions opts;
        if (vf_guard) opts.max_size = vf_guard;
        if (vf_label_guard) opts.max_labels = vf_label_guard;
        Verdict v;
        if (vf_trials > 0) {
            if (!vf_seed) throw UsageError("random verification needs --seed");
            if (vf_random_size == 0) throw UsageError("random verification needs --random-size");
            v = equiv_corpus(lhs, rhs, alphabet, vf_max, vf_random_size, vf_trials, *vf_seed, opts);
        } else {
            v = equiv_exhaustive(lhs, rhs, alphabet, vf_max, opts);
        }
        json j = verdict_to_json(v);
        if (!vf_timing) j.erase("elapsed_seconds");
        std::cout << j.dump(2) << '\n';
        if (v.status == Verdict::Status::Counterexample) status = kCounterexample;
        else if (v.status == Verdict::Status::GuardExceeded) status = kUsage;
    });

    // transform
    std::string tf_op, tf_graph, tf_vertex;
    std::size_t tf_c = 2, tf_depth = 1, tf_n = 1;
    std::optional<std::uint64_t> tf_seed;
    auto* tf = app.add_subcommand("transform", "scale, unravel or extend a graph");
    tf->add_option("op", tf_op, "scale, unravel or extend")->required()
        ->check(CLI::IsMember({"scale", "unravel", "extend"}));
    tf->add_option("graph", tf_graph, "graph JSON")->required();
    tf->add_option("--c", tf_c, "scaling factor");
    tf->add_option("--depth", tf_depth, "unraveling depth");
    tf->add_option("--vertex", tf_vertex, "unravel from this vertex (default: the point)");
    tf->add_option("--n", tf_n, "extension bound");
    tf->add_option("--seed", tf_seed, "seed (extend)");
    tf->callback([&] {
        json j = read_json(tf_graph);
        if (tf_op == "scale") {
            LabeledDigraph h = scale(graph_from_json(j), tf_c);
            json out = j.contains("point")
                           ? graph_to_json(PointedGraph(h, scaled_id(j.at("point").get<std::string>(), 1)))
                           : graph_to_json(h);
            std::cout << out.dump(2) << '\n';
        } else if (tf_op == "unravel") {
            LabeledDigraph g = graph_from_json(j);
            std::string v = tf_vertex;
            if (v.empty()) v = pointed_graph_from_json(j).point_id();
            std::cout << graph_to_json(unravel(g, v, tf_depth)).dump(2) << '\n';
        } else {
            if (!tf_seed) throw UsageError("extend needs --seed");
            std::cout << graph_to_json(n_extend(graph_from_json(j), tf_n, *tf_seed)).dump(2) << '\n';
        }
    });

    // enumerate
    std::size_t en_max = 1;
    std::string en_alphabet = "P";
    auto* en = app.add_subcommand("enumerate", "stream every pointed graph up to a size, one JSON per line");
    en->add_option("--max-size", en_max, "largest graph size")->required();
    en->add_option("--alphabet", en_alphabet, "comma-separated labels");
    en->callback([&] {
        if (en_max > 3) throw UsageError("enumerate stops at --max-size 3");
        enumerate_graphs(split_alphabet(en_alphabet), en_max, [](const PointedGraph& p) {
            std::cout << graph_to_json(p).dump() << '\n';
            return true;
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return status;
}
