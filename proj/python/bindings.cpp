#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <modalnet/compiler.hpp>
#include <modalnet/extractor.hpp>
#include <modalnet/games.hpp>
#include <modalnet/verifier.hpp>

namespace py = pybind11;
using namespace modalnet;
using nlohmann::json;

namespace {

// GNN sides arrive as JSON text, formulas as formula text
Side side_from(const std::string& s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && s[first] == '{') return gnn_from_json(json::parse(s));
    return parse(s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "modalnet native core; graphs and networks cross the boundary as JSON text";

    py::register_exception<ParseError>(m, "FormulaSyntaxError", PyExc_ValueError);
    py::register_exception<GuardExceeded>(m, "GuardExceeded", PyExc_RuntimeError);

    py::class_<Formula>(m, "Formula")
        .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
        .def("__str__", [](const Formula& f) { return print(f); })
        .def("__repr__", [](const Formula& f) { return "Formula('" + print(f) + "')"; })
        .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
        .def("__hash__", &Formula::hash)
        .def_property_readonly("modal_depth", [](const Formula& f) { return modal_depth(f); })
        .def_property_readonly("atoms", [](const Formula& f) { return atoms_of(f); })
        .def("fragments", [](const Formula& f) {
            FragmentReport r = analyze(f);
            py::dict d;
            d["ml"] = r.in_ml;
            d["gml"] = r.in_gml;
            d["rml"] = r.in_rml;
            d["afml1"] = r.in_afml1;
            d["afml2"] = r.in_afml2;
            d["max_count"] = r.max_count;
            return d;
        });

    m.def("check_all", [](const Formula& f, const std::string& graph) {
        return check_all(graph_from_json(json::parse(graph)), f);
    }, py::arg("formula"), py::arg("graph"));

    m.def("compile", [](const Formula& f, const std::string& logic, const std::string& activation, std::uint32_t bound,
                        std::vector<std::string> alphabet) {
        return gnn_to_json(compile_named(f, logic, activation, bound, std::move(alphabet))).dump();
    }, py::arg("formula"), py::arg("logic"), py::arg("activation") = "trrelu", py::arg("bound") = 0,
          py::arg("alphabet") = std::vector<std::string>{});

    m.def("classify_all", [](const std::string& gnn, const std::string& graph) {
        return classify_all(gnn_from_json(json::parse(gnn)), graph_from_json(json::parse(graph)));
    }, py::arg("gnn"), py::arg("graph"));

    m.def("extract", [](const std::string& gnn, const std::string& logic, std::size_t bound) {
        Gnn g = gnn_from_json(json::parse(gnn));
        ExtractOptions opts;
        opts.simplify = true;
        if (logic == "rml") return extract_rml(g, bound, opts);
        if (logic == "gml") return extract_gml(g, bound, opts);
        if (logic == "ml") return extract_ml(g, opts);
        throw std::invalid_argument("extraction logic must be rml, gml or ml");
    }, py::arg("gnn"), py::arg("logic"), py::arg("bound") = 0);

    m.def("solve_game", [](const std::string& kind, std::size_t rounds, const std::string& g1, const std::string& g2) {
        auto [k, c] = parse_game_kind(kind);
        GameConfig cfg{k, c, rounds, pointed_graph_from_json(json::parse(g1)), pointed_graph_from_json(json::parse(g2))};
        GameResult r = solve_game(cfg);
        std::optional<Formula> f;
        if (r.winner == Player::Spoiler) f = distinguishing_formula(cfg);
        return game_result_to_json(cfg, r, f).dump();
    }, py::arg("kind"), py::arg("rounds"), py::arg("g1"), py::arg("g2"));

    m.def("verify", [](const std::string& lhs, const std::string& rhs, std::vector<std::string> alphabet,
                       std::size_t max_size) {
        json j = verdict_to_json(equiv_exhaustive(side_from(lhs), side_from(rhs), alphabet, max_size));
        j.erase("elapsed_seconds");
        return j.dump();
    }, py::arg("lhs"), py::arg("rhs"), py::arg("alphabet"), py::arg("max_size") = 3);

    m.def("scale", [](const std::string& graph, std::size_t c) {
        json j = json::parse(graph);
        LabeledDigraph h = scale(graph_from_json(j), c);
        if (!j.contains("point")) return graph_to_json(h).dump();
        return graph_to_json(PointedGraph(h, scaled_id(j.at("point").get<std::string>(), 1))).dump();
    }, py::arg("graph"), py::arg("c"));

    m.def("unravel", [](const std::string& graph, std::size_t depth) {
        PointedGraph p = pointed_graph_from_json(json::parse(graph));
        return graph_to_json(unravel(p.graph, p.point, depth)).dump();
    }, py::arg("graph"), py::arg("depth"));
}
