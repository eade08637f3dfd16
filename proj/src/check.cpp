#include <bit>
#include <unordered_map>

#include "modalnet/formula.hpp"

namespace modalnet {

namespace {

bool modal(const FormulaNode& f, std::int64_t k, std::int64_t m) {
    switch (f.op) {
        case Op::Dia: return k > 0;
        case Op::Box: return k == m;
        case Op::GDia:
            return f.rel == Rel::Eq ? k == static_cast<std::int64_t>(f.count) : k >= static_cast<std::int64_t>(f.count);
        default: break;
    }
    // ratio diamonds: exact fraction k/m against r; leaves satisfy >= and = but not >
    if (m == 0) return f.rel != Rel::Gt;
    __int128 lhs = static_cast<__int128>(k) * f.ratio.den();
    __int128 rhs = static_cast<__int128>(f.ratio.num()) * m;
    switch (f.rel) {
        case Rel::Geq: return lhs >= rhs;
        case Rel::Gt: return lhs > rhs;
        case Rel::Eq: return lhs == rhs;
    }
    return false;
}

}  // namespace

struct FormulaEvaluator::Step {
    const FormulaNode* node;
    std::size_t a = 0, b = 0;  // operand steps
};

FormulaEvaluator::FormulaEvaluator(const Formula& f) : root_(f) {
    std::unordered_map<const FormulaNode*, std::size_t> at;
    // iterative post-order
    std::vector<std::pair<const FormulaNode*, bool>> stack{{f.node(), false}};
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (at.count(n)) continue;
        if (!expanded) {
            stack.push_back({n, true});
            for (const auto& k : n->kids)
                if (!at.count(k.node())) stack.push_back({k.node(), false});
            continue;
        }
        Step s{n};
        if (!n->kids.empty()) s.a = at.at(n->kids[0].node());
        if (n->kids.size() > 1) s.b = at.at(n->kids[1].node());
        at.emplace(n, steps_.size());
        steps_.push_back(s);
    }
}

FormulaEvaluator::~FormulaEvaluator() = default;
FormulaEvaluator::FormulaEvaluator(const FormulaEvaluator&) = default;
FormulaEvaluator& FormulaEvaluator::operator=(const FormulaEvaluator&) = default;

std::vector<bool> FormulaEvaluator::check_all(const LabeledDigraph& g) const {
    const std::size_t n = g.size(), W = (n + 63) / 64;
    std::vector<std::uint64_t> succ(n * W, 0);
    std::vector<std::int64_t> deg(n);
    for (VertexIndex v = 0; v < n; ++v) {
        deg[v] = static_cast<std::int64_t>(g.successors(v).size());
        for (auto u : g.successors(v)) succ[v * W + u / 64] |= std::uint64_t{1} << (u % 64);
    }
    std::vector<std::uint64_t> val(steps_.size() * W, 0);
    auto row = [&](std::size_t i) { return val.data() + i * W; };
    std::vector<std::uint64_t> full(W, ~std::uint64_t{0});
    if (n % 64) full[W - 1] = (std::uint64_t{1} << (n % 64)) - 1;

    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const Step& s = steps_[i];
        const FormulaNode& f = *s.node;
        std::uint64_t* out = row(i);
        switch (f.op) {
            case Op::Atom: {
                auto label = g.find_label(f.atom);
                if (!label) throw std::invalid_argument("formula uses label '" + f.atom + "' outside the alphabet");
                for (VertexIndex v = 0; v < n; ++v)
                    if (g.has_label(v, *label)) out[v / 64] |= std::uint64_t{1} << (v % 64);
                break;
            }
            case Op::Top:
                for (std::size_t w = 0; w < W; ++w) out[w] = full[w];
                break;
            case Op::Bottom: break;
            case Op::Not:
                for (std::size_t w = 0; w < W; ++w) out[w] = ~row(s.a)[w] & full[w];
                break;
            case Op::And:
                for (std::size_t w = 0; w < W; ++w) out[w] = row(s.a)[w] & row(s.b)[w];
                break;
            case Op::Or:
                for (std::size_t w = 0; w < W; ++w) out[w] = row(s.a)[w] | row(s.b)[w];
                break;
            case Op::Dia:
            case Op::Box:
            case Op::GDia:
            case Op::RDia: {
                const std::uint64_t* a = row(s.a);
                for (VertexIndex v = 0; v < n; ++v) {
                    std::int64_t k = 0;
                    for (std::size_t w = 0; w < W; ++w) k += std::popcount(a[w] & succ[v * W + w]);
                    if (modal(f, k, deg[v])) out[v / 64] |= std::uint64_t{1} << (v % 64);
                }
                break;
            }
        }
    }
    std::vector<bool> result(n);
    const std::uint64_t* r = row(steps_.size() - 1);
    for (VertexIndex v = 0; v < n; ++v) result[v] = (r[v / 64] >> (v % 64)) & 1u;
    return result;
}

std::vector<bool> check_all(const LabeledDigraph& g, const Formula& f) { return FormulaEvaluator(f).check_all(g); }

bool check(const LabeledDigraph& g, VertexIndex v, const Formula& f) {
    if (v >= g.size()) throw std::out_of_range("vertex index out of range");
    return check_all(g, f)[v];
}

bool check(const LabeledDigraph& g, const std::string& v, const Formula& f) { return check(g, g.index(v), f); }

bool check(const PointedGraph& g, const Formula& f) { return check(g.graph, g.point, f); }

}  // namespace modalnet
