#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "modalnet/formula.hpp"

namespace modalnet {

namespace {

// Bottom-up rewriting with memoization over shared subterms. `step` sees the
// node with already-rewritten children.
class Rewriter {
public:
    explicit Rewriter(std::function<Formula(const Formula&)> step) : step_(std::move(step)) {}

    Formula operator()(const Formula& f) {
        if (auto it = memo_.find(f.node()); it != memo_.end()) return it->second;
        Formula rebuilt = f;
        if (!f.node()->kids.empty()) {
            FormulaNode n = *f.node();
            bool changed = false;
            for (auto& k : n.kids) {
                Formula nk = (*this)(k);
                if (nk != k) changed = true;
                k = nk;
            }
            if (changed) rebuilt = Formula::make(std::move(n));
        }
        Formula out = step_(rebuilt);
        memo_.emplace(f.node(), out);
        return out;
    }

private:
    std::function<Formula(const Formula&)> step_;
    std::unordered_map<const FormulaNode*, Formula> memo_;
};

Formula neg_smart(const Formula& f) { return f.is(Op::Not) ? f.sub() : neg(f); }

bool is_literal(const Formula& f) { return f.is(Op::Atom) || (f.is(Op::Not) && f.sub().is(Op::Atom)); }

bool is_box_bottom(const Formula& f) {
    return (f.is(Op::Box) && f.sub().is(Op::Bottom)) || (f.is(Op::Not) && f.sub().is(Op::Dia) && f.sub().sub().is(Op::Top));
}

bool is_dia_top(const Formula& f) {
    return (f.is(Op::Dia) && f.sub().is(Op::Top)) || (f.is(Op::Not) && f.sub().is(Op::Box) && f.sub().sub().is(Op::Bottom));
}

struct Flags {
    bool ml = true;
    bool gml = true;
    bool rml = true;
    bool afml1 = true;
    bool afml2 = true;
    std::uint32_t max_count = 0;
};

class Analyzer {
public:
    const Flags& run(const Formula& f) {
        if (auto it = memo_.find(f.node()); it != memo_.end()) return it->second;
        Flags fl;
        for (const auto& k : f.node()->kids) {
            const Flags& s = run(k);
            fl.ml &= s.ml;
            fl.gml &= s.gml;
            fl.rml &= s.rml;
            fl.max_count = std::max(fl.max_count, s.max_count);
        }
        switch (f.op()) {
            case Op::GDia:
                fl.ml = false;
                fl.rml = false;
                fl.max_count = std::max(fl.max_count, f.rel() == Rel::Eq ? f.count() + 1 : f.count());
                break;
            case Op::RDia:
                fl.ml = false;
                fl.gml = false;
                break;
            default: break;
        }
        fl.afml1 = afml1(f);
        fl.afml2 = afml2(f);
        return memo_.emplace(f.node(), fl).first->second;
    }

    bool afml1(const Formula& f) {
        if (is_literal(f) || f.is(Op::Top) || f.is(Op::Bottom) || is_box_bottom(f)) return true;
        if (f.is(Op::And) || f.is(Op::Or)) return run(f.left()).afml1 && run(f.right()).afml1;
        if (f.is(Op::Dia)) return run(f.sub()).afml1;
        return false;
    }

    bool afml2(const Formula& f) {
        if (is_literal(f) || f.is(Op::Top) || f.is(Op::Bottom) || is_dia_top(f)) return true;
        if (f.is(Op::And) || f.is(Op::Or)) return run(f.left()).afml2 && run(f.right()).afml2;
        if (f.is(Op::Box)) return run(f.sub()).afml2;
        return false;
    }

private:
    std::unordered_map<const FormulaNode*, Flags> memo_;
};

}  // namespace

FragmentReport analyze(const Formula& f) {
    Analyzer a;
    const Flags& fl = a.run(f);
    FragmentReport r;
    r.modal_depth = modal_depth(f);
    r.in_ml = fl.ml;
    r.in_gml = fl.gml;
    r.in_rml = fl.rml;
    r.max_count = fl.max_count;
    r.in_afml1 = fl.afml1;
    r.in_afml2 = fl.afml2;
    return r;
}

bool in_ml(const Formula& f) { return analyze(f).in_ml; }
bool in_gml(const Formula& f) { return analyze(f).in_gml; }
bool in_rml(const Formula& f) { return analyze(f).in_rml; }
bool in_afml1(const Formula& f) { return analyze(f).in_afml1; }
bool in_afml2(const Formula& f) { return analyze(f).in_afml2; }

std::vector<Formula> subformula_order(const Formula& f, const std::vector<std::string>& alphabet) {
    std::vector<Formula> order;
    std::set<const FormulaNode*> seen;
    for (const auto& label : alphabet) {
        Formula a = atom(label);
        seen.insert(a.node());
        order.push_back(a);
    }
    for (const auto& name : atoms_of(f)) {
        if (std::find(alphabet.begin(), alphabet.end(), name) == alphabet.end())
            throw std::invalid_argument("formula uses label '" + name + "' outside the alphabet");
    }
    // iterative post-order
    std::vector<std::pair<Formula, bool>> stack{{f, false}};
    while (!stack.empty()) {
        auto [g, expanded] = stack.back();
        stack.pop_back();
        if (seen.count(g.node())) continue;
        if (expanded) {
            seen.insert(g.node());
            order.push_back(g);
            continue;
        }
        stack.emplace_back(g, true);
        const auto& kids = g.node()->kids;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, false);
    }
    return order;
}

std::vector<Formula> subformula_order(const Formula& f) { return subformula_order(f, atoms_of(f)); }

Rational largest_fraction_below(const Rational& t, std::uint32_t n, bool inclusive) {
    if (n == 0) throw std::invalid_argument("denominator bound must be positive");
    bool found = false;
    Rational best(0);
    for (std::int64_t m = 1; m <= n; ++m) {
        for (std::int64_t l = 0; l <= m; ++l) {
            Rational q(l, m);
            bool ok = inclusive ? q <= t : q < t;
            if (ok && (!found || q > best)) {
                best = q;
                found = true;
            }
        }
    }
    if (!found) throw std::invalid_argument("no fraction with denominator <= n below " + t.str());
    return best;
}

Formula expand_equalities(const Formula& f) {
    Rewriter rw([](const Formula& g) {
        if (g.is(Op::GDia) && g.rel() == Rel::Eq)
            return conj(gdia(Rel::Geq, g.count(), g.sub()), neg(gdia(Rel::Geq, g.count() + 1, g.sub())));
        if (g.is(Op::RDia) && g.rel() == Rel::Eq)
            return conj(rdia(Rel::Geq, g.ratio(), g.sub()), neg(rdia(Rel::Gt, g.ratio(), g.sub())));
        return g;
    });
    return rw(f);
}

Formula eliminate_geq(const Formula& f, std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("eliminate_geq needs n >= 1");
    if (!in_rml(f)) throw std::invalid_argument("eliminate_geq expects an RML formula");
    const Formula leaf = neg(rdia(Rel::Gt, Rational(0), top()));
    Rewriter rw([&](const Formula& g) {
        if (!g.is(Op::RDia) || g.rel() != Rel::Geq) return g;
        if (g.ratio().is_zero()) return top();
        // leaves satisfy every >= diamond but no > diamond, hence the leaf disjunct
        Rational t = largest_fraction_below(g.ratio(), n, false);
        return disj(rdia(Rel::Gt, t, g.sub()), leaf);
    });
    return rw(expand_equalities(f));
}

Formula afml2_dual(const Formula& f) {
    if (!in_afml2(f)) throw std::invalid_argument("formula is not in AFML[2]: " + print(f));
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (is_dia_top(g)) return box(bottom());
        switch (g.op()) {
            case Op::Atom: return neg(g);
            case Op::Not: return g.sub();
            case Op::Top: return bottom();
            case Op::Bottom: return top();
            case Op::And: return disj(go(g.left()), go(g.right()));
            case Op::Or: return conj(go(g.left()), go(g.right()));
            case Op::Box: return dia(go(g.sub()));
            default: throw std::logic_error("unreachable AFML[2] case");
        }
    };
    return go(f);
}

Formula afml1_dual(const Formula& f) {
    if (!in_afml1(f)) throw std::invalid_argument("formula is not in AFML[1]: " + print(f));
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (is_box_bottom(g)) return dia(top());
        switch (g.op()) {
            case Op::Atom: return neg(g);
            case Op::Not: return g.sub();
            case Op::Top: return bottom();
            case Op::Bottom: return top();
            case Op::And: return disj(go(g.left()), go(g.right()));
            case Op::Or: return conj(go(g.left()), go(g.right()));
            case Op::Dia: return box(go(g.sub()));
            default: throw std::logic_error("unreachable AFML[1] case");
        }
    };
    return go(f);
}

Formula desugar_ml(const Formula& f) {
    if (!in_ml(f)) throw std::invalid_argument("formula is not in ML: " + print(f));
    Rewriter rw([](const Formula& g) {
        switch (g.op()) {
            case Op::And: return neg_smart(disj(neg_smart(g.left()), neg_smart(g.right())));
            case Op::Box: return neg_smart(dia(neg_smart(g.sub())));
            case Op::Not: return neg_smart(g.sub());
            default: return g;
        }
    });
    return rw(f);
}

Formula desugar_gml(const Formula& f) {
    if (!in_gml(f)) throw std::invalid_argument("formula is not in GML: " + print(f));
    Rewriter rw([](const Formula& g) {
        switch (g.op()) {
            case Op::And: return neg_smart(disj(neg_smart(g.left()), neg_smart(g.right())));
            case Op::Dia: return gdia(Rel::Geq, 1, g.sub());
            case Op::Box: return neg_smart(gdia(Rel::Geq, 1, neg_smart(g.sub())));
            case Op::Not: return neg_smart(g.sub());
            default: return g;
        }
    });
    return rw(expand_equalities(f));
}

Formula desugar_rml_strict(const Formula& f) {
    if (!in_rml(f)) throw std::invalid_argument("formula is not in RML: " + print(f));
    Rewriter rw([](const Formula& g) {
        switch (g.op()) {
            case Op::And: return neg_smart(disj(neg_smart(g.left()), neg_smart(g.right())));
            case Op::Dia: return rdia(Rel::Gt, Rational(0), g.sub());
            case Op::Box: return neg_smart(rdia(Rel::Gt, Rational(0), neg_smart(g.sub())));
            case Op::Not: return neg_smart(g.sub());
            case Op::RDia:
                if (g.rel() != Rel::Gt) throw std::invalid_argument("unexpected non-strict ratio diamond");
                return g;
            default: return g;
        }
    });
    return rw(f);
}

Formula simplify(const Formula& f) {
    Rewriter rw([](const Formula& g) -> Formula {
        auto is_t = [](const Formula& x) { return x.is(Op::Top); };
        auto is_b = [](const Formula& x) { return x.is(Op::Bottom); };
        switch (g.op()) {
            case Op::Not:
                if (is_t(g.sub())) return bottom();
                if (is_b(g.sub())) return top();
                if (g.sub().is(Op::Not)) return g.sub().sub();
                return g;
            case Op::And:
                if (is_b(g.left()) || is_b(g.right())) return bottom();
                if (is_t(g.left())) return g.right();
                if (is_t(g.right()) || g.left() == g.right()) return g.left();
                return g;
            case Op::Or:
                if (is_t(g.left()) || is_t(g.right())) return top();
                if (is_b(g.left())) return g.right();
                if (is_b(g.right()) || g.left() == g.right()) return g.left();
                return g;
            case Op::Dia: return is_b(g.sub()) ? bottom() : g;
            case Op::Box: return is_t(g.sub()) ? top() : g;
            case Op::GDia:
                if (g.rel() == Rel::Geq && g.count() == 0) return top();
                if (is_b(g.sub())) return g.count() == 0 ? top() : bottom();
                return g;
            case Op::RDia:
                if (g.rel() == Rel::Geq && g.ratio().is_zero()) return top();
                if (g.rel() == Rel::Gt && (is_b(g.sub()) || g.ratio() == Rational(1))) return bottom();
                if (g.rel() == Rel::Eq && g.ratio().is_zero() && is_b(g.sub())) return top();
                return g;
            default: return g;
        }
    });
    return rw(f);
}

}  // namespace modalnet
