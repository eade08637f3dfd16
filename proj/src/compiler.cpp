#include "modalnet/compiler.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace modalnet {

namespace {

struct Plan {
    std::vector<Formula> order;
    std::unordered_map<const FormulaNode*, std::size_t> index;
    std::size_t root = 0;

    std::size_t of(const Formula& f) const { return index.at(f.node()); }
    std::size_t size() const { return order.size(); }
};

std::vector<std::string> default_alphabet(const Formula& phi, std::vector<std::string> alphabet) {
    return alphabet.empty() ? atoms_of(phi) : alphabet;
}

Plan plan_for(const Formula& f, const std::vector<std::string>& alphabet) {
    Plan p;
    p.order = subformula_order(f, alphabet);
    for (std::size_t k = 0; k < p.order.size(); ++k) p.index.emplace(p.order[k].node(), k);
    p.root = p.of(f);
    return p;
}

std::vector<std::string> channel_names(const Plan& p, std::size_t total) {
    std::vector<std::string> names(total);
    for (std::size_t k = 0; k < p.size(); ++k) names[k] = print(p.order[k]);
    return names;
}

// L homogeneous layers of dimension L, each subformula filled by `fill`.
Gnn homogeneous(const Plan& p, const std::vector<std::string>& alphabet, Aggregation agg, Activation act,
                const std::function<void(SimpleComb&, const Formula&, std::size_t)>& fill) {
    const std::size_t L = p.size();
    SimpleComb comb(L, L, act);
    for (std::size_t k = 0; k < L; ++k) fill(comb, p.order[k], k);
    Gnn g;
    g.input_dim = L;
    g.alphabet = alphabet;
    g.layers.assign(L, Layer{agg, comb});
    g.cls = Classifier::threshold(p.root, true, Scalar(Rational(0)));
    g.channel_names = channel_names(p, L);
    return g;
}

// cases shared by the trReLU and step schemes
bool fill_boolean(SimpleComb& c, const Formula& f, std::size_t k, const Plan& p) {
    switch (f.op()) {
        case Op::Atom: c.C.at(k, k) = Rational(1); return true;
        case Op::Top: c.b[k] = Rational(1); return true;
        case Op::Bottom: return true;
        case Op::Not:
            c.C.at(p.of(f.sub()), k) = Rational(-1);
            c.b[k] = Rational(1);
            return true;
        case Op::Or:
            c.C.at(p.of(f.left()), k) = Rational(1);
            c.C.at(p.of(f.right()), k) = Rational(1);
            return true;
        default: return false;
    }
}

[[noreturn]] void unexpected(const Formula& f) {
    throw std::logic_error("compiler met an unexpected subformula: " + print(f));
}

bool is_box_bottom(const Formula& f) {
    return (f.is(Op::Box) && f.sub().is(Op::Bottom)) ||
           (f.is(Op::Not) && f.sub().is(Op::Dia) && f.sub().sub().is(Op::Top));
}

}  // namespace

Gnn compile_rml_bounded(const Formula& phi, std::uint32_t n, std::vector<std::string> alphabet) {
    if (n == 0) throw std::invalid_argument("size bound n must be positive");
    if (!in_rml(phi)) throw std::invalid_argument("not an RML formula: " + print(phi));
    alphabet = default_alphabet(phi, alphabet);
    Formula psi = desugar_rml_strict(eliminate_geq(phi, n));
    Plan p = plan_for(psi, alphabet);
    const Rational n2(static_cast<std::int64_t>(n) * n);
    return homogeneous(p, alphabet, Aggregation::Mean, Activation::TrRelu, [&](SimpleComb& c, const Formula& f, std::size_t k) {
        if (fill_boolean(c, f, k, p)) return;
        if (!f.is(Op::RDia) || f.rel() != Rel::Gt) unexpected(f);
        c.A.at(p.of(f.sub()), k) = n2;
        c.b[k] = -n2 * largest_fraction_below(f.ratio(), n, true);
    });
}

Gnn compile_ml_max(const Formula& phi, std::vector<std::string> alphabet) {
    if (!in_ml(phi)) throw std::invalid_argument("not an ML formula: " + print(phi));
    alphabet = default_alphabet(phi, alphabet);
    Formula psi = desugar_ml(phi);
    Plan p = plan_for(psi, alphabet);
    return homogeneous(p, alphabet, Aggregation::Max, Activation::TrRelu, [&](SimpleComb& c, const Formula& f, std::size_t k) {
        if (fill_boolean(c, f, k, p)) return;
        if (!f.is(Op::Dia)) unexpected(f);
        c.A.at(p.of(f.sub()), k) = Rational(1);
    });
}

Gnn compile_gml_sum(const Formula& phi, std::vector<std::string> alphabet) {
    if (!in_gml(phi)) throw std::invalid_argument("not a GML formula: " + print(phi));
    alphabet = default_alphabet(phi, alphabet);
    Formula psi = desugar_gml(phi);
    Plan p = plan_for(psi, alphabet);
    return homogeneous(p, alphabet, Aggregation::Sum, Activation::TrRelu, [&](SimpleComb& c, const Formula& f, std::size_t k) {
        if (fill_boolean(c, f, k, p)) return;
        if (!f.is(Op::GDia) || f.rel() != Rel::Geq) unexpected(f);
        c.A.at(p.of(f.sub()), k) = Rational(1);
        c.b[k] = Rational(1) - Rational(static_cast<std::int64_t>(f.count()));
    });
}

Formula rewrite_geq_as_strict_dual(const Formula& phi) {
    std::function<Formula(const Formula&)> go;
    std::unordered_map<const FormulaNode*, Formula> memo;
    go = [&](const Formula& f) -> Formula {
        if (auto it = memo.find(f.node()); it != memo.end()) return it->second;
        Formula out = f;
        if (!f.node()->kids.empty()) {
            FormulaNode n = *f.node();
            for (auto& k : n.kids) k = go(k);
            out = Formula::make(std::move(n));
        }
        if (out.is(Op::RDia) && out.rel() == Rel::Geq)
            out = neg(rdia(Rel::Gt, Rational(1) - out.ratio(), neg(out.sub())));
        memo.emplace(f.node(), out);
        return out;
    };
    return go(expand_equalities(phi));
}

Gnn compile_rml_step(const Formula& phi, std::vector<std::string> alphabet) {
    if (!in_rml(phi)) throw std::invalid_argument("not an RML formula: " + print(phi));
    alphabet = default_alphabet(phi, alphabet);
    Formula psi = desugar_rml_strict(rewrite_geq_as_strict_dual(phi));
    Plan p = plan_for(psi, alphabet);
    return homogeneous(p, alphabet, Aggregation::Mean, Activation::Step, [&](SimpleComb& c, const Formula& f, std::size_t k) {
        if (fill_boolean(c, f, k, p)) return;
        if (!f.is(Op::RDia) || f.rel() != Rel::Gt) unexpected(f);
        c.A.at(p.of(f.sub()), k) = Rational(1);
        c.b[k] = -f.ratio();
    });
}

Gnn compile_afml_trrelu(const Formula& phi, std::vector<std::string> alphabet) {
    alphabet = default_alphabet(phi, alphabet);
    bool dual = false;
    Formula psi = phi;
    if (!in_afml1(phi)) {
        if (!in_afml2(phi)) throw std::invalid_argument("formula is in neither AFML[1] nor AFML[2]: " + print(phi));
        psi = afml2_dual(phi);
        dual = true;
    }
    Plan p = plan_for(psi, alphabet);
    const std::size_t L = p.size(), D = 3 * L + 1, one = 3 * L;
    SimpleComb c(D, D, Activation::TrRelu);
    c.b[one] = Rational(1);
    for (std::size_t k = 0; k < L; ++k) {
        const Formula& f = p.order[k];
        if (is_box_bottom(f)) {
            c.A.add(one, k, Rational(-1));
            c.b[k] = Rational(1);
            continue;
        }
        switch (f.op()) {
            case Op::Atom: c.C.add(k, k, Rational(1)); break;
            case Op::Top: c.b[k] = Rational(1); break;
            case Op::Bottom: break;
            case Op::Not:
                if (!f.sub().is(Op::Atom)) unexpected(f);
                c.C.add(p.of(f.sub()), k, Rational(-1));
                c.b[k] = Rational(1);
                break;
            case Op::Or:
                c.C.add(p.of(f.left()), k, Rational(1));
                c.C.add(p.of(f.right()), k, Rational(1));
                break;
            case Op::Dia: c.A.add(p.of(f.sub()), k, Rational(1)); break;
            case Op::And: {
                // trReLU(x + y - trReLU(x - y) - trReLU(y - x)) via helpers k+L and k+2L
                std::size_t i = p.of(f.left()), j = p.of(f.right());
                c.C.add(i, k + L, Rational(1));
                c.C.add(j, k + L, Rational(-1));
                c.C.add(i, k + 2 * L, Rational(-1));
                c.C.add(j, k + 2 * L, Rational(1));
                c.C.add(i, k, Rational(1));
                c.C.add(j, k, Rational(1));
                c.C.add(k + L, k, Rational(-1));
                c.C.add(k + 2 * L, k, Rational(-1));
                break;
            }
            case Op::Box: unexpected(f);
            default: unexpected(f);
        }
    }
    Gnn g;
    g.input_dim = D;
    g.alphabet = alphabet;
    g.layers.assign(2 * L, Layer{Aggregation::Mean, c});
    g.channel_names = channel_names(p, D);
    for (std::size_t k = 0; k < L; ++k) {
        if (p.order[k].is(Op::And)) {
            g.channel_names[k + L] = "relu(" + g.channel_names[k] + ":left-right)";
            g.channel_names[k + 2 * L] = "relu(" + g.channel_names[k] + ":right-left)";
        }
    }
    g.channel_names[one] = "const 1";
    g.cls = Classifier::threshold(p.root, true, Scalar(Rational(0)));
    if (dual) {
        SimpleComb flip(D, 1, Activation::TrRelu);
        flip.C.at(p.root, 0) = Rational(-1);
        flip.b[0] = Rational(1);
        g.layers.push_back({Aggregation::Mean, flip});
        g.cls = Classifier::threshold(0, false, Scalar(Rational(1)));
        g.channel_names.push_back(print(phi));
    }
    return g;
}

namespace gadget {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double tau(double x) { return -sigmoid(sigmoid(x)) - sigmoid(sigmoid(-x)); }
double e_min() { return -2.0 * sigmoid(sigmoid(0.0)); }
double alpha(double x, double y) { return tau(tau(x - y) - tau(x + y - 1.0)) - e_min(); }

}  // namespace gadget

Gnn compile_afml_sigmoid(const Formula& phi, std::vector<std::string> alphabet, std::int64_t gain,
                         std::int64_t and_gain) {
    if (gain <= 0 || and_gain <= 0) throw std::invalid_argument("sigmoid gains must be positive");
    alphabet = default_alphabet(phi, alphabet);
    bool dual = false;
    Formula psi = phi;
    if (!in_afml1(phi)) {
        if (!in_afml2(phi)) throw std::invalid_argument("formula is in neither AFML[1] nor AFML[2]: " + print(phi));
        psi = afml2_dual(phi);
        dual = true;
    }
    Plan p = plan_for(psi, alphabet);
    const std::size_t L = p.size(), D = 13 * L + 1, half = 13 * L;
    const double gm = static_cast<double>(gain), ga = static_cast<double>(and_gain);
    auto temp = [&](std::size_t k, std::size_t s) { return L + 12 * k + s; };

    // first layer: literals only; every other channel becomes sigma(0) = 1/2
    SimpleComb first(D, D, Activation::Sigmoid);
    for (auto& x : first.b) x = Scalar(0.0);
    for (std::size_t k = 0; k < L; ++k) {
        const Formula& f = p.order[k];
        if (f.is(Op::Atom)) {
            first.C.at(k, k) = 1.0;
        } else if (f.is(Op::Not) && f.sub().is(Op::Atom)) {
            first.C.at(p.of(f.sub()), k) = -1.0;
            first.b[k] = 1.0;
        }
    }

    SimpleComb c(D, D, Activation::Sigmoid);
    for (auto& x : c.b) x = Scalar(0.0);
    auto add = [](Matrix& m, std::size_t r, std::size_t col, double v) { m.at(r, col) = m.at(r, col).to_double() + v; };
    const double emin = gadget::e_min();
    for (std::size_t k = 0; k < L; ++k) {
        const Formula& f = p.order[k];
        if (is_box_bottom(f)) {
            add(c.A, half, k, -gm);
            c.b[k] = gm / 2;
            continue;
        }
        switch (f.op()) {
            case Op::Atom:
                add(c.C, k, k, gm);
                c.b[k] = -gm / 2;
                break;
            case Op::Not:
                if (!f.sub().is(Op::Atom)) unexpected(f);
                add(c.C, k, k, gm);
                c.b[k] = -gm / 2;
                break;
            case Op::Top: c.b[k] = gm / 2; break;
            case Op::Bottom: break;
            case Op::Or:
                add(c.C, p.of(f.left()), k, gm);
                add(c.C, p.of(f.right()), k, gm);
                c.b[k] = -gm;
                break;
            case Op::Dia:
                add(c.A, p.of(f.sub()), k, gm);
                add(c.A, half, k, -gm);
                break;
            case Op::And: {
                std::size_t i = p.of(f.left()), j = p.of(f.right());
                // stage 1: sigma of x-y, y-x, x+y-1, 1-x-y
                add(c.C, i, temp(k, 0), 1);
                add(c.C, j, temp(k, 0), -1);
                add(c.C, i, temp(k, 1), -1);
                add(c.C, j, temp(k, 1), 1);
                add(c.C, i, temp(k, 2), 1);
                add(c.C, j, temp(k, 2), 1);
                c.b[temp(k, 2)] = -1.0;
                add(c.C, i, temp(k, 3), -1);
                add(c.C, j, temp(k, 3), -1);
                c.b[temp(k, 3)] = 1.0;
                // stage 2: second sigmoid of each
                for (std::size_t s = 0; s < 4; ++s) add(c.C, temp(k, s), temp(k, 4 + s), 1);
                // stage 3: D = tau(x-y) - tau(x+y-1) and its negation
                const double sign[4] = {-1, -1, 1, 1};
                for (std::size_t s = 0; s < 4; ++s) {
                    add(c.C, temp(k, 4 + s), temp(k, 8), sign[s]);
                    add(c.C, temp(k, 4 + s), temp(k, 9), -sign[s]);
                }
                // stage 4, 5: tau(D) - e_min
                add(c.C, temp(k, 8), temp(k, 10), 1);
                add(c.C, temp(k, 9), temp(k, 11), 1);
                add(c.C, temp(k, 10), k, -ga);
                add(c.C, temp(k, 11), k, -ga);
                c.b[k] = -ga * emin;
                break;
            }
            default: unexpected(f);
        }
    }
    Gnn g;
    g.input_dim = D;
    g.alphabet = alphabet;
    g.layers.push_back({Aggregation::Mean, first});
    for (std::size_t l = 0; l < 5 * L; ++l) g.layers.push_back({Aggregation::Mean, c});
    g.channel_names = channel_names(p, D);
    g.channel_names[half] = "const 1/2";
    g.cls = Classifier::threshold(p.root, true, Scalar(0.5));
    if (dual) {
        SimpleComb flip(D, 1, Activation::Sigmoid);
        flip.C.at(p.root, 0) = -gm;
        flip.b[0] = gm / 2;
        g.layers.push_back({Aggregation::Mean, flip});
        g.cls = Classifier::threshold(0, false, Scalar(0.5));
        g.channel_names.push_back(print(phi));
    }
    return g;
}

Gnn compile_ml_irrational(const Formula& phi, std::vector<std::string> alphabet) {
    if (!in_ml(phi)) throw std::invalid_argument("not an ML formula: " + print(phi));
    alphabet = default_alphabet(phi, alphabet);
    Formula psi = desugar_ml(phi);
    Plan p = plan_for(psi, alphabet);
    const std::size_t L = p.size();
    auto oracle = std::make_shared<NegationOracle>();
    const QuadExt a = oracle->lower(), b = oracle->upper();
    using K = ChannelRecipe::Kind;

    BuiltinComb first{L, L, {}, nullptr, nullptr};
    BuiltinComb rest{L, L, {}, oracle, nullptr};
    for (std::size_t k = 0; k < L; ++k) {
        const Formula& f = p.order[k];
        ChannelRecipe r1, r2;
        switch (f.op()) {
            case Op::Atom:
                r1 = {K::Affine, k, 0, b - a, a};
                r2 = {K::Own, k, 0, {}, {}};
                break;
            case Op::Top:
                r1 = {K::Constant, 0, 0, {}, b};
                r2 = r1;
                break;
            case Op::Bottom:
                r1 = {K::Constant, 0, 0, {}, a};
                r2 = r1;
                break;
            case Op::Not:
                r1 = {K::Constant, 0, 0, {}, a};
                r2 = {K::Negation, p.of(f.sub()), 0, {}, {}};
                break;
            case Op::Or:
                r1 = {K::Constant, 0, 0, {}, a};
                r2 = {K::Average, p.of(f.left()), p.of(f.right()), {}, {}};
                break;
            case Op::Dia:
                r1 = {K::Constant, 0, 0, {}, a};
                r2 = {K::Aggregated, p.of(f.sub()), 0, {}, {}};
                break;
            default: unexpected(f);
        }
        first.channels.push_back(r1);
        rest.channels.push_back(r2);
    }
    Gnn g;
    g.input_dim = L;
    g.alphabet = alphabet;
    g.layers.push_back({Aggregation::Mean, first});
    for (std::size_t l = 0; l < L; ++l) g.layers.push_back({Aggregation::Mean, rest});
    g.cls = Classifier::irrational(p.root);
    g.channel_names = channel_names(p, L);
    return g;
}

Gnn trrelu_to_relu(const Gnn& gnn) {
    Gnn out;
    out.input_dim = gnn.input_dim;
    out.alphabet = gnn.alphabet;
    out.cls = gnn.cls;
    out.channel_names = gnn.channel_names;
    for (std::size_t l = 0; l < gnn.layers.size(); ++l) {
        const Layer& layer = gnn.layers[l];
        if (!layer.is_simple() || layer.simple().activation != Activation::TrRelu)
            throw std::invalid_argument("layer " + std::to_string(l + 1) + " is not a simple trReLU layer");
        const SimpleComb& s = layer.simple();
        const std::size_t in = s.in_dim(), d = s.out_dim();
        SimpleComb up(in, 2 * d, Activation::Relu);
        for (std::size_t r = 0; r < in; ++r)
            for (std::size_t k = 0; k < d; ++k) {
                up.C.at(r, k) = up.C.at(r, d + k) = s.C.at(r, k);
                up.A.at(r, k) = up.A.at(r, d + k) = s.A.at(r, k);
            }
        for (std::size_t k = 0; k < d; ++k) {
            up.b[k] = s.b[k];
            up.b[d + k] = s.b[k].as<Rational>() - Rational(1);
        }
        SimpleComb down(2 * d, d, Activation::Relu);
        for (std::size_t k = 0; k < d; ++k) {
            down.C.at(k, k) = Rational(1);
            down.C.at(d + k, k) = Rational(-1);
        }
        out.layers.push_back({layer.agg, up});
        out.layers.push_back({layer.agg, down});
    }
    return out;
}

QuadExt oracle_query(NegationOracle& oracle, const QuadExt& x) { return oracle.query(x); }

Gnn compile_named(const Formula& phi, const std::string& logic, std::string act, std::uint32_t bound,
                  std::vector<std::string> alphabet) {
    if (act.empty()) act = "trrelu";
    auto relu_if = [&](Gnn g) { return act == "relu" ? trrelu_to_relu(g) : g; };
    auto need = [&](std::initializer_list<const char*> ok) {
        for (const char* a : ok)
            if (act == a) return;
        throw std::invalid_argument(logic + " does not compile to activation '" + act + "'");
    };
    if (logic == "rml") {
        need({"trrelu", "relu", "step"});
        if (act == "step") return compile_rml_step(phi, alphabet);
        if (bound == 0) throw std::invalid_argument("rml with " + act + " needs a graph size bound");
        return relu_if(compile_rml_bounded(phi, bound, alphabet));
    }
    if (logic == "ml") {
        need({"trrelu", "relu", "irrational"});
        if (act == "irrational") return compile_ml_irrational(phi, alphabet);
        return relu_if(compile_ml_max(phi, alphabet));
    }
    if (logic == "gml") {
        need({"trrelu", "relu"});
        return relu_if(compile_gml_sum(phi, alphabet));
    }
    if (logic == "afml") {
        need({"trrelu", "relu", "sigmoid"});
        if (act == "sigmoid") return compile_afml_sigmoid(phi, alphabet);
        return relu_if(compile_afml_trrelu(phi, alphabet));
    }
    throw std::invalid_argument("unknown logic '" + logic + "'");
}

}  // namespace modalnet
