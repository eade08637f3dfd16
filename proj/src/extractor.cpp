#include "modalnet/extractor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace modalnet {

namespace {

struct VecLess {
    bool operator()(const Vector& a, const Vector& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        for (std::size_t i = 0; i < a.size(); ++i) {
            Rational x = a[i].as<Rational>(), y = b[i].as<Rational>();
            if (x != y) return x < y;
        }
        return false;
    }
};

using VecSet = std::set<Vector, VecLess>;
using FormulaOf = std::map<Vector, Formula, VecLess>;

void require(const Gnn& g, Aggregation agg, const char* what) {
    g.validate();
    if (gnn_domain(g) != Domain::Rational) throw std::invalid_argument(std::string(what) + " needs a rational-path GNN");
    for (const auto& l : g.layers)
        if (l.agg != agg)
            throw std::invalid_argument(std::string(what) + " needs " + to_string(agg) + " aggregation in every layer");
}

Vector label_vector(LabelSet labels, std::size_t r, std::size_t dim) {
    Vector x(dim, Scalar(Rational(0)));
    for (std::size_t i = 0; i < r; ++i)
        if ((labels >> i) & 1u) x[i] = Scalar(Rational(1));
    return x;
}

Formula label_formula(const Vector& x, const std::vector<std::string>& alphabet) {
    std::vector<Formula> lits;
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        lits.push_back(x[i].is_zero() ? neg(atom(alphabet[i])) : atom(alphabet[i]));
    return conj_all(lits);
}

void check_guard(std::size_t count, std::size_t limit, std::size_t layer, const char* what) {
    if (count > limit)
        throw GuardExceeded(std::string(what) + " at layer " + std::to_string(layer) + " exceeds the guard of " +
                            std::to_string(limit));
}

// Calls fn(counts) for every p-tuple of naturals summing to m.
void compositions(std::size_t p, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> k(p, 0);
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t left) {
        if (i + 1 == p) {
            k[i] = left;
            fn(k);
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            k[i] = v;
            go(i + 1, left - v);
        }
    };
    if (p == 0) {
        if (m == 0) fn(k);
        return;
    }
    go(0, m);
}

Vector weighted_sum(const std::vector<Vector>& zs, const std::vector<Rational>& w, std::size_t dim) {
    std::vector<Rational> acc(dim, Rational(0));
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (w[i].is_zero()) continue;
        for (std::size_t d = 0; d < dim; ++d) acc[d] += w[i] * zs[i][d].as<Rational>();
    }
    return Vector(acc.begin(), acc.end());
}

// Componentwise max of the selected vectors; the empty selection gives 0.
Vector max_of(const std::vector<Vector>& zs, std::size_t mask, std::size_t dim) {
    std::vector<Rational> acc(dim, Rational(0));
    bool first = true;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!((mask >> i) & 1u)) continue;
        for (std::size_t d = 0; d < dim; ++d) {
            Rational v = zs[i][d].as<Rational>();
            if (first || v > acc[d]) acc[d] = v;
        }
        first = false;
    }
    return Vector(acc.begin(), acc.end());
}

struct Profile {
    std::vector<Rational> weights;  // per vector of the previous layer; empty for a join profile
    Vector aggregated;
    bool leaf = false;
};

bool leq(const Vector& a, const Vector& b) {
    for (std::size_t d = 0; d < a.size(); ++d)
        if (a[d].as<Rational>() > b[d].as<Rational>()) return false;
    return true;
}

// MAX aggregates of successor sets over prev. Small bases list every subset;
// larger ones list each distinct componentwise max once.
std::vector<Profile> max_profiles(const std::vector<Vector>& prev, std::size_t dim, const ExtractOptions& opts,
                                  std::size_t layer) {
    std::vector<Profile> out;
    if (prev.size() <= opts.max_subset_vectors) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << prev.size()); ++mask) {
            std::vector<Rational> in(prev.size(), Rational(0));
            for (std::size_t i = 0; i < prev.size(); ++i)
                if ((mask >> i) & 1u) in[i] = Rational(1);
            out.push_back({in, max_of(prev, mask, dim), mask == 0});
        }
        return out;
    }
    VecSet joins;
    for (const auto& z : prev) {
        VecSet grown = joins;
        grown.insert(z);
        for (const auto& j : joins) {
            Vector m = j;
            for (std::size_t d = 0; d < dim; ++d)
                if (z[d].as<Rational>() > m[d].as<Rational>()) m[d] = z[d];
            grown.insert(std::move(m));
        }
        joins = std::move(grown);
        check_guard(joins.size(), opts.max_joins, layer, "distinct successor maxima");
    }
    out.push_back({{}, Vector(dim, Scalar(Rational(0))), true});
    for (const auto& m : joins) out.push_back({{}, m, false});
    return out;
}

// Shared driver: layer formulas from profiles of the previous layer.
Formula extract_with(const Gnn& gnn, const FeatureSpace& space,
                     const std::function<std::vector<Profile>(const std::vector<Vector>&, std::size_t)>& profiles,
                     const std::function<Formula(const Profile&, const std::vector<Formula>&)>& profile_formula,
                     const std::function<std::string(const Profile&)>& profile_name, const ExtractOptions& opts,
                     ExtractionTrace* trace) {
    FormulaOf cur;
    for (const auto& x : space.layers[0]) cur.emplace(x, label_formula(x, space.alphabet));
    if (trace) trace->space = space;

    for (std::size_t l = 1; l <= gnn.layers.size(); ++l) {
        const auto& prev = space.layers[l - 1];
        std::vector<Formula> prev_f;
        for (const auto& z : prev) prev_f.push_back(cur.at(z));
        CompiledComb comb(gnn.layers[l - 1], Domain::Rational);
        std::map<Vector, std::vector<Formula>, VecLess> parts;
        auto ps = profiles(prev, l);
        check_guard(ps.size(), opts.max_profiles, l, "profile count");
        std::vector<Formula> shape;
        shape.reserve(ps.size());
        for (const auto& p : ps) shape.push_back(profile_formula(p, prev_f));
        for (std::size_t yi = 0; yi < prev.size(); ++yi) {
            std::vector<Vector> xs;
            for (const auto& p : ps) xs.push_back(comb.apply(prev[yi], p.aggregated));
            // profiles cover every successor situation, so a constant outcome needs no shape
            if (!xs.empty() && std::all_of(xs.begin(), xs.end(), [&](const Vector& x) { return x == xs[0]; })) {
                if (space.contains(l, xs[0])) {
                    parts[xs[0]].push_back(prev_f[yi]);
                    if (trace) trace->disjuncts.push_back({l, xs[0], prev[yi], "any"});
                }
                continue;
            }
            for (std::size_t pi = 0; pi < ps.size(); ++pi) {
                const Vector& x = xs[pi];
                if (!space.contains(l, x)) continue;
                parts[x].push_back(conj(prev_f[yi], shape[pi]));
                if (trace) trace->disjuncts.push_back({l, x, prev[yi], profile_name(ps[pi])});
            }
        }
        FormulaOf next;
        for (const auto& x : space.layers[l]) {
            auto it = parts.find(x);
            next.emplace(x, it == parts.end() ? bottom() : disj_all(it->second));
        }
        cur = std::move(next);
    }
    std::vector<Formula> accepted;
    for (const auto& [x, f] : cur)
        if (classify_vector(gnn.cls, x)) accepted.push_back(f);
    Formula out = disj_all(accepted);
    return opts.simplify ? simplify(out) : out;
}

FeatureSpace realizable(const Gnn& gnn, std::size_t n, const ExtractOptions& opts) {
    if (n == 0) throw std::invalid_argument("size bound n must be positive");
    FeatureSpace space;
    space.mode = FeatureMode::Realizable;
    space.n = n;
    space.alphabet = extraction_alphabet(gnn, opts);
    Gnn probe = gnn;
    probe.alphabet = space.alphabet;
    Evaluator ev(probe);
    std::vector<VecSet> sets(gnn.layers.size() + 1);
    enumerate_unpointed(space.alphabet, 1, n, [&](const LabeledDigraph& g) {
        auto t = ev.trace(g);
        for (std::size_t l = 0; l < t.layers.size(); ++l) {
            for (auto& v : t.layers[l]) sets[l].insert(std::move(v));
            check_guard(sets[l].size(), opts.max_vectors, l, "feature vector count");
        }
        return true;
    });
    for (auto& s : sets) space.layers.emplace_back(s.begin(), s.end());
    return space;
}

FeatureSpace overapprox(const Gnn& gnn, const ExtractOptions& opts) {
    for (const auto& l : gnn.layers)
        if (l.agg != Aggregation::Max) throw std::invalid_argument("the inductive feature space needs MAX aggregation");
    FeatureSpace space;
    space.mode = FeatureMode::Overapprox;
    space.alphabet = extraction_alphabet(gnn, opts);
    const std::size_t r = space.alphabet.size();
    if (r > 16) throw GuardExceeded("alphabet too large for the inductive feature space");
    std::vector<Vector> level;
    for (LabelSet s = 0; s < (LabelSet{1} << r); ++s) level.push_back(label_vector(s, r, gnn.input_dim));
    std::sort(level.begin(), level.end(), VecLess{});
    space.layers.push_back(level);
    for (std::size_t l = 1; l <= gnn.layers.size(); ++l) {
        const auto& prev = space.layers.back();
        CompiledComb comb(gnn.layers[l - 1], Domain::Rational);
        const std::size_t dim = gnn.layers[l - 1].in_dim();
        VecSet next;
        for (const auto& p : max_profiles(prev, dim, opts, l))
            for (const auto& y : prev) next.insert(comb.apply(y, p.aggregated));
        check_guard(next.size(), opts.max_vectors, l, "feature vector count");
        space.layers.emplace_back(next.begin(), next.end());
    }
    return space;
}

}  // namespace

bool FeatureSpace::contains(std::size_t layer, const Vector& x) const {
    const auto& v = layers.at(layer);
    return std::binary_search(v.begin(), v.end(), x, VecLess{});
}

std::vector<std::string> extraction_alphabet(const Gnn& gnn, const ExtractOptions& opts) {
    if (!opts.alphabet.empty()) return opts.alphabet;
    if (!gnn.alphabet.empty()) return gnn.alphabet;
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= gnn.input_dim; ++i) out.push_back("P" + std::to_string(i));
    return out;
}

FeatureSpace feature_space_bounded(const Gnn& gnn, std::size_t n, FeatureMode mode, const ExtractOptions& opts) {
    if (gnn_domain(gnn) != Domain::Rational) throw std::invalid_argument("feature spaces need a rational-path GNN");
    return mode == FeatureMode::Realizable ? realizable(gnn, n, opts) : overapprox(gnn, opts);
}

Formula extract_rml(const Gnn& gnn, std::size_t n, const ExtractOptions& opts, ExtractionTrace* trace) {
    require(gnn, Aggregation::Mean, "RML extraction");
    FeatureSpace space = realizable(gnn, n, opts);
    auto profiles = [&](const std::vector<Vector>& prev, std::size_t l) {
        const std::size_t dim = gnn.layers[l - 1].in_dim();
        std::set<std::vector<Rational>> seen;
        std::vector<Profile> out;
        out.push_back({std::vector<Rational>(prev.size(), Rational(0)), Vector(dim, Scalar(Rational(0))), true});
        for (std::size_t m = 1; m <= n; ++m) {
            compositions(prev.size(), m, [&](const std::vector<std::size_t>& k) {
                std::vector<Rational> f;
                for (auto c : k) f.emplace_back(static_cast<std::int64_t>(c), static_cast<std::int64_t>(m));
                if (!seen.insert(f).second) return;
                check_guard(seen.size(), opts.max_profiles, l, "profile count");
                out.push_back({f, weighted_sum(prev, f, dim), false});
            });
        }
        return out;
    };
    const Formula some = rdia(Rel::Gt, Rational(0), top());
    auto shape = [&](const Profile& p, const std::vector<Formula>& prev_f) {
        if (p.leaf) return neg(some);
        std::vector<Formula> parts{some};
        for (std::size_t i = 0; i < p.weights.size(); ++i)
            if (!p.weights[i].is_zero()) parts.push_back(rdia(Rel::Eq, p.weights[i], prev_f[i]));
        return conj_all(parts);
    };
    auto name = [](const Profile& p) {
        if (p.leaf) return std::string("leaf");
        std::string s;
        for (const auto& w : p.weights) s += (s.empty() ? "" : " ") + w.slash_str();
        return s;
    };
    return extract_with(gnn, space, profiles, shape, name, opts, trace);
}

Formula extract_gml(const Gnn& gnn, std::size_t n, const ExtractOptions& opts, ExtractionTrace* trace) {
    require(gnn, Aggregation::Sum, "GML extraction");
    FeatureSpace space = realizable(gnn, n, opts);
    auto profiles = [&](const std::vector<Vector>& prev, std::size_t l) {
        const std::size_t dim = gnn.layers[l - 1].in_dim();
        std::vector<Profile> out;
        for (std::size_t m = 0; m <= n; ++m) {
            compositions(prev.size(), m, [&](const std::vector<std::size_t>& k) {
                std::vector<Rational> w;
                for (auto c : k) w.emplace_back(static_cast<std::int64_t>(c));
                out.push_back({w, weighted_sum(prev, w, dim), m == 0});
                check_guard(out.size(), opts.max_profiles, l, "profile count");
            });
        }
        return out;
    };
    auto shape = [](const Profile& p, const std::vector<Formula>& prev_f) {
        std::uint32_t total = 0;
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < p.weights.size(); ++i) {
            auto m = static_cast<std::uint32_t>(p.weights[i].num());
            total += m;
            if (m) parts.push_back(gdia(Rel::Eq, m, prev_f[i]));
        }
        parts.insert(parts.begin(), gdia(Rel::Eq, total, top()));
        return conj_all(parts);
    };
    auto name = [](const Profile& p) {
        std::string s;
        for (const auto& w : p.weights) s += (s.empty() ? "" : " ") + w.str();
        return s;
    };
    return extract_with(gnn, space, profiles, shape, name, opts, trace);
}

Formula extract_ml(const Gnn& gnn, const ExtractOptions& opts, ExtractionTrace* trace) {
    require(gnn, Aggregation::Max, "ML extraction");
    FeatureSpace space = overapprox(gnn, opts);
    const std::vector<Vector>* base = nullptr;
    auto profiles = [&](const std::vector<Vector>& prev, std::size_t l) {
        base = &prev;
        return max_profiles(prev, gnn.layers[l - 1].in_dim(), opts, l);
    };
    const Formula some = dia(top());
    auto shape = [&](const Profile& p, const std::vector<Formula>& prev_f) {
        std::vector<Formula> parts;
        if (!p.weights.empty()) {
            for (std::size_t i = 0; i < p.weights.size(); ++i)
                parts.push_back(p.weights[i].is_zero() ? box(neg(prev_f[i])) : dia(prev_f[i]));
            return conj_all(parts);
        }
        if (p.leaf) return box(bottom());
        // every successor lies below m and each coordinate of m is attained
        const Vector& m = p.aggregated;
        parts.push_back(some);
        for (std::size_t i = 0; i < base->size(); ++i)
            if (!leq((*base)[i], m)) parts.push_back(box(neg(prev_f[i])));
        for (std::size_t d = 0; d < m.size(); ++d) {
            std::vector<Formula> hit;
            for (std::size_t i = 0; i < base->size(); ++i)
                if (leq((*base)[i], m) && (*base)[i][d].as<Rational>() == m[d].as<Rational>())
                    hit.push_back(dia(prev_f[i]));
            parts.push_back(disj_all(hit));
        }
        return conj_all(parts);
    };
    auto name = [](const Profile& p) {
        if (p.weights.empty()) {
            std::string s = p.leaf ? "leaf" : "max (";
            if (!p.leaf)
                for (std::size_t d = 0; d < p.aggregated.size(); ++d) s += (d ? ", " : "") + p.aggregated[d].str();
            return p.leaf ? s : s + ")";
        }
        std::string s = "{";
        for (std::size_t i = 0; i < p.weights.size(); ++i)
            if (!p.weights[i].is_zero()) s += (s.size() > 1 ? "," : "") + std::to_string(i + 1);
        return s + "}";
    };
    return extract_with(gnn, space, profiles, shape, name, opts, trace);
}


}  // namespace modalnet
