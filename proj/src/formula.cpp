#include "modalnet/formula.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <unordered_map>

namespace modalnet {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

bool same_fields(const FormulaNode& a, const FormulaNode& b) {
    if (a.op != b.op || a.atom != b.atom || a.rel != b.rel || a.count != b.count || !(a.ratio == b.ratio))
        return false;
    if (a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (a.kids[i].node() != b.kids[i].node()) return false;
    return true;
}

// Hash-consing table: structurally equal formulas share one node, so equality
// is pointer comparison.
class InternTable {
public:
    std::shared_ptr<const FormulaNode> intern(FormulaNode node) {
        std::lock_guard lock(mu_);
        auto range = table_.equal_range(node.hash);
        for (auto it = range.first; it != range.second; ++it) {
            if (auto p = it->second.lock(); p && same_fields(*p, node)) return p;
        }
        auto p = std::make_shared<const FormulaNode>(std::move(node));
        table_.emplace(p->hash, p);
        if (table_.size() > sweep_at_) sweep();
        return p;
    }

private:
    void sweep() {
        for (auto it = table_.begin(); it != table_.end();) {
            if (it->second.expired()) it = table_.erase(it);
            else ++it;
        }
        sweep_at_ = std::max<std::size_t>(4096, 2 * table_.size());
    }

    std::mutex mu_;
    std::unordered_multimap<std::size_t, std::weak_ptr<const FormulaNode>> table_;
    std::size_t sweep_at_ = 4096;
};

InternTable& interner() {
    static InternTable t;
    return t;
}

Formula unary(Op op, Formula f) {
    FormulaNode n;
    n.op = op;
    n.kids = {std::move(f)};
    return Formula::make(std::move(n));
}

Formula binary(Op op, Formula a, Formula b) {
    FormulaNode n;
    n.op = op;
    n.kids = {std::move(a), std::move(b)};
    return Formula::make(std::move(n));
}

}  // namespace

std::string to_string(Rel r) {
    switch (r) {
        case Rel::Geq: return ">=";
        case Rel::Gt: return ">";
        case Rel::Eq: return "=";
    }
    return "?";
}

Formula Formula::make(FormulaNode node) {
    std::size_t h = static_cast<std::size_t>(node.op) + 1;
    h = mix(h, std::hash<std::string>{}(node.atom));
    h = mix(h, static_cast<std::size_t>(node.rel));
    h = mix(h, node.count);
    h = mix(h, std::hash<Rational>{}(node.ratio));
    std::size_t size = 1;
    for (const auto& k : node.kids) {
        h = mix(h, k.hash());
        size += k.node()->size;
        if (size > (std::size_t{1} << 62)) size = std::size_t{1} << 62;
    }
    node.hash = h;
    node.size = size;
    return Formula(interner().intern(std::move(node)));
}

Formula::Formula() : Formula(top()) {}

Op Formula::op() const { return node_->op; }
const std::string& Formula::atom() const { return node_->atom; }
Rel Formula::rel() const { return node_->rel; }
std::uint32_t Formula::count() const { return node_->count; }
const Rational& Formula::ratio() const { return node_->ratio; }
const Formula& Formula::sub() const { return node_->kids.at(0); }
const Formula& Formula::left() const { return node_->kids.at(0); }
const Formula& Formula::right() const { return node_->kids.at(1); }
std::size_t Formula::hash() const { return node_->hash; }

bool operator==(const Formula& a, const Formula& b) { return a.node_ == b.node_; }

bool operator<(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return false;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.op != y.op) return x.op < y.op;
    if (x.atom != y.atom) return x.atom < y.atom;
    if (x.rel != y.rel) return x.rel < y.rel;
    if (x.count != y.count) return x.count < y.count;
    if (!(x.ratio == y.ratio)) return x.ratio < y.ratio;
    for (std::size_t i = 0; i < x.kids.size(); ++i) {
        if (x.kids[i] == y.kids[i]) continue;
        return x.kids[i] < y.kids[i];
    }
    return false;
}

Formula atom(std::string name) {
    FormulaNode n;
    n.op = Op::Atom;
    n.atom = std::move(name);
    return Formula::make(std::move(n));
}

Formula top() {
    static const Formula t = [] {
        FormulaNode n;
        n.op = Op::Top;
        return Formula::make(std::move(n));
    }();
    return t;
}

Formula bottom() {
    static const Formula b = [] {
        FormulaNode n;
        n.op = Op::Bottom;
        return Formula::make(std::move(n));
    }();
    return b;
}

Formula neg(Formula f) { return unary(Op::Not, std::move(f)); }
Formula conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
Formula dia(Formula f) { return unary(Op::Dia, std::move(f)); }
Formula box(Formula f) { return unary(Op::Box, std::move(f)); }

Formula gdia(Rel rel, std::uint32_t count, Formula f) {
    if (rel == Rel::Gt) throw std::invalid_argument("graded diamonds use >= or =");
    FormulaNode n;
    n.op = Op::GDia;
    n.rel = rel;
    n.count = count;
    n.kids = {std::move(f)};
    return Formula::make(std::move(n));
}

Formula rdia(Rel rel, Rational ratio, Formula f) {
    if (ratio < Rational(0) || ratio > Rational(1))
        throw std::invalid_argument("ratio " + ratio.str() + " outside [0,1]");
    FormulaNode n;
    n.op = Op::RDia;
    n.rel = rel;
    n.ratio = ratio;
    n.kids = {std::move(f)};
    return Formula::make(std::move(n));
}

Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}

Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return bottom();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}

std::size_t tree_size(const Formula& f) { return f.node()->size; }

std::size_t dag_size(const Formula& f) {
    std::set<const FormulaNode*> seen;
    std::vector<const FormulaNode*> stack{f.node()};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        for (const auto& k : n->kids) stack.push_back(k.node());
    }
    return seen.size();
}

namespace {

std::size_t depth_rec(const Formula& f, std::unordered_map<const FormulaNode*, std::size_t>& memo) {
    if (auto it = memo.find(f.node()); it != memo.end()) return it->second;
    std::size_t d = 0;
    switch (f.op()) {
        case Op::Atom:
        case Op::Top:
        case Op::Bottom: d = 0; break;
        case Op::Not: d = depth_rec(f.sub(), memo); break;
        case Op::And:
        case Op::Or: d = std::max(depth_rec(f.left(), memo), depth_rec(f.right(), memo)); break;
        default: d = 1 + depth_rec(f.sub(), memo); break;
    }
    memo.emplace(f.node(), d);
    return d;
}

}  // namespace

std::size_t modal_depth(const Formula& f) {
    std::unordered_map<const FormulaNode*, std::size_t> memo;
    return depth_rec(f, memo);
}

std::vector<std::string> atoms_of(const Formula& f) {
    std::set<std::string> out;
    std::set<const FormulaNode*> seen;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (!seen.insert(g.node()).second) continue;
        if (g.is(Op::Atom)) out.insert(g.atom());
        for (const auto& k : g.node()->kids) stack.push_back(k);
    }
    return {out.begin(), out.end()};
}

}  // namespace modalnet
