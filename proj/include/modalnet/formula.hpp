#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modalnet/graph.hpp"
#include "modalnet/rational.hpp"

namespace modalnet {

enum class Op { Atom, Top, Bottom, Not, And, Or, Dia, Box, GDia, RDia };
enum class Rel { Geq, Gt, Eq };

std::string to_string(Rel r);

struct FormulaNode;

// Immutable, structurally compared formula handle. Subtrees are shared.
class Formula {
public:
    Formula();  // top

    Op op() const;
    const std::string& atom() const;
    Rel rel() const;
    std::uint32_t count() const;
    const Rational& ratio() const;
    const Formula& sub() const;    // unary operand
    const Formula& left() const;
    const Formula& right() const;

    std::size_t hash() const;
    const FormulaNode* node() const { return node_.get(); }

    bool is(Op o) const { return op() == o; }

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
    // total order, structural
    friend bool operator<(const Formula& a, const Formula& b);

    static Formula make(FormulaNode node);

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
    Op op = Op::Top;
    std::string atom;
    Rel rel = Rel::Geq;
    std::uint32_t count = 0;
    Rational ratio;
    std::vector<Formula> kids;
    std::size_t hash = 0;
    std::size_t size = 1;
};

Formula atom(std::string name);
Formula top();
Formula bottom();
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula dia(Formula f);
Formula box(Formula f);
Formula gdia(Rel rel, std::uint32_t count, Formula f);
Formula rdia(Rel rel, Rational ratio, Formula f);

// Left-folded conjunction/disjunction; empty conjunction is top, empty disjunction bottom.
Formula conj_all(const std::vector<Formula>& fs);
Formula disj_all(const std::vector<Formula>& fs);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

Formula parse(std::string_view text);
std::string print(const Formula& f);

// Number of distinct subformulas (DAG size) and tree size.
std::size_t dag_size(const Formula& f);
std::size_t tree_size(const Formula& f);
std::size_t modal_depth(const Formula& f);
std::vector<std::string> atoms_of(const Formula& f);  // sorted, unique

// ---- model checking ----

// A formula flattened once for checking on many graphs.
class FormulaEvaluator {
public:
    explicit FormulaEvaluator(const Formula& f);
    ~FormulaEvaluator();
    FormulaEvaluator(const FormulaEvaluator&);
    FormulaEvaluator& operator=(const FormulaEvaluator&);

    const Formula& formula() const { return root_; }
    std::vector<bool> check_all(const LabeledDigraph& g) const;

private:
    struct Step;
    Formula root_;
    std::vector<Step> steps_;
};

// Truth of f at every vertex of g, indexed by vertex.
std::vector<bool> check_all(const LabeledDigraph& g, const Formula& f);
bool check(const LabeledDigraph& g, VertexIndex v, const Formula& f);
bool check(const LabeledDigraph& g, const std::string& v, const Formula& f);
bool check(const PointedGraph& g, const Formula& f);

// ---- fragments ----

struct FragmentReport {
    std::size_t modal_depth = 0;
    bool in_ml = false;
    bool in_gml = false;
    std::uint32_t max_count = 0;
    bool in_rml = false;
    bool in_afml1 = false;
    bool in_afml2 = false;
};

FragmentReport analyze(const Formula& f);
bool in_ml(const Formula& f);
bool in_gml(const Formula& f);
bool in_rml(const Formula& f);
bool in_afml1(const Formula& f);
bool in_afml2(const Formula& f);

// phi_1..phi_L: labels of the alphabet first (in alphabet order), then the
// remaining distinct subformulas in post-order.
std::vector<Formula> subformula_order(const Formula& f, const std::vector<std::string>& alphabet);
// Uses the sorted atoms of f as the alphabet.
std::vector<Formula> subformula_order(const Formula& f);

Rational largest_fraction_below(const Rational& t, std::uint32_t n, bool inclusive);

Formula eliminate_geq(const Formula& f, std::uint32_t n);
Formula afml2_dual(const Formula& f);
Formula afml1_dual(const Formula& f);

// Rewrites used before compilation.
Formula desugar_ml(const Formula& f);         // ops: atom, top, bottom, not, or, dia
Formula desugar_gml(const Formula& f);        // ops: atom, top, bottom, not, or, gdia(>=)
Formula desugar_rml_strict(const Formula& f); // ops: atom, top, bottom, not, or, rdia(>); requires no rdia(>=)
Formula expand_equalities(const Formula& f);  // removes gdia(=) and rdia(=)

// Equivalence-preserving top/bottom propagation.
Formula simplify(const Formula& f);

}  // namespace modalnet

template <>
struct std::hash<modalnet::Formula> {
    std::size_t operator()(const modalnet::Formula& f) const noexcept { return f.hash(); }
};
