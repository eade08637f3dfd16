#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modalnet/formula.hpp"
#include "modalnet/gnn.hpp"
#include "modalnet/negation_oracle.hpp"

namespace modalnet {

// Every compiler takes the label alphabet; an empty alphabet means the sorted
// atoms of the formula. Channel k of each output carries subformula k of
// subformula_order, recorded in Gnn::channel_names.

// MEAN / trReLU, agrees with phi on graphs with at most n vertices.
Gnn compile_rml_bounded(const Formula& phi, std::uint32_t n, std::vector<std::string> alphabet = {});
// MAX / trReLU, uniform.
Gnn compile_ml_max(const Formula& phi, std::vector<std::string> alphabet = {});
// SUM / trReLU, uniform.
Gnn compile_gml_sum(const Formula& phi, std::vector<std::string> alphabet = {});
// MEAN / trReLU for AFML[1] and AFML[2], uniform.
Gnn compile_afml_trrelu(const Formula& phi, std::vector<std::string> alphabet = {});

// MEAN / sigmoid over floats. `gain` multiplies the pre-activation of the
// literal, disjunction, diamond and box channels; `and_gain` multiplies alpha
// at the conjunction output. Both 1 gives the textbook weights, whose margins
// fall below double precision after a layer or two. Powers of two keep the
// false value exactly 1/2 in floating point.
inline constexpr std::int64_t kDefaultSigmoidGain = 64;
inline constexpr std::int64_t kDefaultAndGain = std::int64_t{1} << 40;
Gnn compile_afml_sigmoid(const Formula& phi, std::vector<std::string> alphabet = {},
                         std::int64_t gain = kDefaultSigmoidGain, std::int64_t and_gain = kDefaultAndGain);

// MEAN / step, uniform.
Gnn compile_rml_step(const Formula& phi, std::vector<std::string> alphabet = {});
// MEAN with built-in combinations over Q(sqrt2) and an irrationality classifier.
Gnn compile_ml_irrational(const Formula& phi, std::vector<std::string> alphabet = {});

// Dispatch by name. logic: ml, gml, rml, afml. activation: trrelu (default), relu,
// step (rml), sigmoid (afml), irrational (ml). rml with trrelu or relu needs bound > 0.
Gnn compile_named(const Formula& phi, const std::string& logic, std::string activation, std::uint32_t bound,
                  std::vector<std::string> alphabet = {});

// Doubles the depth; layer 2l-1 computes ReLU(x) and ReLU(x-1), layer 2l their difference.
Gnn trrelu_to_relu(const Gnn& gnn);

// Rewrites >= ratio diamonds through their strict duals; used by the step compiler.
Formula rewrite_geq_as_strict_dual(const Formula& phi);

QuadExt oracle_query(NegationOracle& oracle, const QuadExt& x);

// The sigmoid conjunction gadget.
namespace gadget {
double sigmoid(double x);
double tau(double x);
double e_min();
double alpha(double x, double y);
}  // namespace gadget

}  // namespace modalnet
