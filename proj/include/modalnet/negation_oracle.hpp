#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "modalnet/quad.hpp"

namespace modalnet {

// Lazily built order-reversing involution on F u T inside [0, sqrt2], where
// F = rationals and T = {p + q sqrt2 : q > 0}. Swaps the two classes.
// Unseen points are paired with the first element of a fixed enumeration of
// the opposite class that keeps the map order-reversing.
class NegationOracle {
public:
    NegationOracle();

    QuadExt lower() const { return QuadExt(Rational(0)); }
    QuadExt upper() const { return QuadExt::sqrt2(); }

    QuadExt query(const QuadExt& x);

    // Fresh oracle with only the seed pairs.
    std::shared_ptr<NegationOracle> fresh() const { return std::make_shared<NegationOracle>(); }

    std::vector<std::pair<QuadExt, QuadExt>> pairs() const;
    std::vector<QuadExt> query_log() const;

    // Involution, class swap and order reversal over every recorded pair.
    bool check_invariants(std::string* why = nullptr) const;

    static bool in_f(const QuadExt& x);
    static bool in_t(const QuadExt& x);

    // n-th element (0-based) of the fixed enumerations, for tests.
    static QuadExt f_element(std::size_t n);
    static QuadExt t_element(std::size_t n);

private:
    QuadExt first_in_gap(bool want_t, const QuadExt& lo, const QuadExt& hi) const;

    mutable std::mutex mu_;
    std::map<QuadExt, QuadExt> f_;
    std::vector<QuadExt> log_;
};

}  // namespace modalnet
