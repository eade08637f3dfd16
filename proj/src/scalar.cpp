#include "modalnet/scalar.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace modalnet {

std::string to_string(Domain d) {
    switch (d) {
        case Domain::Rational: return "rational";
        case Domain::Float: return "float";
        case Domain::Quad: return "quad";
    }
    return "?";
}

bool Scalar::is_zero() const {
    return std::visit(
        [](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, double>) return x == 0.0;
            else if constexpr (std::is_same_v<X, Rational>) return x.is_zero();
            else return x.p().is_zero() && x.q().is_zero();
        },
        v_);
}

double Scalar::to_double() const {
    return std::visit(
        [](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, double>) return x;
            else return x.to_double();
        },
        v_);
}

std::string Scalar::str() const {
    return std::visit(
        [](const auto& x) -> std::string {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, double>) {
                std::ostringstream os;
                os.precision(std::numeric_limits<double>::max_digits10);
                os << x;
                return os.str();
            } else {
                return x.str();
            }
        },
        v_);
}

void ExactSum::add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
        if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
        double hi = x + y;
        double lo = y - (hi - x);
        if (lo != 0.0) partials_[i++] = lo;
        x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
}

double ExactSum::result() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
        double x = hi;
        double y = partials_[--n];
        hi = x + y;
        double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) break;
    }
    // round half to even across the remaining partials
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
        double y = lo * 2.0;
        double x = hi + y;
        double yr = x - hi;
        if (y == yr) hi = x;
    }
    return hi;
}

}  // namespace modalnet
