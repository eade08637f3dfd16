#pragma once

#include <compare>
#include <ostream>
#include <string>

#include "modalnet/rational.hpp"

namespace modalnet {

// p + q*sqrt(2) with rational p, q. Closed under +, -, * and rational division;
// ordering is exact.
class QuadExt {
public:
    QuadExt() = default;
    QuadExt(Rational p) : p_(p) {}  // NOLINT(implicit)
    QuadExt(Rational p, Rational q) : p_(p), q_(q) {}

    static QuadExt sqrt2() { return {Rational(0), Rational(1)}; }

    const Rational& p() const { return p_; }
    const Rational& q() const { return q_; }
    bool is_rational() const { return q_.is_zero(); }

    int sign() const;
    double to_double() const;
    std::string str() const;

    QuadExt operator-() const { return {-p_, -q_}; }
    QuadExt& operator+=(const QuadExt& o) {
        p_ += o.p_;
        q_ += o.q_;
        return *this;
    }
    QuadExt& operator-=(const QuadExt& o) {
        p_ -= o.p_;
        q_ -= o.q_;
        return *this;
    }
    QuadExt& operator*=(const QuadExt& o);
    QuadExt& operator/=(const Rational& r) {
        p_ /= r;
        q_ /= r;
        return *this;
    }

    friend QuadExt operator+(QuadExt a, const QuadExt& b) { return a += b; }
    friend QuadExt operator-(QuadExt a, const QuadExt& b) { return a -= b; }
    friend QuadExt operator*(QuadExt a, const QuadExt& b) { return a *= b; }
    friend QuadExt operator/(QuadExt a, const Rational& b) { return a /= b; }

    friend bool operator==(const QuadExt& a, const QuadExt& b) { return a.p_ == b.p_ && a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const QuadExt& a, const QuadExt& b) {
        int s = (a - b).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadExt& x) { return os << x.str(); }

private:
    Rational p_{0};
    Rational q_{0};
};

}  // namespace modalnet
