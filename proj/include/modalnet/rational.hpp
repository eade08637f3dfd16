#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace modalnet {

// Exact rational with 64-bit numerator/denominator, always in lowest terms
// with a positive denominator. Intermediate products use 128 bits; a result
// that does not fit back into 64 bits throws std::overflow_error.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "n" when the denominator is 1, "n/d" otherwise.
    std::string str() const;
    // "n/d" always, also for integers ("1/1", "0/1").
    std::string slash_str() const;

    // Accepts "n", "-n", "n/d" with optional surrounding whitespace.
    static Rational parse(std::string_view text);

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static Rational from_wide(__int128 n, __int128 d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

}  // namespace modalnet

template <>
struct std::hash<modalnet::Rational> {
    std::size_t operator()(const modalnet::Rational& r) const noexcept {
        return std::hash<std::int64_t>{}(r.num()) * 1000003u ^ std::hash<std::int64_t>{}(r.den());
    }
};
