#include "modalnet/rational.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <stdexcept>

namespace modalnet {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(i128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
    return v;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(n, d);
}

Rational Rational::from_wide(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("division by zero");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (!fits64(n) || !fits64(d)) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::slash_str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(std::string_view text) {
    auto s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(s, text));
    return Rational(parse_int(s.substr(0, slash), text), parse_int(s.substr(slash + 1), text));
}

Rational Rational::operator-() const { return from_wide(-static_cast<i128>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
    if (den_ == o.den_) return *this = from_wide(static_cast<i128>(num_) + o.num_, den_);
    return *this = from_wide(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                             static_cast<i128>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    // cross-reduce first to keep the 128-bit intermediates small
    i128 g1 = gcd128(num_, o.den_), g2 = gcd128(o.num_, den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return *this = from_wide((static_cast<i128>(num_) / g1) * (o.num_ / g2),
                             (static_cast<i128>(den_) / g2) * (o.den_ / g1));
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("division by zero");
    return *this *= from_wide(o.den_, o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    return l <=> r;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace modalnet
