#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modalnet/quad.hpp"
#include "modalnet/rational.hpp"

namespace modalnet {

enum class Domain { Rational, Float, Quad };

std::string to_string(Domain d);

// A weight or feature value in one of the three numeric domains.
class Scalar {
public:
    using Storage = std::variant<Rational, double, QuadExt>;

    Scalar() : v_(Rational(0)) {}
    Scalar(Rational r) : v_(r) {}      // NOLINT(implicit)
    Scalar(std::int64_t n) : v_(Rational(n)) {}  // NOLINT(implicit)
    Scalar(int n) : v_(Rational(n)) {}  // NOLINT(implicit)
    Scalar(double d) : v_(d) {}        // NOLINT(implicit)
    Scalar(QuadExt q) : v_(q) {}       // NOLINT(implicit)

    Domain domain() const { return static_cast<Domain>(v_.index()); }
    const Storage& storage() const { return v_; }

    bool is_zero() const;
    double to_double() const;
    std::string str() const;

    // Lossless widening into the requested domain; narrowing throws.
    template <class T>
    T as() const;

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }

private:
    Storage v_;
};

using Vector = std::vector<Scalar>;

// ---- per-domain numeric helpers used by the templated evaluator ----

template <class T>
struct Num;

template <>
struct Num<Rational> {
    static constexpr Domain domain = Domain::Rational;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from(const Rational& r) { return r; }
    static Rational div(const Rational& x, std::size_t n) { return x / Rational(static_cast<std::int64_t>(n)); }
    static double to_double(const Rational& x) { return x.to_double(); }
};

template <>
struct Num<double> {
    static constexpr Domain domain = Domain::Float;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from(const Rational& r) { return r.to_double(); }
    static double div(double x, std::size_t n) { return x / static_cast<double>(n); }
    static double to_double(double x) { return x; }
};

template <>
struct Num<QuadExt> {
    static constexpr Domain domain = Domain::Quad;
    static QuadExt zero() { return QuadExt(); }
    static QuadExt one() { return QuadExt(Rational(1)); }
    static QuadExt from(const Rational& r) { return QuadExt(r); }
    static QuadExt div(const QuadExt& x, std::size_t n) { return x / Rational(static_cast<std::int64_t>(n)); }
    static double to_double(const QuadExt& x) { return x.to_double(); }
};

// Correctly rounded floating-point summation (Shewchuk partials with the
// half-even fixup used by Python's math.fsum).
class ExactSum {
public:
    void add(double x);
    double result() const;
    void clear() { partials_.clear(); }

private:
    std::vector<double> partials_;
};

template <>
inline Rational Scalar::as<Rational>() const {
    if (auto r = std::get_if<Rational>(&v_)) return *r;
    if (auto q = std::get_if<QuadExt>(&v_); q && q->is_rational()) return q->p();
    throw std::domain_error("scalar " + str() + " is not an exact rational");
}

template <>
inline double Scalar::as<double>() const {
    return to_double();
}

template <>
inline QuadExt Scalar::as<QuadExt>() const {
    if (auto r = std::get_if<Rational>(&v_)) return QuadExt(*r);
    if (auto q = std::get_if<QuadExt>(&v_)) return *q;
    throw std::domain_error("float scalar cannot enter the quadratic-extension domain");
}

}  // namespace modalnet
