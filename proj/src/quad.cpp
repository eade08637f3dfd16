#include "modalnet/quad.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace modalnet {

using boost::multiprecision::cpp_int;

int QuadExt::sign() const {
    int sp = p_.sign(), sq = q_.sign();
    if (sq == 0) return sp;
    if (sp == 0) return sq;
    if (sp == sq) return sp;
    // opposite signs: compare p^2 with 2 q^2; equality is impossible for q != 0
    cpp_int lhs = cpp_int(p_.num()) * p_.num() * q_.den() * q_.den();
    cpp_int rhs = cpp_int(2) * q_.num() * q_.num() * p_.den() * p_.den();
    return lhs > rhs ? sp : sq;
}

double QuadExt::to_double() const { return p_.to_double() + q_.to_double() * std::sqrt(2.0); }

std::string QuadExt::str() const {
    if (q_.is_zero()) return p_.str();
    std::string s = p_.is_zero() ? "" : p_.str() + (q_.sign() > 0 ? "+" : "");
    return s + q_.str() + "*sqrt2";
}

QuadExt& QuadExt::operator*=(const QuadExt& o) {
    Rational np = p_ * o.p_ + Rational(2) * q_ * o.q_;
    Rational nq = p_ * o.q_ + q_ * o.p_;
    p_ = np;
    q_ = nq;
    return *this;
}

}  // namespace modalnet
