#include "modalnet/negation_oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace modalnet {

namespace {

constexpr std::int64_t kMaxLevel = 20000;

QuadExt t_value(std::int64_t pn, std::int64_t qn, std::int64_t d) { return {Rational(pn, d), Rational(qn, d)}; }

bool t_canonical(std::int64_t pn, std::int64_t qn, std::int64_t d) {
    return std::gcd(std::gcd(std::llabs(pn), qn), d) == 1;
}

}  // namespace

NegationOracle::NegationOracle() {
    f_.emplace(lower(), upper());
    f_.emplace(upper(), lower());
}

bool NegationOracle::in_f(const QuadExt& x) {
    return x.is_rational() && x >= QuadExt(Rational(0)) && x <= QuadExt::sqrt2();
}

bool NegationOracle::in_t(const QuadExt& x) {
    return x.q().sign() > 0 && x >= QuadExt(Rational(0)) && x <= QuadExt::sqrt2();
}

QuadExt NegationOracle::query(const QuadExt& x) {
    std::lock_guard lock(mu_);
    if (x.q().sign() < 0 || x < lower() || x > upper())
        throw std::domain_error("negation oracle queried outside F u T: " + x.str());
    log_.push_back(x);
    if (auto it = f_.find(x); it != f_.end()) return it->second;
    auto hi = f_.upper_bound(x);
    auto lo = std::prev(hi);
    // the image of the gap (lo, hi) is the gap (f(hi), f(lo))
    QuadExt y = first_in_gap(x.is_rational(), hi->second, lo->second);
    f_.emplace(x, y);
    f_.emplace(y, x);
    return y;
}

QuadExt NegationOracle::first_in_gap(bool want_t, const QuadExt& lo, const QuadExt& hi) const {
    const double dlo = lo.to_double(), dhi = hi.to_double();
    const double s2 = std::sqrt(2.0);
    if (!want_t) {
        for (std::int64_t d = 1; d <= kMaxLevel; ++d) {
            std::int64_t nmin = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(dlo * d)) - 1);
            std::int64_t nmax = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(d * s2)),
                                                       static_cast<std::int64_t>(std::ceil(dhi * d)) + 1);
            for (std::int64_t n = nmin; n <= nmax; ++n) {
                if (std::gcd(n, d) != 1) continue;
                QuadExt v(Rational(n, d));
                if (lo < v && v < hi) return v;
            }
        }
    } else {
        for (std::int64_t h = 1; h <= kMaxLevel; ++h) {
            for (std::int64_t d = 1; d <= h; ++d) {
                for (std::int64_t qn = 1; qn <= h; ++qn) {
                    double base = qn * s2;
                    std::int64_t pmin = std::max<std::int64_t>(-h, static_cast<std::int64_t>(std::floor(d * dlo - base)) - 1);
                    std::int64_t pmax = std::min<std::int64_t>(h, static_cast<std::int64_t>(std::ceil(d * dhi - base)) + 1);
                    for (std::int64_t pn = pmin; pn <= pmax; ++pn) {
                        if (std::max<std::int64_t>({d, qn, std::llabs(pn)}) != h) continue;
                        if (!t_canonical(pn, qn, d)) continue;
                        QuadExt v = t_value(pn, qn, d);
                        if (lo < v && v < hi) return v;
                    }
                }
            }
        }
    }
    throw std::runtime_error("negation oracle enumeration exhausted its search bound");
}

QuadExt NegationOracle::f_element(std::size_t n) {
    std::size_t seen = 0;
    for (std::int64_t d = 1;; ++d) {
        std::int64_t nmax = static_cast<std::int64_t>(std::floor(d * std::sqrt(2.0)));
        for (std::int64_t k = 1; k <= nmax + 1; ++k) {
            if (std::gcd(k, d) != 1) continue;
            QuadExt v(Rational(k, d));
            if (v > QuadExt::sqrt2()) continue;
            if (seen++ == n) return v;
        }
    }
}

QuadExt NegationOracle::t_element(std::size_t n) {
    std::size_t seen = 0;
    for (std::int64_t h = 1;; ++h) {
        for (std::int64_t d = 1; d <= h; ++d)
            for (std::int64_t qn = 1; qn <= h; ++qn)
                for (std::int64_t pn = -h; pn <= h; ++pn) {
                    if (std::max<std::int64_t>({d, qn, std::llabs(pn)}) != h || !t_canonical(pn, qn, d)) continue;
                    QuadExt v = t_value(pn, qn, d);
                    if (v.sign() < 0 || v >= QuadExt::sqrt2()) continue;
                    if (seen++ == n) return v;
                }
    }
}

std::vector<std::pair<QuadExt, QuadExt>> NegationOracle::pairs() const {
    std::lock_guard lock(mu_);
    return {f_.begin(), f_.end()};
}

std::vector<QuadExt> NegationOracle::query_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

bool NegationOracle::check_invariants(std::string* why) const {
    std::lock_guard lock(mu_);
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    const QuadExt* prev_image = nullptr;
    for (const auto& [x, y] : f_) {
        auto back = f_.find(y);
        if (back == f_.end() || !(back->second == x)) return fail("not an involution at " + x.str());
        if (in_f(x) == in_f(y) || in_t(x) == in_t(y)) return fail("class not swapped at " + x.str());
        if (prev_image && !(y < *prev_image)) return fail("order not reversed at " + x.str());
        prev_image = &y;
    }
    for (const auto& x : log_)
        if (!f_.count(x)) return fail("queried point " + x.str() + " left unpaired");
    return true;
}

}  // namespace modalnet
