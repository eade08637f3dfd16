#include <cctype>
#include <charconv>
#include <limits>

#include "modalnet/formula.hpp"

namespace modalnet {

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Formula run() {
        Formula f = disjunction();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }

    Formula disjunction() {
        Formula f = conjunction();
        while (accept("|")) f = disj(f, conjunction());
        return f;
    }

    Formula conjunction() {
        Formula f = unary_formula();
        while (accept("&")) f = conj(f, unary_formula());
        return f;
    }

    Formula unary_formula() {
        if (accept("!")) return neg(unary_formula());
        if (accept("[]")) return box(unary_formula());
        if (accept("<>")) {
            skip();
            if (pos_ < s_.size() && s_[pos_] == '{') return context_diamond();
            return dia(unary_formula());
        }
        return primary();
    }

    std::uint64_t integer() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected an integer");
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (ec != std::errc{}) {
            pos_ = start;
            fail("integer out of range");
        }
        return v;
    }

    Formula context_diamond() {
        expect("{");
        Rel rel;
        if (accept(">=")) rel = Rel::Geq;
        else if (accept(">")) rel = Rel::Gt;
        else if (accept("=")) rel = Rel::Eq;
        else fail("expected '>=', '>' or '='");
        std::size_t num_pos = pos_;
        std::uint64_t a = integer();
        bool ratio = accept("/");
        std::uint64_t b = ratio ? integer() : 1;
        expect("}");
        if (ratio) {
            constexpr auto lim = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
            if (b == 0 || a > lim || b > lim) {
                pos_ = num_pos;
                fail("invalid ratio");
            }
            if (a > b) {
                pos_ = num_pos;
                fail("ratio outside [0,1]");
            }
            Rational r(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
            return rdia(rel, r, unary_formula());
        }
        if (rel == Rel::Gt) {
            pos_ = num_pos;
            fail("graded diamonds take '>=' or '='; ratios need the form n/d");
        }
        if (a > std::numeric_limits<std::uint32_t>::max()) {
            pos_ = num_pos;
            fail("count out of range");
        }
        return gdia(rel, static_cast<std::uint32_t>(a), unary_formula());
    }

    Formula primary() {
        skip();
        if (accept("(")) {
            Formula f = disjunction();
            expect(")");
            return f;
        }
        std::size_t start = pos_;
        if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id(s_.substr(start, pos_ - start));
            if (id == "true") return top();
            if (id == "false") return bottom();
            return atom(id);
        }
        if (pos_ >= s_.size()) fail("unexpected end of input");
        fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// precedence: 0 = disjunction, 1 = conjunction, 2 = unary/primary
void emit(const Formula& f, int ctx, std::string& out) {
    switch (f.op()) {
        case Op::Atom: out += f.atom(); return;
        case Op::Top: out += "true"; return;
        case Op::Bottom: out += "false"; return;
        case Op::Not:
            out += "!";
            emit(f.sub(), 2, out);
            return;
        case Op::Dia:
            out += "<>";
            emit(f.sub(), 2, out);
            return;
        case Op::Box:
            out += "[]";
            emit(f.sub(), 2, out);
            return;
        case Op::GDia:
            out += "<>{" + to_string(f.rel()) + std::to_string(f.count()) + "} ";
            emit(f.sub(), 2, out);
            return;
        case Op::RDia:
            out += "<>{" + to_string(f.rel()) + f.ratio().slash_str() + "} ";
            emit(f.sub(), 2, out);
            return;
        case Op::And:
        case Op::Or: {
            int prec = f.is(Op::Or) ? 0 : 1;
            bool paren = ctx > prec;
            if (paren) out += "(";
            emit(f.left(), prec, out);
            out += f.is(Op::Or) ? " | " : " & ";
            emit(f.right(), prec + 1, out);
            if (paren) out += ")";
            return;
        }
    }
}

}  // namespace

Formula parse(std::string_view text) { return Parser(text).run(); }

std::string print(const Formula& f) {
    std::string out;
    emit(f, 0, out);
    return out;
}

}  // namespace modalnet
