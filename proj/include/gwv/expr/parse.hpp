#pragma once

// Recursive-descent parser for the expression grammar:
//
//   poly    := term (('+'|'-') term)*
//   term    := ['-'] [rational '*'] factor ('*' factor)* | ['-'] rational
//   factor  := corr | 'nabla' '[' vexpr ']' '(' poly ')' | NAME '(' vexpr (',' vexpr)* ')' | '(' poly ')'
//   corr    := '<<' vexpr+ '>>_' INT
//   vexpr   := SLOT | 'g^' IDX | 'g_' IDX | 'T(' vexpr ')' | 'tau+(' vexpr ')' | 'bullet(' vexpr ',' vexpr ')'
//            | 'tau-(' vexpr ')' | 'S'                      (numeric-only)
//
// Whitespace is insignificant. SLOT is W[0-9]* or V[0-9]*, IDX a lowercase letter.

#include "gwv/expr/tree.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace gwv::expr {

class ParseError : public ExprError {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : ExprError("parse error at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    SExpr parse_poly_top() {
        SExpr e = poly();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

    VExpr parse_vexpr_top() {
        VExpr v = vexpr();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return v;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, i_); }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(std::string_view tok) {
        skip();
        return s_.substr(i_, tok.size()) == tok;
    }
    bool accept(std::string_view tok) {
        if (!peek(tok)) return false;
        i_ += tok.size();
        return true;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }
    bool peek_digit() {
        skip();
        return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]));
    }
    std::string integer() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (b == i_) fail("expected integer");
        return std::string(s_.substr(b, i_ - b));
    }
    Rational unsigned_rational() {
        std::string n = integer();
        if (accept("/")) {
            std::size_t at = i_;
            std::string d = integer();
            if (Integer(d) == 0) throw ParseError("zero denominator", at);
            return Rational(Integer(n), Integer(d));
        }
        return Rational(Integer(n));
    }
    std::string identifier() {
        skip();
        std::size_t b = i_;
        while (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_]))) ++i_;
        return std::string(s_.substr(b, i_ - b));
    }

    SExpr poly() {
        std::vector<SExpr> terms;
        terms.push_back(term(accept("-")));
        for (;;) {
            if (accept("+"))
                terms.push_back(term(accept("-")));
            else if (peek("-")) {
                ++i_;
                terms.push_back(term(true));
            } else
                break;
        }
        return terms.size() == 1 ? terms[0] : build::sum(std::move(terms));
    }

    SExpr term(bool negative) {
        std::optional<Rational> coeff;
        if (peek_digit()) {
            Rational r = unsigned_rational();
            if (!accept("*")) return build::constant(negative ? -r : r);
            coeff = r;
        }
        std::vector<SExpr> fs;
        fs.push_back(factor());
        while (accept("*")) fs.push_back(factor());
        SExpr body = fs.size() == 1 ? fs[0] : build::prod(std::move(fs));
        if (coeff || negative) {
            Rational c = coeff.value_or(Rational(1));
            return build::scale(negative ? -c : c, body);
        }
        return body;
    }

    SExpr factor() {
        skip();
        if (accept("<<")) {
            std::vector<VExpr> args;
            while (!peek(">>")) {
                if (i_ >= s_.size()) fail("unterminated correlator");
                args.push_back(vexpr());
            }
            expect(">>");
            expect("_");
            if (args.empty()) fail("correlator needs at least one argument");
            std::string g = integer();
            if (g.size() > 6) fail("genus too large");
            return build::corr(std::stoi(g), std::move(args));
        }
        if (accept("(")) {
            SExpr e = poly();
            expect(")");
            return e;
        }
        std::size_t at = i_;
        std::string id = identifier();
        if (id.empty()) fail("expected a factor");
        if (id == "nabla") {
            expect("[");
            VExpr dir = vexpr();
            expect("]");
            expect("(");
            SExpr body = poly();
            expect(")");
            return build::nabla(std::move(dir), std::move(body));
        }
        int arity = tensor_arity(id);
        if (arity < 0) throw ParseError("unknown tensor name '" + id + "'", at);
        expect("(");
        std::vector<VExpr> args;
        args.push_back(vexpr());
        while (accept(",")) args.push_back(vexpr());
        expect(")");
        if (static_cast<int>(args.size()) != arity)
            throw ParseError("tensor '" + id + "' expects " + std::to_string(arity) + " arguments, got " +
                                 std::to_string(args.size()),
                             at);
        return build::named(id, std::move(args));
    }

    VExpr vexpr() {
        skip();
        std::size_t at = i_;
        std::string id = identifier();
        if (id.empty()) fail("expected a vector expression");
        if (id == "g") {
            bool raised;
            if (accept("^"))
                raised = true;
            else if (accept("_"))
                raised = false;
            else
                fail("expected '^' or '_' after g");
            if (i_ >= s_.size() || !std::islower(static_cast<unsigned char>(s_[i_])))
                fail("expected a lowercase index letter");
            char c = s_[i_++];
            return build::gamma(c, raised);
        }
        if (id == "T") {
            expect("(");
            VExpr v = vexpr();
            expect(")");
            return build::T(v);
        }
        if (id == "tau") {
            bool plus;
            if (accept("+"))
                plus = true;
            else if (accept("-"))
                plus = false;
            else
                fail("expected tau+ or tau-");
            expect("(");
            VExpr v = vexpr();
            expect(")");
            return plus ? build::tau_plus(v) : build::tau_minus(v);
        }
        if (id == "bullet") {
            expect("(");
            VExpr a = vexpr();
            expect(",");
            VExpr b = vexpr();
            expect(")");
            return build::bullet(a, b);
        }
        if (id == "S") return build::string_field();
        if (id[0] == 'W' || id[0] == 'V') {
            try {
                return build::slot(id);
            } catch (const ExprError& e) {
                throw ParseError(e.what(), at);
            }
        }
        throw ParseError("unknown vector expression '" + id + "'", at);
    }
};

}  // namespace detail

/// Parses a closed scalar expression and validates dummy pairing.
inline SExpr parse(std::string_view text) {
    detail::Parser p(text);
    SExpr e = p.parse_poly_top();
    check_closed(e);
    return e;
}

/// Parses a vector expression; dummy letters may be left free.
inline VExpr parse_vector(std::string_view text) {
    detail::Parser p(text);
    return p.parse_vexpr_top();
}

}  // namespace gwv::expr
