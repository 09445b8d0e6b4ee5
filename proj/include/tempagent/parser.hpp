// ============================================================================
// tempagent/parser.hpp: recursive-descent parser for formulas and rules
// ============================================================================
//
//   formula := impl
//   impl    := until ("->" impl)?
//   until   := or ("Until" or)*
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := ("~" | "N" | "Today" | "KnI" | "Unc" | "K"INT | "D"INT) unary | atom
//   atom    := "true" | "false" | "x"INT | "(" formula ")"
//
//   rule    := formula (";" formula)* "|-" formula
//
// ============================================================================

#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tempagent/error.hpp"
#include "tempagent/formula.hpp"

namespace tempagent {

namespace detail {

enum class Tok : std::uint8_t {
    End, Var, True, False, Not, And, Or, Implies, Turnstile, Semicolon,
    LParen, RParen, Know, Dist, Next, Today, KnI, Unc, Until,
};

struct Token {
    Tok kind = Tok::End;
    std::uint32_t value = 0;
    std::size_t line = 1;
    std::size_t column = 1;
    std::string text;
};

inline const std::vector<std::string>& formula_start_set() {
    static const std::vector<std::string> s{
        "x<n>", "true", "false", "(", "~", "N", "Today", "KnI", "Unc", "K<n>", "D<n>"};
    return s;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= text_.size()) return t;

        char c = text_[pos_];
        auto punct = [&](Tok k, std::size_t len) {
            t.kind = k;
            t.text = std::string(text_.substr(pos_, len));
            advance(len);
            return t;
        };
        switch (c) {
        case '~': return punct(Tok::Not, 1);
        case '&': return punct(Tok::And, 1);
        case ';': return punct(Tok::Semicolon, 1);
        case '(': return punct(Tok::LParen, 1);
        case ')': return punct(Tok::RParen, 1);
        case '|':
            if (peek(1) == '-') return punct(Tok::Turnstile, 2);
            return punct(Tok::Or, 1);
        case '-':
            if (peek(1) == '>') return punct(Tok::Implies, 2);
            throw ParseError(t.line, t.column, "unexpected '-'", {"->"});
        default: break;
        }

        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') {
            std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                    ? "byte " + std::to_string(static_cast<unsigned char>(c))
                                    : std::string("'") + c + "'";
            throw ParseError(t.line, t.column, "unexpected character " + shown);
        }

        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            advance(1);
        t.text = std::string(text_.substr(start, pos_ - start));
        classify(t);
        return t;
    }

private:
    char peek(std::size_t off) const {
        return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++pos_) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance(1);
    }

    // Parses the decimal suffix of an identifier such as "x12" or "D0".
    static bool parse_index(std::string_view digits, std::uint32_t& out) {
        if (digits.empty()) return false;
        std::uint64_t v = 0;
        for (char d : digits) {
            if (!std::isdigit(static_cast<unsigned char>(d))) return false;
            v = v * 10 + static_cast<std::uint64_t>(d - '0');
            if (v > std::numeric_limits<std::uint32_t>::max()) return false;
        }
        out = static_cast<std::uint32_t>(v);
        return true;
    }

    static void classify(Token& t) {
        const std::string& w = t.text;
        if (w == "true") { t.kind = Tok::True; return; }
        if (w == "false") { t.kind = Tok::False; return; }
        if (w == "N") { t.kind = Tok::Next; return; }
        if (w == "Today") { t.kind = Tok::Today; return; }
        if (w == "KnI") { t.kind = Tok::KnI; return; }
        if (w == "Unc") { t.kind = Tok::Unc; return; }
        if (w == "Until") { t.kind = Tok::Until; return; }

        std::string_view rest = std::string_view(w).substr(1);
        switch (w[0]) {
        case 'x':
            if (!parse_index(rest, t.value))
                throw ParseError(t.line, t.column, "malformed variable '" + w + "'", {"x<n>"});
            if (t.value == 0)
                throw ParseError(t.line, t.column, "variable index must be >= 1 in '" + w + "'");
            t.kind = Tok::Var;
            return;
        case 'K':
            if (!parse_index(rest, t.value))
                throw ParseError(t.line, t.column, "malformed agent index in '" + w + "'", {"K<n>"});
            if (t.value == 0)
                throw ParseError(t.line, t.column, "agent index must be >= 1 in '" + w + "'");
            t.kind = Tok::Know;
            return;
        case 'D':
            if (!parse_index(rest, t.value))
                throw ParseError(t.line, t.column, "malformed Dist index in '" + w + "'", {"D<n>"});
            t.kind = Tok::Dist;
            return;
        default:
            throw ParseError(t.line, t.column, "unknown identifier '" + w + "'", formula_start_set());
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    static constexpr std::size_t max_depth = 1000;
    static constexpr std::uint32_t max_size = 20000;

    explicit Parser(std::string_view text) : lexer_(text) { cur_ = lexer_.next(); }

    Formula formula() { return impl(); }

    bool at(Tok k) const noexcept { return cur_.kind == k; }
    const Token& current() const noexcept { return cur_; }

    void expect(Tok k, const char* shown) {
        if (!at(k)) fail({shown});
        cur_ = lexer_.next();
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = at(Tok::End) ? "end of input" : "'" + cur_.text + "'";
        throw ParseError(cur_.line, cur_.column, "unexpected " + found, std::move(expected));
    }

private:
    void bump() { cur_ = lexer_.next(); }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > max_depth)
                throw ParseError(p_.cur_.line, p_.cur_.column, "formula nested too deeply");
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    Formula impl() {
        DepthGuard g(*this);
        Formula lhs = until_chain();
        if (at(Tok::Implies)) {
            bump();
            return checked(implies(std::move(lhs), impl()));
        }
        return lhs;
    }

    Formula until_chain() {
        Formula acc = or_chain();
        while (at(Tok::Until)) {
            bump();
            acc = checked(until(std::move(acc), or_chain()));
        }
        return acc;
    }

    Formula or_chain() {
        Formula acc = and_chain();
        while (at(Tok::Or)) {
            bump();
            acc = checked(disj(std::move(acc), and_chain()));
        }
        return acc;
    }

    Formula and_chain() {
        Formula acc = unary();
        while (at(Tok::And)) {
            bump();
            acc = checked(conj(std::move(acc), unary()));
        }
        return acc;
    }

    // Left-nested chains grow without parser recursion; bound the tree so the
    // recursive printers and comparators stay within the stack.
    Formula checked(Formula f) const {
        if (f.size() > max_size) throw ParseError(cur_.line, cur_.column, "formula too large");
        return f;
    }

    Formula unary() {
        DepthGuard g(*this);
        Token t = cur_;
        switch (t.kind) {
        case Tok::Not: bump(); return neg(unary());
        case Tok::Next: bump(); return next(unary());
        case Tok::Today: bump(); return today(unary());
        case Tok::KnI: bump(); return kni(unary());
        case Tok::Unc: bump(); return unc(unary());
        case Tok::Know: bump(); return knows(t.value, unary());
        case Tok::Dist: bump(); return dist(t.value, unary());
        default: return atom();
        }
    }

    Formula atom() {
        switch (cur_.kind) {
        case Tok::True: bump(); return top();
        case Tok::False: bump(); return bot();
        case Tok::Var: {
            auto i = cur_.value;
            bump();
            return var(i);
        }
        case Tok::LParen: {
            bump();
            Formula f = impl();
            expect(Tok::RParen, ")");
            return f;
        }
        default: fail(formula_start_set());
        }
    }

    Lexer lexer_;
    Token cur_;
    std::size_t depth_ = 0;
};

} // namespace detail

/// Parses a complete formula; throws ParseError with a 1-based position.
inline Formula parse(std::string_view text) {
    detail::Parser p(text);
    Formula f = p.formula();
    if (!p.at(detail::Tok::End)) {
        p.fail({"&", "|", "->", "Until", "end of input"});
    }
    return f;
}

/// Parses `premise ; ... ; premise |- conclusion`.
inline std::pair<std::vector<Formula>, Formula> parse_rule_text(std::string_view text) {
    detail::Parser p(text);
    std::vector<Formula> premises{p.formula()};
    while (p.at(detail::Tok::Semicolon)) {
        p.expect(detail::Tok::Semicolon, ";");
        premises.push_back(p.formula());
    }
    if (!p.at(detail::Tok::Turnstile)) p.fail({";", "|-"});
    p.expect(detail::Tok::Turnstile, "|-");
    Formula conclusion = p.formula();
    if (!p.at(detail::Tok::End)) p.fail({"end of input"});
    return {std::move(premises), std::move(conclusion)};
}

} // namespace tempagent
