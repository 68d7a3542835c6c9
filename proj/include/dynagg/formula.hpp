#pragma once

#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dynagg/errors.hpp"

namespace dynagg {

// Propositional formulas over named atoms.
//
// Grammar (loosest binding first):
//   formula  := or_expr ( "->" formula )?        right associative
//   or_expr  := and_expr ( "|" and_expr )*
//   and_expr := unary ( "&" unary )*
//   unary    := "~" unary | atom | "(" formula ")"
//   atom     := [a-z][a-z0-9_]*

enum class formula_kind { atom, negation, conjunction, disjunction, implication };

struct formula;
using formula_ptr = std::shared_ptr<const formula>;

struct formula {
    formula_kind kind;
    std::string atom;      // kind == atom
    formula_ptr lhs, rhs;  // negation uses lhs only

    static formula_ptr make_atom(std::string name) {
        return std::make_shared<formula>(formula{formula_kind::atom, std::move(name), nullptr, nullptr});
    }
    static formula_ptr make_negation(formula_ptr f) {
        return std::make_shared<formula>(formula{formula_kind::negation, {}, std::move(f), nullptr});
    }
    static formula_ptr make_binary(formula_kind k, formula_ptr l, formula_ptr r) {
        return std::make_shared<formula>(formula{k, {}, std::move(l), std::move(r)});
    }
};

inline bool formula_equal(const formula_ptr& a, const formula_ptr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case formula_kind::atom: return a->atom == b->atom;
        case formula_kind::negation: return formula_equal(a->lhs, b->lhs);
        default: return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
    }
}

// Atom names in first-occurrence order, duplicates skipped.
inline void collect_atoms(const formula_ptr& f, std::vector<std::string>& out) {
    if (!f) return;
    if (f->kind == formula_kind::atom) {
        for (const auto& seen : out)
            if (seen == f->atom) return;
        out.push_back(f->atom);
        return;
    }
    collect_atoms(f->lhs, out);
    collect_atoms(f->rhs, out);
}

// Evaluate under an assignment functor: bool operator()(const std::string& atom).
template <typename Assignment>
bool evaluate(const formula_ptr& f, Assignment&& value_of) {
    switch (f->kind) {
        case formula_kind::atom: return value_of(f->atom);
        case formula_kind::negation: return !evaluate(f->lhs, value_of);
        case formula_kind::conjunction: return evaluate(f->lhs, value_of) && evaluate(f->rhs, value_of);
        case formula_kind::disjunction: return evaluate(f->lhs, value_of) || evaluate(f->rhs, value_of);
        case formula_kind::implication: return !evaluate(f->lhs, value_of) || evaluate(f->rhs, value_of);
    }
    return false; // unreachable
}

namespace detail {

inline int formula_precedence(formula_kind k) {
    switch (k) {
        case formula_kind::implication: return 1;
        case formula_kind::disjunction: return 2;
        case formula_kind::conjunction: return 3;
        case formula_kind::negation: return 4;
        case formula_kind::atom: return 5;
    }
    return 0;
}

inline void print_formula(const formula_ptr& f, int parent_precedence, std::string& out) {
    const int prec = formula_precedence(f->kind);
    const bool parens = prec < parent_precedence;
    if (parens) out += '(';
    switch (f->kind) {
        case formula_kind::atom:
            out += f->atom;
            break;
        case formula_kind::negation:
            out += '~';
            print_formula(f->lhs, prec, out);
            break;
        case formula_kind::conjunction:
            print_formula(f->lhs, prec, out);
            out += " & ";
            print_formula(f->rhs, prec + 1, out);
            break;
        case formula_kind::disjunction:
            print_formula(f->lhs, prec, out);
            out += " | ";
            print_formula(f->rhs, prec + 1, out);
            break;
        case formula_kind::implication:
            // right associative: the left operand needs strictly higher precedence
            print_formula(f->lhs, prec + 1, out);
            out += " -> ";
            print_formula(f->rhs, prec, out);
            break;
    }
    if (parens) out += ')';
}

class formula_parser {
public:
    explicit formula_parser(std::string_view text) : text_(text) {}

    formula_ptr parse() {
        skip_spaces();
        if (at_end()) throw parse_error("syntax error at position 0: empty formula", 0);
        formula_ptr f = parse_implication();
        skip_spaces();
        if (!at_end())
            throw parse_error("syntax error at position " + std::to_string(pos_) +
                                  ": unexpected '" + std::string(1, text_[pos_]) + "'",
                              pos_);
        return f;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void skip_spaces() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    bool consume(std::string_view token) {
        skip_spaces();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& expected) {
        skip_spaces();
        std::string got = at_end() ? "end of input" : "'" + std::string(1, peek()) + "'";
        throw parse_error("syntax error at position " + std::to_string(pos_) + ": expected " +
                              expected + ", got " + got,
                          pos_);
    }

    formula_ptr parse_implication() {
        formula_ptr lhs = parse_disjunction();
        if (consume("->")) {
            formula_ptr rhs = parse_implication();
            return formula::make_binary(formula_kind::implication, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    formula_ptr parse_disjunction() {
        formula_ptr f = parse_conjunction();
        while (true) {
            skip_spaces();
            // "|" but not part of "->": '|' is single-char, safe to test directly
            if (!at_end() && peek() == '|') {
                ++pos_;
                f = formula::make_binary(formula_kind::disjunction, std::move(f), parse_conjunction());
            } else {
                return f;
            }
        }
    }

    formula_ptr parse_conjunction() {
        formula_ptr f = parse_unary();
        while (true) {
            skip_spaces();
            if (!at_end() && peek() == '&') {
                ++pos_;
                f = formula::make_binary(formula_kind::conjunction, std::move(f), parse_unary());
            } else {
                return f;
            }
        }
    }

    formula_ptr parse_unary() {
        skip_spaces();
        if (!at_end() && peek() == '~') {
            ++pos_;
            return formula::make_negation(parse_unary());
        }
        return parse_primary();
    }

    formula_ptr parse_primary() {
        skip_spaces();
        if (at_end()) fail("an atom or '('");
        if (peek() == '(') {
            ++pos_;
            formula_ptr f = parse_implication();
            skip_spaces();
            if (at_end() || peek() != ')') fail("')'");
            ++pos_;
            return f;
        }
        if (std::islower(static_cast<unsigned char>(peek()))) {
            std::size_t start = pos_;
            while (!at_end() && (std::islower(static_cast<unsigned char>(peek())) ||
                                 std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                ++pos_;
            return formula::make_atom(std::string(text_.substr(start, pos_ - start)));
        }
        fail("an atom or '('");
    }
};

} // namespace detail

// Canonical rendering with minimal parentheses; parse(to_string(f)) == f structurally.
inline std::string to_string(const formula_ptr& f) {
    std::string out;
    detail::print_formula(f, 0, out);
    return out;
}

inline formula_ptr parse_formula(std::string_view text) {
    return detail::formula_parser(text).parse();
}

} // namespace dynagg
