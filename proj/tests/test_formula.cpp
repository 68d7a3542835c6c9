#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "dynagg/errors.hpp"
#include "dynagg/formula.hpp"

using namespace dynagg;

namespace {

bool eval(const formula_ptr& f, bool p, bool q, bool r = false) {
    return evaluate(f, [&](const std::string& atom) {
        if (atom == "p") return p;
        if (atom == "q") return q;
        if (atom == "r") return r;
        FAIL("unexpected atom " << atom);
        return false;
    });
}

} // namespace

TEST_CASE("parser respects precedence and associativity") {
    // & binds tighter than |
    auto f = parse_formula("p & q | r");
    REQUIRE(f->kind == formula_kind::disjunction);
    REQUIRE(f->lhs->kind == formula_kind::conjunction);

    f = parse_formula("p | q & r");
    REQUIRE(f->kind == formula_kind::disjunction);
    REQUIRE(f->rhs->kind == formula_kind::conjunction);

    // ~ binds tighter than &
    f = parse_formula("~p & q");
    REQUIRE(f->kind == formula_kind::conjunction);
    REQUIRE(f->lhs->kind == formula_kind::negation);

    // -> is right associative and loosest
    f = parse_formula("p -> q -> r");
    REQUIRE(f->kind == formula_kind::implication);
    REQUIRE(f->lhs->kind == formula_kind::atom);
    REQUIRE(f->rhs->kind == formula_kind::implication);

    f = parse_formula("p & q -> r");
    REQUIRE(f->kind == formula_kind::implication);
    REQUIRE(f->lhs->kind == formula_kind::conjunction);

    // parentheses override
    f = parse_formula("(p | q) & r");
    REQUIRE(f->kind == formula_kind::conjunction);
    REQUIRE(f->lhs->kind == formula_kind::disjunction);

    f = parse_formula("~(p -> q)");
    REQUIRE(f->kind == formula_kind::negation);
    REQUIRE(f->lhs->kind == formula_kind::implication);

    // double negation stays nested
    f = parse_formula("~~p");
    REQUIRE(f->kind == formula_kind::negation);
    REQUIRE(f->lhs->kind == formula_kind::negation);
    REQUIRE(f->lhs->lhs->kind == formula_kind::atom);
}

TEST_CASE("atom names allow lowercase, digits, underscores") {
    auto f = parse_formula("x_1 -> y22");
    std::vector<std::string> atoms;
    collect_atoms(f, atoms);
    REQUIRE(atoms == std::vector<std::string>{"x_1", "y22"});
}

TEST_CASE("collect_atoms deduplicates in first-appearance order") {
    auto f = parse_formula("q & p | q -> p");
    std::vector<std::string> atoms;
    collect_atoms(f, atoms);
    REQUIRE(atoms == std::vector<std::string>{"q", "p"});
}

TEST_CASE("syntax errors carry a position") {
    auto position_of = [](const std::string& text) {
        try {
            parse_formula(text);
        } catch (const parse_error& e) {
            return e.position();
        }
        FAIL("expected a parse_error for '" << text << "'");
        return parse_error::npos;
    };

    REQUIRE_THROWS_WITH(parse_formula(""), "syntax error at position 0: empty formula");
    REQUIRE_THROWS_WITH(parse_formula("   "), "syntax error at position 0: empty formula");
    REQUIRE_THROWS_WITH(parse_formula("p &"),
                        "syntax error at position 3: expected an atom or '(', got end of input");
    REQUIRE_THROWS_WITH(parse_formula("p @ q"), "syntax error at position 2: unexpected '@'");
    REQUIRE_THROWS_WITH(parse_formula("(p"),
                        "syntax error at position 2: expected ')', got end of input");
    REQUIRE_THROWS_WITH(parse_formula("P"),
                        "syntax error at position 0: expected an atom or '(', got 'P'");

    REQUIRE(position_of("p &") == 3);
    REQUIRE(position_of("p @ q") == 2);
}

TEST_CASE("to_string uses minimal parentheses") {
    auto round = [](const std::string& text) { return to_string(parse_formula(text)); };

    CHECK(round("(p & q) | r") == "p & q | r");
    CHECK(round("p & (q | r)") == "p & (q | r)");
    CHECK(round("~(p & q)") == "~(p & q)");
    CHECK(round("~p & q") == "~p & q");
    CHECK(round("~~p") == "~~p");
    CHECK(round("p -> (q -> r)") == "p -> q -> r");
    CHECK(round("(p -> q) -> r") == "(p -> q) -> r");
    CHECK(round("(p | q) & r") == "(p | q) & r");
    // left-nested repeats of the same binary operator need no parens
    CHECK(round("(p & q) & r") == "p & q & r");
    CHECK(round("(p | q) | r") == "p | q | r");
}

TEST_CASE("printing then reparsing reproduces the structure") {
    const std::vector<std::string> catalog = {
        "p",
        "~p",
        "~~(p -> q)",
        "p -> q",
        "p -> q -> r",
        "(p -> q) -> r",
        "p & q | r",
        "p & (q | r)",
        "~(p & q) | ~(p | q)",
        "(p | ~q) & (q | ~r) -> (p | ~r)",
        "x_1 & y22 | ~x_1",
    };
    for (const auto& text : catalog) {
        auto f = parse_formula(text);
        auto g = parse_formula(to_string(f));
        INFO("catalog entry: " << text);
        REQUIRE(formula_equal(f, g));
    }
}

TEST_CASE("evaluation matches the truth tables") {
    auto imp = parse_formula("p -> q");
    CHECK(eval(imp, false, false));
    CHECK(eval(imp, false, true));
    CHECK_FALSE(eval(imp, true, false));
    CHECK(eval(imp, true, true));

    auto neg = parse_formula("~p");
    CHECK(eval(neg, false, false));
    CHECK_FALSE(eval(neg, true, false));

    auto con = parse_formula("p & q");
    auto dis = parse_formula("p | q");
    for (bool p : {false, true})
        for (bool q : {false, true}) {
            CHECK(eval(con, p, q) == (p && q));
            CHECK(eval(dis, p, q) == (p || q));
        }

    // compound: (p -> q) & (q -> r) -> (p -> r) is a tautology
    auto chain = parse_formula("(p -> q) & (q -> r) -> (p -> r)");
    for (int m = 0; m < 8; ++m)
        CHECK(eval(chain, m & 1, m & 2, m & 4));

    // contradiction
    auto contra = parse_formula("p & ~p");
    CHECK_FALSE(eval(contra, false, false));
    CHECK_FALSE(eval(contra, true, false));
}
