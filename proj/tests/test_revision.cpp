#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynagg/dynamics.hpp"
#include "dynagg/errors.hpp"
#include "dynagg/revision.hpp"

using namespace dynagg;

namespace {

judgment_set polar(const agenda& ag, const std::string& row) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] == '1') mask |= 1u << i;
    return ag.polar_set(mask);
}

// Reference minimal-change revision: rank every rational candidate containing
// p by an explicit key vector and take the smallest. Mechanically unlike the
// production single-pass comparison.
std::optional<judgment_set> oracle_min_change(const agenda& ag, const tie_policy& tie,
                                              judgment_set j, literal p) {
    if (j.accepts(p)) return j;
    std::optional<judgment_set> best;
    std::vector<int> best_key;
    for (judgment_set r : ag.rational_sets()) {
        if (!r.accepts(p)) continue;
        std::vector<int> key;
        key.push_back(j.symmetric_difference_size(r));
        for (int t : tie.protected_issues) {
            const std::uint32_t pair_mask = 3u << (2 * t);
            key.push_back(((j.bits() ^ r.bits()) & pair_mask) != 0 ? 1 : 0);
        }
        key.push_back(*ag.rational_index(r));
        if (!best || key < best_key) {
            best = r;
            best_key = key;
        }
    }
    return best;
}

void require_matches_oracle(const agenda& ag, const tie_policy& tie) {
    const revision_operator op = revision_operator::hamming(ag, tie);
    const std::uint32_t limit = 1u << ag.literal_count();
    for (std::uint32_t bits = 0; bits < limit; ++bits) {
        const judgment_set j(bits);
        for (int ix = 0; ix < ag.literal_count(); ++ix) {
            const literal p = literal::from_index(ix);
            const auto got = op.try_revise(ag, j, p);
            const auto want = oracle_min_change(ag, tie, j, p);
            INFO("J bits " << bits << ", learning " << ag.literal_name(p));
            REQUIRE(got.has_value() == want.has_value());
            if (got) REQUIRE(*got == *want);
        }
    }
}

} // namespace

TEST_CASE("minimal-change revision reproduces the worked-example cells") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));
    const literal p{0, false};

    CHECK(op.revise(ag, polar(ag, "000"), p) == polar(ag, "100"));
    CHECK(op.revise(ag, polar(ag, "001"), p) == polar(ag, "101"));
    // the tie: {~p, p->q, ~q} is distance 4 from both 111 and 100; protecting
    // the premises keeps p->q
    CHECK(op.revise(ag, polar(ag, "010"), p) == polar(ag, "111"));

    // protecting the conclusion instead keeps ~q
    const auto prose = revision_operator::hamming(ag, tie_policy::protect_conclusion(ag));
    CHECK(prose.revise(ag, polar(ag, "010"), p) == polar(ag, "100"));
    CHECK(prose.revise(ag, polar(ag, "000"), p) == polar(ag, "100"));
    CHECK(prose.revise(ag, polar(ag, "001"), p) == polar(ag, "101"));
}

TEST_CASE("already-accepted propositions short-circuit, even on irrational sets") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));
    for (std::uint32_t bits = 0; bits < 64; ++bits) {
        const judgment_set j(bits);
        for (int ix = 0; ix < 6; ++ix) {
            const literal p = literal::from_index(ix);
            if (!j.accepts(p)) continue;
            REQUIRE(op.try_revise(ag, j, p) == j);
        }
    }
}

TEST_CASE("minimal-change revision equals the ranked-candidate reference") {
    const std::vector<agenda> agendas = {
        subjunctive_conditional_agenda(),
        compile_formula_agenda({"p", "p -> q", "q"}),
        agenda::from_valuation_strings({"p", "q"}, {"00", "01", "10", "11"}),
        agenda::from_valuation_strings({"p"}, {"0", "1"}),
        compile_formula_agenda({"p", "p | ~p"}),
    };
    for (const agenda& ag : agendas) {
        require_matches_oracle(ag, tie_policy::none());
        require_matches_oracle(ag, tie_policy::protect_premises(ag));
        require_matches_oracle(ag, tie_policy::protect_conclusion(ag));
    }
}

TEST_CASE("revision by a contradictory proposition is undefined") {
    const agenda taut = compile_formula_agenda({"p", "p | ~p"});
    const literal impossible{1, true};
    const auto op = revision_operator::hamming(taut, tie_policy::none());
    REQUIRE_FALSE(op.try_revise(taut, judgment_set(0), impossible).has_value());
    REQUIRE_THROWS_AS(op.revise(taut, judgment_set(0), impossible), semantic_error);

    // the property check reports it instead of crashing
    const auto rep = check_operator_property(taut, op, op_check::successful);
    REQUIRE_FALSE(rep.holds);
    bool undefined_seen = false;
    for (const auto& w : rep.witnesses)
        if (w.note == "revision undefined" && !w.after) undefined_seen = true;
    REQUIRE(undefined_seen);
}

TEST_CASE("operator classification matrix on the conditional agenda") {
    const agenda ag = subjunctive_conditional_agenda();
    const tie_policy bare = tie_policy::protect_premises(ag);

    struct row {
        const char* spec;
        bool successful, conservative, regular, preserving;
    };
    const row expected[] = {
        {"hamming", true, true, true, true},
        {"constant", false, true, false, true},
        {"imposed:canonical", true, false, false, true},
        {"irrational:corrected", true, true, true, false},
        {"irrational:printed", false, false, false, false},
    };
    for (const row& r : expected) {
        const auto op = revision_operator::parse(ag, r.spec, bare);
        const auto s = check_operator_property(ag, op, op_check::successful);
        const auto c = check_operator_property(ag, op, op_check::conservative);
        const auto reg = check_operator_property(ag, op, op_check::regular);
        const auto rp = check_operator_property(ag, op, op_check::rationality_preserving);
        INFO("operator " << r.spec);
        CHECK(s.holds == r.successful);
        CHECK(c.holds == r.conservative);
        CHECK(reg.holds == r.regular);
        CHECK(rp.holds == r.preserving);
        // regular is the conjunction by definition
        REQUIRE(reg.holds == (s.holds && c.holds));
        // case counts: all pairs, pairs with p held, their sum, rational-only
        REQUIRE(s.cases_examined == 384);
        REQUIRE(c.cases_examined == 192);
        REQUIRE(reg.cases_examined == 576);
        REQUIRE(rp.cases_examined == 42);
    }
}

TEST_CASE("conservative operators are idempotent where defined") {
    const agenda ag = subjunctive_conditional_agenda();
    for (const char* spec : {"hamming", "constant", "irrational:corrected"}) {
        const auto op = revision_operator::parse(ag, spec, tie_policy::none());
        for (std::uint32_t bits = 0; bits < 64; ++bits) {
            for (int ix = 0; ix < 6; ++ix) {
                const literal p = literal::from_index(ix);
                const auto once = op.try_revise(ag, judgment_set(bits), p);
                if (!once) continue;
                INFO(spec << " on bits " << bits << " learning " << ag.literal_name(p));
                REQUIRE(op.try_revise(ag, *once, p) == *once);
            }
        }
    }
}

TEST_CASE("imposed revision jumps to the fixed target") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto op = revision_operator::imposed_canonical(ag);
    REQUIRE(op.spec() == "imposed:canonical");

    // target for p: first rational set containing it, independent of J
    judgment_set first_with_p;
    for (judgment_set r : ag.rational_sets())
        if (r.accepts({0, false})) {
            first_with_p = r;
            break;
        }
    for (std::uint32_t bits = 0; bits < 64; ++bits)
        REQUIRE(op.try_revise(ag, judgment_set(bits), {0, false}) == first_with_p);

    // an explicit map must be total and contain its own triggers
    std::map<int, judgment_set> partial;
    partial.emplace(0, first_with_p);
    REQUIRE_THROWS_AS(revision_operator::imposed(ag, partial), semantic_error);

    std::map<int, judgment_set> wrong;
    for (int j = 0; j < 6; ++j) wrong.emplace(j, ag.rational_sets()[0]);
    REQUIRE_THROWS_AS(revision_operator::imposed(ag, wrong), semantic_error);

    // no rational set contains a contradictory proposition
    const agenda taut = compile_formula_agenda({"p", "p | ~p"});
    REQUIRE_THROWS_WITH(revision_operator::imposed_canonical(taut),
                        Catch::Matchers::ContainsSubstring("no rational judgment set contains"));
}

TEST_CASE("the corrected irrationalizing operator moves only when p is new") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto corrected = revision_operator::parse(ag, "irrational:corrected", tie_policy::none());
    const auto printed = revision_operator::parse(ag, "irrational:printed", tie_policy::none());
    const literal p{0, false};
    const judgment_set holds_p = polar(ag, "111");
    const judgment_set lacks_p = polar(ag, "011");

    REQUIRE(corrected.try_revise(ag, holds_p, p) == holds_p);
    const auto moved = corrected.try_revise(ag, lacks_p, p);
    REQUIRE(moved.has_value());
    REQUIRE(moved->accepts(p));
    REQUIRE(moved->accepts(p.negated())); // irrational by construction
    REQUIRE_FALSE(ag.is_consistent(*moved));

    // printed has the conditions swapped: it moves exactly when p already held
    REQUIRE(printed.try_revise(ag, lacks_p, p) == lacks_p);
    const auto swapped = printed.try_revise(ag, holds_p, p);
    REQUIRE(swapped.has_value());
    REQUIRE(*swapped != holds_p);
    REQUIRE(*swapped == *moved);
    REQUIRE(printed.spec() == "irrational:printed");
    REQUIRE(corrected.spec() == "irrational:corrected");
    // bare "irrational" means the corrected reading
    REQUIRE(revision_operator::parse(ag, "irrational", tie_policy::none()).spec() ==
            "irrational:corrected");
}

TEST_CASE("table operators override listed pairs and default sensibly") {
    const agenda ag = subjunctive_conditional_agenda();
    const literal p{0, false};
    const judgment_set from = polar(ag, "000");
    const judgment_set to = polar(ag, "111");

    const auto op = revision_operator::from_table(ag, {{from, p, to}});
    REQUIRE(op.spec() == "table");
    REQUIRE(op.try_revise(ag, from, p) == to);

    // unlisted: keep J when p already held
    REQUIRE(op.try_revise(ag, to, p) == to);
    // unlisted: jump to the first rational set containing p otherwise
    judgment_set first_with_p;
    for (judgment_set r : ag.rational_sets())
        if (r.accepts(p)) {
            first_with_p = r;
            break;
        }
    REQUIRE(op.try_revise(ag, polar(ag, "001"), p) == first_with_p);

    // unlisted pair on a contradictory proposition adjoins it
    const agenda taut = compile_formula_agenda({"p", "p | ~p"});
    const auto fallback = revision_operator::from_table(taut, {});
    const literal impossible{1, true};
    judgment_set expectation = taut.rational_sets()[0];
    const auto out = fallback.try_revise(taut, taut.rational_sets()[0], impossible);
    REQUIRE(out.has_value());
    REQUIRE(*out == judgment_set(expectation).add(impossible));

    // conflicting rows and foreign literals are rejected
    REQUIRE_THROWS_AS(revision_operator::from_table(ag, {{from, p, to}, {from, p, from}}),
                      semantic_error);
    REQUIRE_THROWS_AS(revision_operator::from_table(ag, {{from, literal{7, false}, to}}),
                      semantic_error);
    // duplicate identical rows collapse
    REQUIRE(revision_operator::from_table(ag, {{from, p, to}, {from, p, to}})
                .try_revise(ag, from, p) == to);
}

TEST_CASE("protect lists parse labels, keywords and the empty form") {
    const agenda ag = subjunctive_conditional_agenda();
    const tie_policy bare = tie_policy::none();

    auto op = revision_operator::parse(ag, "hamming:protect=p->q,p", bare);
    REQUIRE(op.policy().protected_issues == std::vector<int>{1, 0});
    REQUIRE(op.spec() == "hamming:protect=p->q,p");

    op = revision_operator::parse(ag, "hamming:protect=premises", bare);
    REQUIRE(op.policy().protected_issues == std::vector<int>{0, 1});
    REQUIRE(op.spec() == "hamming:protect=p,p->q");

    op = revision_operator::parse(ag, "hamming:protect=conclusion", bare);
    REQUIRE(op.policy().protected_issues == std::vector<int>{2});
    REQUIRE(op.spec() == "hamming:protect=q");

    op = revision_operator::parse(ag, "hamming:protect=", bare);
    REQUIRE(op.policy().protected_issues.empty());
    REQUIRE(op.spec() == "hamming");

    // the bare form takes the caller-supplied default policy
    op = revision_operator::parse(ag, "hamming", tie_policy::protect_premises(ag));
    REQUIRE(op.spec() == "hamming:protect=p,p->q");

    REQUIRE_THROWS_AS(revision_operator::parse(ag, "hamming:protect=r", bare), semantic_error);
    REQUIRE_THROWS_AS(revision_operator::parse(ag, "hamming:weights=1", bare), parse_error);
    REQUIRE_THROWS_AS(revision_operator::parse(ag, "imposed:bogus", bare), parse_error);
    REQUIRE_THROWS_AS(revision_operator::parse(ag, "irrational:bogus", bare), parse_error);
    REQUIRE_THROWS_AS(revision_operator::parse(ag, "constant:x", bare), parse_error);
    REQUIRE_THROWS_AS(revision_operator::parse(ag, "agm", bare), parse_error);
    REQUIRE_THROWS_AS(
        revision_operator::hamming(ag, tie_policy{{5}}), semantic_error);
}

TEST_CASE("operator check names accept underscores and the rational alias") {
    REQUIRE(op_check_from_string("rationality-preserving") == op_check::rationality_preserving);
    REQUIRE(op_check_from_string("rationality_preserving") == op_check::rationality_preserving);
    REQUIRE(op_check_from_string("rational") == op_check::rationality_preserving);
    REQUIRE(op_check_from_string("successful") == op_check::successful);
    REQUIRE_FALSE(op_check_from_string("succesful").has_value());

    REQUIRE(rule_property_from_string("static_rationality") ==
            rule_property::static_rationality);
    REQUIRE(rule_property_from_string("unanimity") == rule_property::unanimity_preservation);
    REQUIRE(rule_property_from_string("pup") ==
            rule_property::propositionwise_unanimity_preservation);
    REQUIRE_FALSE(rule_property_from_string("anonymity").has_value());
}

TEST_CASE("operator checks enforce size and budget limits") {
    // 11 issues means 22 literals, beyond the enumeration limit
    std::vector<std::string> labels;
    for (int i = 0; i < 11; ++i) labels.push_back("x" + std::to_string(i));
    const agenda wide(std::move(labels), {0u, (1u << 11) - 1u});
    REQUIRE_THROWS_AS(check_operator_property(
                          wide, revision_operator::constant(), op_check::conservative),
                      resource_limit_error);

    const agenda ag = subjunctive_conditional_agenda();
    check_options tight;
    tight.budget = 100;
    REQUIRE_THROWS_AS(check_operator_property(ag, revision_operator::constant(),
                                              op_check::conservative, tight),
                      resource_limit_error);
}
