#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "dynagg/dynamics.hpp"
#include "dynagg/errors.hpp"

using namespace dynagg;

namespace {

judgment_set polar(const agenda& ag, const std::string& row) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] == '1') mask |= 1u << i;
    return ag.polar_set(mask);
}

struct recount {
    std::uint64_t squares = 0, commuting = 0, violating = 0, vacuous = 0;
};

// Independent square-by-square recount, written directly against the
// definition instead of the production scan.
recount recount_squares(const agenda& ag, const aggregation_rule& rule,
                        const revision_operator& op,
                        learnable_scope scope = learnable_scope::all_literals) {
    recount out;
    for_each_domain_profile(ag, rule, [&](const profile& pre) {
        const judgment_set collective = rule.apply(ag, pre);
        for (int ix = 0; ix < ag.literal_count(); ++ix) {
            const literal p = literal::from_index(ix);
            if (scope == learnable_scope::noncontradictory_only &&
                ag.classify(p) == proposition_status::contradictory)
                continue;
            ++out.squares;
            const auto collective_revised = op.try_revise(ag, collective, p);
            profile revised;
            bool defined = true;
            for (judgment_set j : pre.members) {
                auto r = op.try_revise(ag, j, p);
                if (!r) {
                    defined = false;
                    break;
                }
                revised.members.push_back(*r);
            }
            if (!defined || !collective_revised || !rule.in_domain(ag, revised)) {
                ++out.vacuous;
                continue;
            }
            if (rule.apply(ag, revised) == *collective_revised)
                ++out.commuting;
            else
                ++out.violating;
        }
    });
    return out;
}

void require_report_matches_recount(const agenda& ag, const aggregation_rule& rule,
                                    const revision_operator& op) {
    const dynamic_report rep = check_dynamic_rationality(ag, rule, op);
    const recount rc = recount_squares(ag, rule, op);
    INFO("rule " << rule.spec() << ", operator " << op.spec());
    REQUIRE(rep.squares_checked == rc.squares);
    REQUIRE(rep.commuting == rc.commuting);
    REQUIRE(rep.violating == rc.violating);
    REQUIRE(rep.vacuous == rc.vacuous);
    REQUIRE(rep.commuting + rep.violating + rep.vacuous == rep.squares_checked);
}

} // namespace

TEST_CASE("the bundled worked example replays and shows the failure") {
    const repro_report rep = repro_tark_example();
    REQUIRE(rep.pass);
    REQUIRE(rep.mismatch_observed);
    REQUIRE(rep.first_failure.empty());
    REQUIRE(rep.cells.size() == 9);

    const std::vector<std::string> names = {
        "individual 1 pre-revision",  "individual 2 pre-revision",
        "individual 3 pre-revision",  "majority pre-revision",
        "individual 1 post-revision", "individual 2 post-revision",
        "individual 3 post-revision", "majority post-revision",
        "group revision of pre-revision majority",
    };
    for (std::size_t i = 0; i < names.size(); ++i) {
        REQUIRE(rep.cells[i].name == names[i]);
        REQUIRE(rep.cells[i].match);
        REQUIRE(rep.cells[i].expected == rep.cells[i].actual);
    }

    const agenda ag = subjunctive_conditional_agenda();
    REQUIRE(rep.majority_pre == polar(ag, "000"));
    REQUIRE(rep.majority_post == polar(ag, "101"));
    REQUIRE(rep.group_revised == polar(ag, "100"));
    REQUIRE(rep.majority_post != rep.group_revised);
}

TEST_CASE("protecting the conclusion makes the example commute instead") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto prose = revision_operator::hamming(ag, tie_policy::protect_conclusion(ag));
    const repro_report rep = repro_tark_example(prose);
    REQUIRE_FALSE(rep.pass);
    REQUIRE(rep.first_failure == "individual 2 post-revision");
    REQUIRE_FALSE(rep.mismatch_observed);
    REQUIRE(rep.majority_post == rep.group_revised);
}

TEST_CASE("a trivial operator cannot reproduce the revision table") {
    const repro_report rep = repro_tark_example(revision_operator::constant());
    REQUIRE_FALSE(rep.pass);
    REQUIRE(rep.first_failure == "individual 1 post-revision");
}

TEST_CASE("majority with minimal-change revision is not dynamically rational") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rule = aggregation_rule::majority(3);
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));

    const dynamic_report rep = check_dynamic_rationality(ag, rule, op);
    REQUIRE(rep.squares_checked == 2058);
    REQUIRE(rep.commuting == 1968);
    REQUIRE(rep.violating == 90);
    REQUIRE(rep.vacuous == 0);
    REQUIRE(rep.rule_spec == "majority");
    REQUIRE(rep.operator_spec == "hamming:protect=p,p->q");
    REQUIRE(rep.scope == "all");

    // independent recount
    const recount rc = recount_squares(ag, rule, op);
    REQUIRE(rc.violating == 90);
    REQUIRE(rc.commuting == 1968);
    REQUIRE(rc.vacuous == 0);

    // default cap keeps all 90 violations, in canonical square order
    REQUIRE(rep.witnesses.size() == 90);
    for (std::size_t i = 1; i < rep.witnesses.size(); ++i)
        REQUIRE(rep.witnesses[i - 1].index < rep.witnesses[i].index);
}

TEST_CASE("the worked-example square appears among the violations") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rule = aggregation_rule::majority(3);
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));
    const dynamic_report rep = check_dynamic_rationality(ag, rule, op);

    profile pre;
    pre.members = {polar(ag, "001"), polar(ag, "010"), polar(ag, "000")};
    const literal p{0, false};

    bool found = false;
    for (const auto& sq : rep.witnesses) {
        if (!(sq.before == pre) || sq.learnt != p) continue;
        found = true;
        REQUIRE(sq.collective_before == polar(ag, "000"));
        REQUIRE(sq.collective_revised == polar(ag, "100"));
        REQUIRE(sq.aggregated_revised == polar(ag, "101"));
        REQUIRE_FALSE(sq.commutes);
        REQUIRE_FALSE(sq.vacuous);
    }
    REQUIRE(found);

    // the same square through the single-diagram entry point
    const commutation_square sq = commutation_diagram(ag, rule, op, pre, p);
    REQUIRE(sq.index == 378);
    REQUIRE(sq.collective_before == polar(ag, "000"));
    REQUIRE(sq.collective_revised == polar(ag, "100"));
    REQUIRE(sq.aggregated_revised == polar(ag, "101"));
    REQUIRE_FALSE(sq.commutes);

    // out-of-domain profiles are rejected up front
    profile bad;
    bad.members = {judgment_set(37), polar(ag, "010"), polar(ag, "000")};
    REQUIRE_THROWS_AS(commutation_diagram(ag, rule, op, bad, p), semantic_error);
}

TEST_CASE("scan totals match an independent recount across rules and operators") {
    const agenda cond = subjunctive_conditional_agenda();
    const agenda mat = compile_formula_agenda({"p", "p -> q", "q"});
    for (const agenda& ag : {cond, mat}) {
        const tie_policy premises = tie_policy::protect_premises(ag);
        for (const char* rule_spec : {"majority", "quota:1", "quota:3", "dictator:1"}) {
            const auto rule = aggregation_rule::parse(ag, 3, rule_spec);
            require_report_matches_recount(ag, rule, revision_operator::hamming(ag, premises));
            require_report_matches_recount(ag, rule, revision_operator::imposed_canonical(ag));
            require_report_matches_recount(
                ag, rule, revision_operator::parse(ag, "irrational:corrected", premises));
        }
        require_report_matches_recount(ag, aggregation_rule::parse(ag, 3, "premise:1,2"),
                                       revision_operator::hamming(ag, premises));
    }
}

TEST_CASE("trivial revision commutes with every rule") {
    const agenda cond = subjunctive_conditional_agenda();
    const agenda mat = compile_formula_agenda({"p", "p -> q", "q"});
    for (const agenda& ag : {cond, mat}) {
        for (int n : {2, 3}) {
            for (const char* spec : {"majority", "quota:1", "dictator:1", "premise:1,2"}) {
                const auto rule = aggregation_rule::parse(ag, n, spec);
                const auto rep =
                    check_dynamic_rationality(ag, rule, revision_operator::constant());
                INFO("rule " << spec << ", n=" << n);
                REQUIRE(rep.violating == 0);
                REQUIRE(rep.vacuous == 0);
                REQUIRE(rep.commuting == rep.squares_checked);
            }
        }
    }
}

TEST_CASE("imposed revision commutes with majority") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rep = check_dynamic_rationality(ag, aggregation_rule::majority(3),
                                               revision_operator::imposed_canonical(ag));
    REQUIRE(rep.squares_checked == 2058);
    REQUIRE(rep.commuting == 2058);
    REQUIRE(rep.violating == 0);
    REQUIRE(rep.vacuous == 0);
}

TEST_CASE("unanimously held propositions give fixed-point squares") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rule = aggregation_rule::majority(3);
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));
    std::uint64_t seen = 0;
    for_each_domain_profile(ag, rule, [&](const profile& pre) {
        const judgment_set collective = rule.apply(ag, pre);
        for (int ix = 0; ix < ag.literal_count(); ++ix) {
            const literal p = literal::from_index(ix);
            if (pre.support_count(p) != 3 || !collective.accepts(p)) continue;
            ++seen;
            const commutation_square sq = commutation_diagram(ag, rule, op, pre, p);
            REQUIRE_FALSE(sq.vacuous);
            REQUIRE(sq.commutes);
            REQUIRE(*sq.revised == pre);
        }
    });
    REQUIRE(seen > 0);
}

TEST_CASE("explicit domains produce vacuous squares when revision leaves them") {
    const agenda ag = subjunctive_conditional_agenda();
    profile pr1;
    pr1.members = {judgment_set(42), judgment_set(42)};
    const auto tab = aggregation_rule::from_table(ag, 2, {{pr1, judgment_set(42)}});
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));

    const dynamic_report rep = check_dynamic_rationality(ag, tab, op);
    REQUIRE(rep.squares_checked == 6);
    REQUIRE(rep.commuting == 3);
    REQUIRE(rep.violating == 0);
    REQUIRE(rep.vacuous == 3);

    const recount rc = recount_squares(ag, tab, op);
    REQUIRE(rc.vacuous == 3);
    REQUIRE(rc.commuting == 3);
}

TEST_CASE("the learnable scope skips contradictory propositions") {
    const agenda taut = compile_formula_agenda({"p", "p | ~p"});
    const auto rule = aggregation_rule::majority(2);
    const auto op = revision_operator::hamming(taut, tie_policy::none());

    dynamics_options all_opt;
    const auto all = check_dynamic_rationality(taut, rule, op, all_opt);
    REQUIRE(all.squares_checked == 16);
    REQUIRE(all.commuting == 12);
    REQUIRE(all.vacuous == 4);
    REQUIRE(all.violating == 0);
    REQUIRE(all.scope == "all");

    dynamics_options nc_opt;
    nc_opt.scope = learnable_scope::noncontradictory_only;
    const auto nc = check_dynamic_rationality(taut, rule, op, nc_opt);
    REQUIRE(nc.squares_checked == 12);
    REQUIRE(nc.commuting == 12);
    REQUIRE(nc.vacuous == 0);
    REQUIRE(nc.scope == "noncontradictory");

    REQUIRE(recount_squares(taut, rule, op, learnable_scope::noncontradictory_only).squares ==
            12);
}

TEST_CASE("scans are deterministic across thread counts") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rule = aggregation_rule::majority(3);
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));

    dynamics_options serial;
    serial.threads = 1;
    dynamics_options parallel;
    parallel.threads = 4;
    const auto a = check_dynamic_rationality(ag, rule, op, serial);
    const auto b = check_dynamic_rationality(ag, rule, op, parallel);

    REQUIRE(a.commuting == b.commuting);
    REQUIRE(a.violating == b.violating);
    REQUIRE(a.vacuous == b.vacuous);
    REQUIRE(a.witnesses.size() == b.witnesses.size());
    for (std::size_t i = 0; i < a.witnesses.size(); ++i) {
        REQUIRE(a.witnesses[i].index == b.witnesses[i].index);
        REQUIRE(a.witnesses[i].before == b.witnesses[i].before);
        REQUIRE(a.witnesses[i].learnt == b.witnesses[i].learnt);
        REQUIRE(a.witnesses[i].collective_before == b.witnesses[i].collective_before);
        REQUIRE(a.witnesses[i].aggregated_revised == b.witnesses[i].aggregated_revised);
    }

    // absurd thread counts clamp instead of failing
    dynamics_options many;
    many.threads = 1000;
    REQUIRE(check_dynamic_rationality(ag, rule, op, many).violating == a.violating);
}

TEST_CASE("witness caps and budgets are respected") {
    const agenda ag = subjunctive_conditional_agenda();
    const auto rule = aggregation_rule::majority(3);
    const auto op = revision_operator::hamming(ag, tie_policy::protect_premises(ag));

    dynamics_options capped;
    capped.max_witnesses = 5;
    const auto rep = check_dynamic_rationality(ag, rule, op, capped);
    REQUIRE(rep.witnesses.size() == 5);
    REQUIRE(rep.violating == 90);
    REQUIRE(rep.witness_cap == 5);

    // the capped witnesses are the first five by square index
    const auto full = check_dynamic_rationality(ag, rule, op);
    for (std::size_t i = 0; i < 5; ++i)
        REQUIRE(rep.witnesses[i].index == full.witnesses[i].index);

    dynamics_options tight;
    tight.budget = 1000;
    REQUIRE_THROWS_AS(check_dynamic_rationality(ag, rule, op, tight), resource_limit_error);
}
