#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dynagg/aggregation.hpp"
#include "dynagg/agenda.hpp"
#include "dynagg/errors.hpp"
#include "dynagg/revision.hpp"

namespace dynagg {

// Dynamic rationality: aggregating and then revising by p must equal revising
// everyone first and then aggregating,
//     F(J1,...,Jn)|p  =  F(J1|p,...,Jn|p),
// whenever both profiles lie in the rule's domain. One (profile, p) pair is a
// commutation square; a square is vacuous if the revised profile leaves the
// domain (or some revision is undefined), so no requirement applies.

struct commutation_square {
    std::uint64_t index = 0; // rank in the canonical (profile, literal) enumeration
    profile before;
    literal learnt;
    judgment_set collective_before;                 // F(before)
    std::optional<judgment_set> collective_revised; // F(before)|p
    std::optional<profile> revised;                 // memberwise revision, if defined
    std::optional<judgment_set> aggregated_revised; // F(revised), if in domain
    bool vacuous = false;
    bool commutes = false; // meaningful only when !vacuous
};

enum class learnable_scope { all_literals, noncontradictory_only };

struct dynamics_options {
    std::uint64_t budget = 10'000'000; // cap on squares checked
    std::size_t max_witnesses = 100;
    int threads = 1;
    learnable_scope scope = learnable_scope::all_literals;
};

struct dynamic_report {
    std::string rule_spec;
    std::string operator_spec;
    int n = 0;
    std::string scope;
    std::uint64_t squares_checked = 0;
    std::uint64_t commuting = 0;
    std::uint64_t violating = 0;
    std::uint64_t vacuous = 0;
    std::size_t witness_cap = 0;
    std::vector<commutation_square> witnesses; // first violations in canonical order
};

namespace detail {

inline commutation_square evaluate_square(const agenda& ag, const aggregation_rule& rule,
                                          const revision_operator& op, const profile& pre,
                                          judgment_set collective, literal p, std::uint64_t index) {
    commutation_square sq;
    sq.index = index;
    sq.before = pre;
    sq.learnt = p;
    sq.collective_before = collective;
    sq.collective_revised = op.try_revise(ag, collective, p);

    profile revised;
    revised.members.reserve(pre.members.size());
    for (judgment_set j : pre.members) {
        auto r = op.try_revise(ag, j, p);
        if (!r) {
            sq.vacuous = true;
            return sq;
        }
        revised.members.push_back(*r);
    }
    sq.revised = revised;
    if (!rule.in_domain(ag, revised) || !sq.collective_revised) {
        sq.vacuous = true;
        return sq;
    }
    sq.aggregated_revised = rule.apply(ag, revised);
    sq.commutes = (*sq.aggregated_revised == *sq.collective_revised);
    return sq;
}

// Canonical profile of a universal domain by rank (odometer digits, individual
// 0 most significant).
inline profile profile_at_rank(const agenda& ag, int n, std::uint64_t rank) {
    const auto& rs = ag.rational_sets();
    profile pr;
    pr.members.assign(static_cast<std::size_t>(n), rs[0]);
    for (int i = n - 1; i >= 0; --i) {
        pr.members[static_cast<std::size_t>(i)] = rs[rank % rs.size()];
        rank /= rs.size();
    }
    return pr;
}

} // namespace detail

// Exhaustive scan over all (profile in domain, learnt literal) squares.
// Deterministic for any thread count: squares are ranked canonically and
// witnesses are merged by rank.
inline dynamic_report check_dynamic_rationality(const agenda& ag, const aggregation_rule& rule,
                                                const revision_operator& op,
                                                dynamics_options options = {}) {
    std::vector<int> learnable;
    for (int j = 0; j < ag.literal_count(); ++j) {
        if (options.scope == learnable_scope::noncontradictory_only &&
            ag.classify(literal::from_index(j)) == proposition_status::contradictory)
            continue;
        learnable.push_back(j);
    }

    const std::uint64_t profiles = domain_size(ag, rule, options.budget);
    const std::uint64_t squares = profiles * learnable.size();
    if (learnable.empty() || squares / learnable.size() != profiles || squares > options.budget)
        throw resource_limit_error("square enumeration exceeds the budget of " +
                                   std::to_string(options.budget));

    dynamic_report report;
    report.rule_spec = rule.spec();
    report.operator_spec = op.spec();
    report.n = rule.n();
    report.scope = options.scope == learnable_scope::all_literals ? "all" : "noncontradictory";
    report.witness_cap = options.max_witnesses;
    report.squares_checked = squares;

    // explicit domains are indexed through a materialized profile list
    std::vector<profile> table_domain;
    if (!rule.universal_domain())
        for (const auto& [pr, out] : rule.table()) table_domain.push_back(pr);

    struct chunk_result {
        std::uint64_t commuting = 0, violating = 0, vacuous = 0;
        std::vector<commutation_square> witnesses;
    };

    const int max_threads = static_cast<int>(std::min<std::uint64_t>(profiles, 64));
    const int threads = std::clamp(options.threads, 1, max_threads);
    std::vector<chunk_result> results(static_cast<std::size_t>(threads));

    auto run_chunk = [&](int t, std::uint64_t lo, std::uint64_t hi) {
        chunk_result& local = results[static_cast<std::size_t>(t)];
        for (std::uint64_t rank = lo; rank < hi; ++rank) {
            const profile pre = rule.universal_domain()
                                    ? detail::profile_at_rank(ag, rule.n(), rank)
                                    : table_domain[static_cast<std::size_t>(rank)];
            const judgment_set collective = rule.apply(ag, pre);
            for (std::size_t li = 0; li < learnable.size(); ++li) {
                const literal p = literal::from_index(learnable[li]);
                const std::uint64_t square_index = rank * learnable.size() + li;
                commutation_square sq =
                    detail::evaluate_square(ag, rule, op, pre, collective, p, square_index);
                if (sq.vacuous)
                    ++local.vacuous;
                else if (sq.commutes)
                    ++local.commuting;
                else {
                    ++local.violating;
                    if (local.witnesses.size() < options.max_witnesses)
                        local.witnesses.push_back(std::move(sq));
                }
            }
        }
    };

    if (threads == 1) {
        run_chunk(0, 0, profiles);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t per = (profiles + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::uint64_t lo = std::min<std::uint64_t>(per * t, profiles);
            const std::uint64_t hi = std::min<std::uint64_t>(lo + per, profiles);
            pool.emplace_back(run_chunk, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    for (auto& local : results) {
        report.commuting += local.commuting;
        report.violating += local.violating;
        for (auto& w : local.witnesses) report.witnesses.push_back(std::move(w));
        report.vacuous += local.vacuous;
    }
    std::sort(report.witnesses.begin(), report.witnesses.end(),
              [](const commutation_square& a, const commutation_square& b) { return a.index < b.index; });
    if (report.witnesses.size() > options.max_witnesses)
        report.witnesses.resize(options.max_witnesses);
    return report;
}

// One square, for a caller-chosen profile.
inline commutation_square commutation_diagram(const agenda& ag, const aggregation_rule& rule,
                                              const revision_operator& op, const profile& pre,
                                              literal p) {
    if (!rule.in_domain(ag, pre))
        throw semantic_error("profile lies outside the domain of rule '" + rule.spec() + "'");
    std::uint64_t rank = 0;
    if (rule.universal_domain()) {
        for (judgment_set j : pre.members)
            rank = rank * ag.rational_sets().size() +
                   static_cast<std::uint64_t>(*ag.rational_index(j));
    }
    const std::uint64_t index = rank * ag.literal_count() + static_cast<std::uint64_t>(p.index());
    return detail::evaluate_square(ag, rule, op, pre, rule.apply(ag, pre), p, index);
}

// --- bundled worked example ----------------------------------------------

// Three issues p, p->q, q read subjunctively: the only excluded valuation is
// p=1, p->q=1, q=0, so {p, p->q, ~q} is the single minimal inconsistent set
// of size three.
inline agenda subjunctive_conditional_agenda() {
    return agenda::from_valuation_strings(
        {"p", "p->q", "q"}, {"000", "001", "010", "011", "100", "101", "111"});
}

struct repro_cell {
    std::string name;
    judgment_set expected;
    judgment_set actual;
    bool match = false;
};

struct repro_report {
    bool pass = false;
    std::vector<repro_cell> cells;
    bool expect_mismatch = true; // the example is built to violate commutation
    bool mismatch_observed = false;
    std::string first_failure;
    profile pre, post;
    judgment_set majority_pre, majority_post, group_revised;
    literal learnt;
};

// Replays the three-member conditional example: majority opinions before and
// after everyone learns p, against frozen expected tables. The final check is
// that group revision and memberwise revision disagree exactly as expected.
inline repro_report repro_tark_example(const std::optional<revision_operator>& op_override = std::nullopt) {
    const agenda ag = subjunctive_conditional_agenda();
    const revision_operator op =
        op_override ? *op_override : revision_operator::hamming(ag, tie_policy::protect_premises(ag));
    const aggregation_rule rule = aggregation_rule::majority(3);
    const literal p{0, false};

    auto polar = [&](std::string_view row) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i] == '1') mask |= 1u << i;
        return ag.polar_set(mask);
    };

    repro_report report;
    report.learnt = p;
    report.pre.members = {polar("001"), polar("010"), polar("000")};
    report.majority_pre = rule.apply(ag, report.pre);

    report.post.members.reserve(3);
    for (judgment_set j : report.pre.members) report.post.members.push_back(op.revise(ag, j, p));
    report.majority_post = rule.apply(ag, report.post);
    report.group_revised = op.revise(ag, report.majority_pre, p);

    const judgment_set expected_pre[3] = {polar("001"), polar("010"), polar("000")};
    const judgment_set expected_post[3] = {polar("101"), polar("111"), polar("100")};
    const judgment_set expected_majority_pre = polar("000");
    const judgment_set expected_majority_post = polar("101");
    const judgment_set expected_group_revised = polar("100");

    auto cell = [&](std::string name, judgment_set expected, judgment_set actual) {
        report.cells.push_back({std::move(name), expected, actual, expected == actual});
    };
    for (int i = 0; i < 3; ++i)
        cell("individual " + std::to_string(i + 1) + " pre-revision", expected_pre[i],
             report.pre.members[static_cast<std::size_t>(i)]);
    cell("majority pre-revision", expected_majority_pre, report.majority_pre);
    for (int i = 0; i < 3; ++i)
        cell("individual " + std::to_string(i + 1) + " post-revision", expected_post[i],
             report.post.members[static_cast<std::size_t>(i)]);
    cell("majority post-revision", expected_majority_post, report.majority_post);
    cell("group revision of pre-revision majority", expected_group_revised, report.group_revised);

    report.mismatch_observed = (report.majority_post != report.group_revised);
    report.pass = report.mismatch_observed == report.expect_mismatch;
    for (const auto& c : report.cells)
        if (!c.match) {
            report.pass = false;
            if (report.first_failure.empty()) report.first_failure = c.name;
        }
    if (!report.pass && report.first_failure.empty())
        report.first_failure = "commutation mismatch verdict";
    return report;
}

} // namespace dynagg
