#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynagg/aggregation.hpp"
#include "dynagg/agenda.hpp"
#include "dynagg/dynamics.hpp"
#include "dynagg/errors.hpp"
#include "dynagg/revision.hpp"

namespace dynagg {

// Existence search: is there a revision operator with the required properties
// that commutes with a given rule on every square? Phrased as a constraint
// satisfaction problem whose decision variables are the revisions J|p of
// rational judgment sets:
//
//   variables    (J, p) for rational J, except pairs pinned by conservativeness
//                (p in J forces J|p = J)
//   domains      candidate revisions, restricted by successfulness (must
//                contain p) and rationality preservation (must be rational
//                when J is rational and p is non-contradictory)
//   constraints  one per (profile, p) square: if the revised profile stays in
//                the rule's domain, F(revised) must equal the collective
//                revision F(profile)|p. Collective cells are pinned (p in G,
//                conservative), decision variables (G rational), or forced
//                cells (G irrational) whose value the square determines.
//
// A SAT verdict always carries a replay-verified operator table; an UNSAT
// verdict is produced only by exhausting the search space. Running past the
// node budget yields budget_exhausted instead.

struct op_requirements {
    bool successful = false;
    bool conservative = false;
    bool rationality_preserving = false;

    std::string display() const {
        std::string out;
        auto append = [&](const char* name) {
            if (!out.empty()) out += ',';
            out += name;
        };
        if (successful) append("successful");
        if (conservative) append("conservative");
        if (rationality_preserving) append("rationality-preserving");
        return out.empty() ? "none" : out;
    }
};

enum class search_verdict { satisfiable, unsatisfiable, budget_exhausted };

inline std::string to_string(search_verdict v) {
    switch (v) {
        case search_verdict::satisfiable: return "sat";
        case search_verdict::unsatisfiable: return "unsat";
        case search_verdict::budget_exhausted: return "budget-exhausted";
    }
    return "?";
}

struct search_stats {
    std::uint64_t nodes = 0;        // candidate assignments tried
    std::uint64_t propagations = 0; // square evaluations, root and in-tree
    std::uint64_t forced_cells = 0; // collective cells fixed by squares
    int max_depth = 0;
};

struct search_outcome {
    search_verdict verdict = search_verdict::unsatisfiable;
    std::vector<revision_entry> witness_entries; // constrained cells only
    std::optional<revision_operator> witness;    // replay-verified table operator
    search_stats stats;
};

namespace detail {

struct csp_square {
    std::array<std::int16_t, 3> member{}; // rational indices of the profile
    std::int8_t lit = 0;
    std::uint32_t collective = 0; // F(profile) bits
    enum class out : std::int8_t { pinned, variable, forced } okind = out::pinned;
    int out_var = -1;
};

struct csp_problem {
    const agenda* ag = nullptr;
    const aggregation_rule* rule = nullptr;
    op_requirements req;
    int n = 0;
    int nlit = 0;

    struct variable {
        int rational_index;
        int literal_index;
        std::vector<judgment_set> candidates;
    };
    std::vector<variable> vars;
    std::vector<int> var_of; // (rational index * nlit + literal) -> var id or -1
    std::vector<csp_square> squares;
    std::vector<std::vector<int>> squares_of_var;    // distinct square ids per var
    std::vector<std::vector<int>> participants;      // distinct var ids per square

    int var_id(int rational_index, int literal_index) const {
        return var_of[static_cast<std::size_t>(rational_index * nlit + literal_index)];
    }
};

inline csp_problem build_csp(const agenda& ag, const aggregation_rule& rule,
                             const op_requirements& req) {
    if (static_cast<int>(ag.rational_sets().size()) > 16)
        throw resource_limit_error("operator search supports at most 16 rational judgment sets");
    if (rule.n() > 3) throw resource_limit_error("operator search supports at most 3 individuals");
    if (ag.literal_count() > 12)
        throw resource_limit_error("operator search supports at most 12 literals");

    csp_problem csp;
    csp.ag = &ag;
    csp.rule = &rule;
    csp.req = req;
    csp.n = rule.n();
    csp.nlit = ag.literal_count();

    const auto& rs = ag.rational_sets();
    csp.var_of.assign(rs.size() * static_cast<std::size_t>(csp.nlit), -1);

    // decision variables and their candidate domains
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        for (int li = 0; li < csp.nlit; ++li) {
            const literal p = literal::from_index(li);
            if (req.conservative && rs[ri].accepts(p)) continue; // pinned to rs[ri]
            csp_problem::variable var;
            var.rational_index = static_cast<int>(ri);
            var.literal_index = li;
            const bool must_be_rational =
                req.rationality_preserving &&
                ag.classify(p) != proposition_status::contradictory;
            if (must_be_rational) {
                for (judgment_set c : rs)
                    if (!req.successful || c.accepts(p)) var.candidates.push_back(c);
            } else {
                std::vector<judgment_set> all;
                for (std::uint64_t bits = 0; bits < (1ull << csp.nlit); ++bits) {
                    judgment_set c(static_cast<std::uint32_t>(bits));
                    if (req.successful && !c.accepts(p)) continue;
                    all.push_back(c);
                }
                std::sort(all.begin(), all.end()); // canonical candidate order
                var.candidates = std::move(all);
            }
            csp.var_of[ri * static_cast<std::size_t>(csp.nlit) + static_cast<std::size_t>(li)] =
                static_cast<int>(csp.vars.size());
            csp.vars.push_back(std::move(var));
        }
    }

    // squares over the rule's domain
    std::vector<profile> domain;
    for_each_domain_profile(ag, rule, [&](const profile& pr) { domain.push_back(pr); });

    for (const profile& pr : domain) {
        const judgment_set collective = rule.apply(ag, pr);
        std::array<std::int16_t, 3> member{};
        for (int i = 0; i < csp.n; ++i)
            member[static_cast<std::size_t>(i)] =
                static_cast<std::int16_t>(*ag.rational_index(pr.members[static_cast<std::size_t>(i)]));
        for (int li = 0; li < csp.nlit; ++li) {
            const literal p = literal::from_index(li);
            csp_square sq;
            sq.member = member;
            sq.lit = static_cast<std::int8_t>(li);
            sq.collective = collective.bits();
            if (csp.req.conservative && collective.accepts(p)) {
                sq.okind = csp_square::out::pinned;
            } else if (auto gi = ag.rational_index(collective)) {
                sq.okind = csp_square::out::variable;
                sq.out_var = csp.var_id(*gi, li);
            } else {
                sq.okind = csp_square::out::forced;
            }
            csp.squares.push_back(sq);
        }
    }

    // distinct participants per square, distinct squares per variable
    csp.participants.resize(csp.squares.size());
    csp.squares_of_var.resize(csp.vars.size());
    for (std::size_t si = 0; si < csp.squares.size(); ++si) {
        const csp_square& sq = csp.squares[si];
        std::vector<int>& part = csp.participants[si];
        auto add = [&](int v) {
            if (v < 0) return;
            for (int existing : part)
                if (existing == v) return;
            part.push_back(v);
            csp.squares_of_var[static_cast<std::size_t>(v)].push_back(static_cast<int>(si));
        };
        for (int i = 0; i < csp.n; ++i) add(csp.var_id(sq.member[static_cast<std::size_t>(i)], sq.lit));
        if (sq.okind == csp_square::out::variable) add(sq.out_var);
    }
    return csp;
}

// Evaluation of one square under a (partial) assignment. values[v] is the
// assigned judgment set bits or unset_value. forced is the map of collective
// cells fixed so far; eval may extend it through new_cells.
constexpr std::uint64_t unset_value = ~0ull;

enum class square_status { satisfied, conflict };

template <typename ForcedMap>
square_status eval_square(const csp_problem& csp, const csp_square& sq,
                          const std::vector<std::uint64_t>& values, ForcedMap& forced,
                          std::vector<std::pair<std::uint64_t, std::uint32_t>>* new_cells,
                          profile& scratch) {
    const agenda& ag = *csp.ag;
    const literal p = literal::from_index(sq.lit);
    scratch.members.resize(static_cast<std::size_t>(csp.n));
    for (int i = 0; i < csp.n; ++i) {
        const int ri = sq.member[static_cast<std::size_t>(i)];
        const int v = csp.var_id(ri, sq.lit);
        if (v < 0) {
            scratch.members[static_cast<std::size_t>(i)] = ag.rational_sets()[static_cast<std::size_t>(ri)];
        } else {
            scratch.members[static_cast<std::size_t>(i)] =
                judgment_set(static_cast<std::uint32_t>(values[static_cast<std::size_t>(v)]));
        }
    }
    if (!csp.rule->in_domain(ag, scratch)) return square_status::satisfied; // vacuous
    const judgment_set aggregated = csp.rule->apply(ag, scratch);

    switch (sq.okind) {
        case csp_square::out::pinned:
            return aggregated.bits() == sq.collective ? square_status::satisfied
                                                      : square_status::conflict;
        case csp_square::out::variable: {
            const std::uint64_t v = values[static_cast<std::size_t>(sq.out_var)];
            return aggregated.bits() == static_cast<std::uint32_t>(v) ? square_status::satisfied
                                                                      : square_status::conflict;
        }
        case csp_square::out::forced: {
            const std::uint64_t key =
                (static_cast<std::uint64_t>(sq.collective) << 8) | static_cast<std::uint64_t>(sq.lit);
            auto it = forced.find(key);
            if (it != forced.end())
                return aggregated.bits() == it->second ? square_status::satisfied
                                                       : square_status::conflict;
            // property constraints on a newly forced collective cell
            if (csp.req.successful && !aggregated.accepts(p)) return square_status::conflict;
            if (new_cells) {
                forced.emplace(key, aggregated.bits());
                new_cells->emplace_back(key, aggregated.bits());
            }
            return square_status::satisfied;
        }
    }
    return square_status::conflict; // unreachable
}

} // namespace detail

struct search_instance {
    op_requirements required;
    std::uint64_t node_budget = 10'000'000;
};

// Backtracking engine with root-level unit propagation. Deterministic:
// variables in canonical (rational set, literal) order, candidates in
// canonical order, forced cells on an undo trail.
inline search_outcome exists_commuting_operator(const agenda& ag, const aggregation_rule& rule,
                                                const search_instance& instance) {
    detail::csp_problem csp = detail::build_csp(ag, rule, instance.required);
    search_outcome outcome;
    search_stats& stats = outcome.stats;

    std::vector<std::uint64_t> values(csp.vars.size(), detail::unset_value);
    std::map<std::uint64_t, std::uint32_t> forced;
    profile scratch;

    // --- root propagation to fixpoint ------------------------------------
    // Squares whose participants are all pinned or singleton-domain fix
    // forced cells; squares with exactly one free participant filter its
    // domain. Wiped-out domains prove UNSAT with zero search nodes.
    std::vector<std::vector<judgment_set>> domains;
    domains.reserve(csp.vars.size());
    for (auto& v : csp.vars) domains.push_back(v.candidates);
    for (const auto& d : domains)
        if (d.empty()) return outcome; // no admissible value for some cell

    auto refresh_singletons = [&]() {
        for (std::size_t v = 0; v < domains.size(); ++v)
            if (domains[v].size() == 1) values[v] = domains[v][0].bits();
    };
    refresh_singletons();

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t si = 0; si < csp.squares.size(); ++si) {
            const detail::csp_square& sq = csp.squares[si];
            int free_var = -1;
            int free_count = 0;
            for (int v : csp.participants[si])
                if (values[static_cast<std::size_t>(v)] == detail::unset_value) {
                    free_var = v;
                    ++free_count;
                }
            if (free_count == 0) {
                ++stats.propagations;
                std::vector<std::pair<std::uint64_t, std::uint32_t>> cells;
                if (detail::eval_square(csp, sq, values, forced, &cells, scratch) ==
                    detail::square_status::conflict) {
                    outcome.verdict = search_verdict::unsatisfiable;
                    return outcome;
                }
                if (!cells.empty()) {
                    stats.forced_cells += cells.size();
                    changed = true; // a forced cell may tighten other squares
                }
            } else if (free_count == 1) {
                auto& dom = domains[static_cast<std::size_t>(free_var)];
                if (dom.size() <= 1) continue;
                std::vector<judgment_set> kept;
                for (judgment_set c : dom) {
                    ++stats.propagations;
                    values[static_cast<std::size_t>(free_var)] = c.bits();
                    // lookups only: hypothetical evaluations must not force cells
                    if (detail::eval_square(csp, sq, values, forced, nullptr, scratch) ==
                        detail::square_status::satisfied)
                        kept.push_back(c);
                }
                values[static_cast<std::size_t>(free_var)] = detail::unset_value;
                if (kept.size() != dom.size()) {
                    dom = std::move(kept);
                    changed = true;
                    if (dom.empty()) {
                        outcome.verdict = search_verdict::unsatisfiable;
                        return outcome;
                    }
                    refresh_singletons();
                }
            }
        }
    }

    // --- depth-first search over the remaining free variables -------------
    std::vector<int> free_vars;
    for (std::size_t v = 0; v < domains.size(); ++v)
        if (values[v] == detail::unset_value) free_vars.push_back(static_cast<int>(v));

    std::vector<int> pending(csp.squares.size(), 0);
    for (std::size_t si = 0; si < csp.squares.size(); ++si)
        for (int v : csp.participants[si])
            if (values[static_cast<std::size_t>(v)] == detail::unset_value)
                ++pending[si];

    // squares already fully determined were verified during root propagation

    std::vector<std::pair<std::uint64_t, std::uint32_t>> trail; // forced cells, undo on backtrack
    bool out_of_budget = false;

    auto assign = [&](int v, judgment_set c, std::size_t& trail_mark) -> bool {
        trail_mark = trail.size();
        values[static_cast<std::size_t>(v)] = c.bits();
        bool ok = true;
        for (int si : csp.squares_of_var[static_cast<std::size_t>(v)]) --pending[static_cast<std::size_t>(si)];
        for (int si : csp.squares_of_var[static_cast<std::size_t>(v)]) {
            if (pending[static_cast<std::size_t>(si)] != 0) continue;
            ++stats.propagations;
            std::vector<std::pair<std::uint64_t, std::uint32_t>> cells;
            if (detail::eval_square(csp, csp.squares[static_cast<std::size_t>(si)], values, forced,
                                    &cells, scratch) == detail::square_status::conflict) {
                ok = false;
            }
            for (auto& cell : cells) trail.push_back(cell);
            if (!ok) break;
        }
        if (!ok) {
            while (trail.size() > trail_mark) {
                forced.erase(trail.back().first);
                trail.pop_back();
            }
            for (int si : csp.squares_of_var[static_cast<std::size_t>(v)]) ++pending[static_cast<std::size_t>(si)];
            values[static_cast<std::size_t>(v)] = detail::unset_value;
        }
        return ok;
    };

    auto unassign = [&](int v, std::size_t trail_mark) {
        while (trail.size() > trail_mark) {
            forced.erase(trail.back().first);
            trail.pop_back();
        }
        for (int si : csp.squares_of_var[static_cast<std::size_t>(v)]) ++pending[static_cast<std::size_t>(si)];
        values[static_cast<std::size_t>(v)] = detail::unset_value;
    };

    // returns true when a full solution is found
    auto dfs = [&](auto&& self, std::size_t depth) -> bool {
        stats.max_depth = std::max(stats.max_depth, static_cast<int>(depth));
        if (depth == free_vars.size()) return true;
        const int v = free_vars[depth];
        for (judgment_set c : domains[static_cast<std::size_t>(v)]) {
            if (stats.nodes >= instance.node_budget) {
                out_of_budget = true;
                return false;
            }
            ++stats.nodes;
            std::size_t mark = 0;
            if (!assign(v, c, mark)) continue;
            if (self(self, depth + 1)) return true;
            unassign(v, mark);
            if (out_of_budget) return false;
        }
        return false;
    };

    const bool sat = dfs(dfs, 0);
    if (!sat) {
        outcome.verdict =
            out_of_budget ? search_verdict::budget_exhausted : search_verdict::unsatisfiable;
        return outcome;
    }

    // --- assemble and replay-verify the witness ---------------------------
    outcome.verdict = search_verdict::satisfiable;
    for (std::size_t v = 0; v < csp.vars.size(); ++v) {
        const auto& var = csp.vars[v];
        outcome.witness_entries.push_back(
            {ag.rational_sets()[static_cast<std::size_t>(var.rational_index)],
             literal::from_index(var.literal_index),
             judgment_set(static_cast<std::uint32_t>(values[v]))});
    }
    for (const auto& [key, bits] : forced)
        outcome.witness_entries.push_back({judgment_set(static_cast<std::uint32_t>(key >> 8)),
                                           literal::from_index(static_cast<int>(key & 0xff)),
                                           judgment_set(bits)});

    revision_operator witness = revision_operator::from_table(ag, outcome.witness_entries);
    check_options strict;
    strict.budget = (1ull << ag.literal_count()) * static_cast<std::uint64_t>(ag.literal_count());
    if (instance.required.successful &&
        !check_operator_property(ag, witness, op_check::successful, strict).holds)
        throw std::logic_error("search produced a witness that is not successful");
    if (instance.required.conservative &&
        !check_operator_property(ag, witness, op_check::conservative, strict).holds)
        throw std::logic_error("search produced a witness that is not conservative");
    if (instance.required.rationality_preserving &&
        !check_operator_property(ag, witness, op_check::rationality_preserving, strict).holds)
        throw std::logic_error("search produced a witness that does not preserve rationality");

    dynamics_options replay;
    replay.budget = std::max<std::uint64_t>(
        10'000'000, domain_size(ag, rule, ~0ull) * static_cast<std::uint64_t>(ag.literal_count()));
    replay.max_witnesses = 1;
    const dynamic_report verification = check_dynamic_rationality(ag, rule, witness, replay);
    if (verification.violating != 0)
        throw std::logic_error("search produced a witness that fails commutation replay");
    outcome.witness = std::move(witness);
    return outcome;
}

// Independent cross-check: brute-force enumeration over the decision-variable
// space left after root propagation, with a from-scratch constraint check per
// assignment. Verdicts must match exists_commuting_operator on any instance
// small enough for both.
inline search_outcome exists_commuting_operator_by_enumeration(
    const agenda& ag, const aggregation_rule& rule, const search_instance& instance,
    std::uint64_t assignment_budget = 10'000'000) {
    detail::csp_problem csp = detail::build_csp(ag, rule, instance.required);
    search_outcome outcome;

    // unit propagation: singleton promotion plus one-free-participant filtering
    std::vector<std::uint64_t> values(csp.vars.size(), detail::unset_value);
    std::map<std::uint64_t, std::uint32_t> forced;
    profile scratch;
    std::vector<std::vector<judgment_set>> domains;
    domains.reserve(csp.vars.size());
    for (auto& v : csp.vars) domains.push_back(v.candidates);
    for (const auto& d : domains)
        if (d.empty()) return outcome; // no admissible value for some cell

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < domains.size(); ++v)
            if (domains[v].size() == 1 && values[v] == detail::unset_value) {
                values[v] = domains[v][0].bits();
                changed = true;
            }
        for (std::size_t si = 0; si < csp.squares.size(); ++si) {
            int free_var = -1, free_count = 0;
            for (int v : csp.participants[si])
                if (values[static_cast<std::size_t>(v)] == detail::unset_value) {
                    free_var = v;
                    ++free_count;
                }
            ++outcome.stats.propagations;
            if (free_count == 0) {
                std::vector<std::pair<std::uint64_t, std::uint32_t>> cells;
                if (detail::eval_square(csp, csp.squares[si], values, forced, &cells, scratch) ==
                    detail::square_status::conflict) {
                    outcome.verdict = search_verdict::unsatisfiable;
                    return outcome;
                }
                if (!cells.empty()) changed = true;
            } else if (free_count == 1 && domains[static_cast<std::size_t>(free_var)].size() > 1) {
                std::vector<judgment_set> kept;
                for (judgment_set c : domains[static_cast<std::size_t>(free_var)]) {
                    values[static_cast<std::size_t>(free_var)] = c.bits();
                    if (detail::eval_square(csp, csp.squares[si], values, forced, nullptr, scratch) ==
                        detail::square_status::satisfied)
                        kept.push_back(c);
                }
                values[static_cast<std::size_t>(free_var)] = detail::unset_value;
                if (kept.empty()) {
                    outcome.verdict = search_verdict::unsatisfiable;
                    return outcome;
                }
                if (kept.size() != domains[static_cast<std::size_t>(free_var)].size()) {
                    domains[static_cast<std::size_t>(free_var)] = std::move(kept);
                    changed = true;
                }
            }
        }
    }

    std::vector<int> free_vars;
    std::uint64_t space = 1;
    for (std::size_t v = 0; v < domains.size(); ++v)
        if (values[v] == detail::unset_value) {
            free_vars.push_back(static_cast<int>(v));
            if (space > assignment_budget / std::max<std::size_t>(domains[v].size(), 1) + 1)
                space = assignment_budget + 1;
            else
                space *= domains[v].size();
        }
    if (space > assignment_budget)
        throw resource_limit_error("cross-check enumeration space exceeds the budget of " +
                                   std::to_string(assignment_budget));

    // odometer over free variables; every assignment is checked from scratch
    std::vector<std::size_t> pick(free_vars.size(), 0);
    const std::map<std::uint64_t, std::uint32_t> forced_base = forced;
    while (true) {
        ++outcome.stats.nodes;
        for (std::size_t d = 0; d < free_vars.size(); ++d)
            values[static_cast<std::size_t>(free_vars[d])] =
                domains[static_cast<std::size_t>(free_vars[d])][pick[d]].bits();

        std::map<std::uint64_t, std::uint32_t> forced_local = forced_base;
        bool ok = true;
        for (std::size_t si = 0; si < csp.squares.size() && ok; ++si) {
            std::vector<std::pair<std::uint64_t, std::uint32_t>> cells;
            ok = detail::eval_square(csp, csp.squares[si], values, forced_local, &cells, scratch) ==
                 detail::square_status::satisfied;
        }
        if (ok) {
            outcome.verdict = search_verdict::satisfiable;
            for (std::size_t v = 0; v < csp.vars.size(); ++v)
                outcome.witness_entries.push_back(
                    {ag.rational_sets()[static_cast<std::size_t>(csp.vars[v].rational_index)],
                     literal::from_index(csp.vars[v].literal_index),
                     judgment_set(static_cast<std::uint32_t>(values[v]))});
            for (const auto& [key, bits] : forced_local)
                outcome.witness_entries.push_back(
                    {judgment_set(static_cast<std::uint32_t>(key >> 8)),
                     literal::from_index(static_cast<int>(key & 0xff)), judgment_set(bits)});
            outcome.witness = revision_operator::from_table(ag, outcome.witness_entries);
            return outcome;
        }

        std::size_t d = free_vars.size();
        while (d > 0) {
            --d;
            if (++pick[d] < domains[static_cast<std::size_t>(free_vars[d])].size()) break;
            pick[d] = 0;
            if (d == 0) {
                outcome.verdict = search_verdict::unsatisfiable;
                return outcome;
            }
        }
        if (free_vars.empty()) {
            outcome.verdict = search_verdict::unsatisfiable;
            return outcome;
        }
    }
}

// --- escape routes ----------------------------------------------------------

// Each relaxation of the operator requirements admits a commuting operator
// for a family of rules:
//   constant            drops successfulness; commutes with every rule
//   imposed:canonical   drops conservativeness; commutes with every
//                       unanimity-preserving rule
//   irrational:corrected drops rationality preservation; commutes with every
//                       propositionwise unanimity-preserving rule on its
//                       universal domain
struct escape_row {
    std::string rule_spec;
    std::string operator_spec;
    bool unanimity_preserving = false;
    bool propositionwise_up = false;
    bool claim_applies = false;
    std::uint64_t violations = 0;
    std::uint64_t vacuous = 0;
    std::uint64_t squares = 0;
    bool contradicts_claim = false;
    std::string note;
};

struct escape_report {
    int n = 0;
    std::vector<escape_row> rows;
    bool any_contradiction = false;
};

inline std::vector<std::string> default_escape_rules(int n) {
    std::vector<std::string> specs{"majority"};
    for (int m = 1; m <= n; ++m) specs.push_back("quota:" + std::to_string(m));
    specs.push_back("dictator:1");
    if (n >= 2) specs.push_back("oligarchy:1,2");
    return specs;
}

inline escape_report verify_escape_routes(const agenda& ag, int n,
                                          std::vector<std::string> rule_specs = {},
                                          dynamics_options options = {}) {
    if (rule_specs.empty()) rule_specs = default_escape_rules(n);
    escape_report report;
    report.n = n;

    struct escape_op {
        std::string spec;
        enum class gate { always, unanimity, propositionwise } applies;
    };
    const escape_op ops[] = {
        {"constant", escape_op::gate::always},
        {"imposed:canonical", escape_op::gate::unanimity},
        {"irrational:corrected", escape_op::gate::propositionwise},
    };

    check_options prop_options;
    prop_options.budget = options.budget;

    for (const auto& spec : rule_specs) {
        const aggregation_rule rule = aggregation_rule::parse(ag, n, spec);
        const bool up =
            check_rule_property(ag, rule, rule_property::unanimity_preservation, prop_options).holds;
        const bool pup = check_rule_property(ag, rule,
                                             rule_property::propositionwise_unanimity_preservation,
                                             prop_options)
                             .holds;
        for (const auto& op_spec : ops) {
            escape_row row;
            row.rule_spec = rule.spec();
            row.operator_spec = op_spec.spec;
            row.unanimity_preserving = up;
            row.propositionwise_up = pup;
            switch (op_spec.applies) {
                case escape_op::gate::always: row.claim_applies = true; break;
                case escape_op::gate::unanimity: row.claim_applies = up; break;
                case escape_op::gate::propositionwise:
                    row.claim_applies = pup && rule.universal_domain();
                    break;
            }
            try {
                const revision_operator op = revision_operator::parse(ag, op_spec.spec, tie_policy::none());
                dynamics_options scan = options;
                scan.max_witnesses = 1;
                const dynamic_report dyn = check_dynamic_rationality(ag, rule, op, scan);
                row.violations = dyn.violating;
                row.vacuous = dyn.vacuous;
                row.squares = dyn.squares_checked;
            } catch (const semantic_error& err) {
                row.claim_applies = false;
                row.note = err.what();
            }
            row.contradicts_claim = row.claim_applies && row.violations > 0;
            report.any_contradiction = report.any_contradiction || row.contradicts_claim;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace dynagg
