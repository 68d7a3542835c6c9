#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynagg/agenda.hpp"
#include "dynagg/aggregation.hpp"
#include "dynagg/errors.hpp"

namespace dynagg {

// Revision operators |: 2^X x X -> 2^X. Properties of interest:
//   successful              p is in J|p
//   conservative            p in J implies J|p = J
//   regular                 successful and conservative
//   rationality-preserving  J rational and p non-contradictory imply J|p rational

// Tie policy for minimal-change revision: among nearest rational sets
// containing the learnt proposition, prefer candidates that keep the prior
// stance on protected issues, earlier entries weighing more; remaining ties
// resolve in canonical order.
struct tie_policy {
    std::vector<int> protected_issues; // priority order

    static tie_policy none() { return {}; }

    // All issues except the last, declaration order.
    static tie_policy protect_premises(const agenda& ag) {
        tie_policy t;
        for (int i = 0; i + 1 < ag.issue_count(); ++i) t.protected_issues.push_back(i);
        return t;
    }

    // The last issue only.
    static tie_policy protect_conclusion(const agenda& ag) {
        return {{ag.issue_count() - 1}};
    }
};

enum class op_kind { hamming, constant, imposed, irrationalizing, table };
enum class irrationalizing_variant { corrected, printed };

struct revision_entry {
    judgment_set before;
    literal learnt;
    judgment_set after;
};

class revision_operator {
public:
    static revision_operator hamming(const agenda& ag, tie_policy policy) {
        for (int t : policy.protected_issues)
            if (t < 0 || t >= ag.issue_count())
                throw semantic_error("protected issue index out of range");
        revision_operator op(op_kind::hamming);
        op.tie_ = std::move(policy);
        if (op.tie_.protected_issues.empty()) {
            op.spec_ = "hamming";
        } else {
            op.spec_ = "hamming:protect=";
            for (std::size_t i = 0; i < op.tie_.protected_issues.size(); ++i) {
                if (i) op.spec_ += ',';
                op.spec_ += ag.issues()[static_cast<std::size_t>(op.tie_.protected_issues[i])];
            }
        }
        return op;
    }

    static revision_operator constant() {
        revision_operator op(op_kind::constant);
        op.spec_ = "constant";
        return op;
    }

    // J|p = J_p for a fixed rational target per literal; canonical variant
    // picks the first rational set containing p. Fails on contradictory
    // literals, which no rational set can absorb.
    static revision_operator imposed_canonical(const agenda& ag) {
        std::map<int, judgment_set> map;
        for (int j = 0; j < ag.literal_count(); ++j) {
            const literal p = literal::from_index(j);
            auto target = first_rational_with(ag, p);
            if (!target)
                throw semantic_error("imposed:canonical undefined: no rational judgment set contains " +
                                     ag.literal_name(p));
            map.emplace(j, *target);
        }
        return imposed(ag, std::move(map), "imposed:canonical");
    }

    // Explicit target map; must be total over literals and successful (p in J_p).
    static revision_operator imposed(const agenda& ag, std::map<int, judgment_set> map,
                                     std::string spec_label = "imposed") {
        for (int j = 0; j < ag.literal_count(); ++j) {
            const literal p = literal::from_index(j);
            auto it = map.find(j);
            if (it == map.end())
                throw semantic_error("imposed map missing an entry for " + ag.literal_name(p));
            if (!it->second.accepts(p))
                throw semantic_error("imposed target for " + ag.literal_name(p) +
                                     " does not contain it");
        }
        revision_operator op(op_kind::imposed);
        op.imposed_ = std::move(map);
        op.spec_ = std::move(spec_label);
        return op;
    }

    // corrected: identity when p in J, otherwise a fixed irrational set
    //            containing p (successful + conservative, not preserving)
    // printed:   identity when p not in J, otherwise the irrational set
    //            (kept for comparison; satisfies neither)
    static revision_operator irrationalizing(const agenda& ag, irrationalizing_variant variant) {
        revision_operator op(op_kind::irrationalizing);
        op.variant_ = variant;
        for (int j = 0; j < ag.literal_count(); ++j) {
            const literal p = literal::from_index(j);
            judgment_set base = first_rational_with(ag, p).value_or(judgment_set());
            base.add(p).add(p.negated()); // p and its negation: irrational by construction
            op.irrational_.emplace(j, base);
        }
        op.spec_ = variant == irrationalizing_variant::corrected ? "irrational:corrected"
                                                                 : "irrational:printed";
        return op;
    }

    // Explicit entries override; unlisted pairs fall back to defaults that are
    // successful, conservative and rationality-preserving: keep J when p in J,
    // else jump to the first rational set containing p, else adjoin p.
    static revision_operator from_table(const agenda& ag, std::vector<revision_entry> entries) {
        revision_operator op(op_kind::table);
        for (const auto& e : entries) {
            if (e.learnt.index() < 0 || e.learnt.index() >= ag.literal_count())
                throw semantic_error("revision table entry names a literal outside the agenda");
            auto key = std::make_pair(e.before.bits(), e.learnt.index());
            auto [it, inserted] = op.table_.emplace(key, e.after);
            if (!inserted && it->second != e.after)
                throw semantic_error("revision table maps one (J, p) pair to two results");
        }
        op.spec_ = "table";
        return op;
    }

    // Spec grammar: hamming | hamming:protect=<labels|premises|conclusion> |
    // constant | imposed:canonical | irrational[:corrected|:printed].
    // Imposed map files are resolved by the I/O layer before reaching here.
    static revision_operator parse(const agenda& ag, std::string_view spec,
                                   const tie_policy& bare_hamming_policy) {
        const auto colon = spec.find(':');
        const std::string head(spec.substr(0, colon));
        const std::string args(colon == std::string_view::npos ? "" : spec.substr(colon + 1));
        if (head == "hamming") {
            if (colon == std::string_view::npos) return hamming(ag, bare_hamming_policy);
            if (args.rfind("protect=", 0) != 0)
                throw parse_error("hamming takes 'protect=<issue list>', got '" + args + "'");
            return hamming(ag, parse_protect_list(ag, args.substr(8)));
        }
        if (head == "constant") {
            if (!args.empty()) throw parse_error("operator 'constant' takes no arguments");
            return constant();
        }
        if (head == "imposed") {
            if (args == "canonical") return imposed_canonical(ag);
            throw parse_error("imposed expects ':canonical' or a map file resolved by the caller, got '" +
                              args + "'");
        }
        if (head == "irrational") {
            if (args.empty() || args == "corrected")
                return irrationalizing(ag, irrationalizing_variant::corrected);
            if (args == "printed") return irrationalizing(ag, irrationalizing_variant::printed);
            throw parse_error("irrational expects ':corrected' or ':printed', got '" + args + "'");
        }
        throw parse_error("unknown revision operator '" + std::string(spec) +
                          "' (expected hamming[:protect=...], constant, imposed:..., irrational:...)");
    }

    op_kind kind() const { return kind_; }
    const std::string& spec() const { return spec_; }
    const tie_policy& policy() const { return tie_; }

    // Defined for every (J, p) except minimal-change revision by a proposition
    // no rational set contains.
    std::optional<judgment_set> try_revise(const agenda& ag, judgment_set j, literal p) const {
        switch (kind_) {
            case op_kind::constant:
                return j;
            case op_kind::imposed:
                return imposed_.find(p.index())->second;
            case op_kind::irrationalizing: {
                const bool identity = (variant_ == irrationalizing_variant::corrected)
                                          ? j.accepts(p)
                                          : !j.accepts(p);
                return identity ? j : irrational_.find(p.index())->second;
            }
            case op_kind::table: {
                auto it = table_.find(std::make_pair(j.bits(), p.index()));
                if (it != table_.end()) return it->second;
                if (j.accepts(p)) return j;
                if (auto target = first_rational_with(ag, p)) return *target;
                return judgment_set(j).add(p);
            }
            case op_kind::hamming:
                break;
        }
        // minimal change: nothing to do if p already held
        if (j.accepts(p)) return j;
        std::optional<judgment_set> best;
        for (judgment_set candidate : ag.rational_sets()) {
            if (!candidate.accepts(p)) continue;
            if (!best || closer(j, candidate, *best)) best = candidate;
        }
        return best;
    }

    judgment_set revise(const agenda& ag, judgment_set j, literal p) const {
        auto out = try_revise(ag, j, p);
        if (!out)
            throw semantic_error("revision by " + ag.literal_name(p) +
                                 " undefined: no rational judgment set contains it");
        return *out;
    }

private:
    explicit revision_operator(op_kind k) : kind_(k) {}

    static std::optional<judgment_set> first_rational_with(const agenda& ag, literal p) {
        for (judgment_set r : ag.rational_sets())
            if (r.accepts(p)) return r;
        return std::nullopt;
    }

    static tie_policy parse_protect_list(const agenda& ag, const std::string& list) {
        if (list.empty()) return tie_policy::none();
        if (list == "premises") return tie_policy::protect_premises(ag);
        if (list == "conclusion") return tie_policy::protect_conclusion(ag);
        tie_policy out;
        std::size_t start = 0;
        while (start <= list.size()) {
            const std::size_t comma = list.find(',', start);
            const std::string label =
                list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            int issue = -1;
            for (int i = 0; i < ag.issue_count(); ++i)
                if (ag.issues()[static_cast<std::size_t>(i)] == label) issue = i;
            if (issue < 0)
                throw semantic_error("unknown issue label '" + label + "' in protect list");
            out.protected_issues.push_back(issue);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    // True if a beats b as a revision of j: smaller symmetric difference,
    // then fewer protected-issue changes in priority order, then canonical.
    bool closer(judgment_set j, judgment_set a, judgment_set b) const {
        const int da = j.symmetric_difference_size(a);
        const int db = j.symmetric_difference_size(b);
        if (da != db) return da < db;
        for (int t : tie_.protected_issues) {
            const std::uint32_t pair_mask = 3u << (2 * t);
            const bool a_changes = ((j.bits() ^ a.bits()) & pair_mask) != 0;
            const bool b_changes = ((j.bits() ^ b.bits()) & pair_mask) != 0;
            if (a_changes != b_changes) return b_changes;
        }
        return a < b;
    }

    op_kind kind_;
    tie_policy tie_;
    irrationalizing_variant variant_ = irrationalizing_variant::corrected;
    std::map<int, judgment_set> imposed_;
    std::map<int, judgment_set> irrational_;
    std::map<std::pair<std::uint32_t, int>, judgment_set> table_;
    std::string spec_;
};

// --- operator property checks ------------------------------------------------

enum class op_check { successful, conservative, regular, rationality_preserving };

inline std::string to_string(op_check c) {
    switch (c) {
        case op_check::successful: return "successful";
        case op_check::conservative: return "conservative";
        case op_check::regular: return "regular";
        case op_check::rationality_preserving: return "rationality-preserving";
    }
    return "?";
}

inline std::optional<op_check> op_check_from_string(std::string_view raw) {
    std::string name(raw);
    for (char& c : name)
        if (c == '_') c = '-';
    if (name == "successful") return op_check::successful;
    if (name == "conservative") return op_check::conservative;
    if (name == "regular") return op_check::regular;
    if (name == "rationality-preserving" || name == "rational")
        return op_check::rationality_preserving;
    return std::nullopt;
}

struct op_witness {
    judgment_set before;
    literal learnt;
    std::optional<judgment_set> after; // empty when the revision is undefined
    std::string note;
};

struct op_property_report {
    std::string property;
    bool holds = false;
    std::uint64_t cases_examined = 0;
    std::uint64_t witnesses_total = 0;
    std::size_t witness_cap = 0;
    std::vector<op_witness> witnesses;
};

// Full quantification over 2^(2k) judgment sets and 2k learnt literals.
inline op_property_report check_operator_property(const agenda& ag, const revision_operator& op,
                                                  op_check property, check_options options = {}) {
    const int nlit = ag.literal_count();
    if (nlit > 20)
        throw resource_limit_error("operator property checks support at most 20 literals, got " +
                                   std::to_string(nlit));
    const std::uint64_t pairs = (1ull << nlit) * static_cast<std::uint64_t>(nlit);
    if (pairs > options.budget)
        throw resource_limit_error("operator check over " + std::to_string(pairs) +
                                   " pairs exceeds the budget of " + std::to_string(options.budget));

    op_property_report report;
    report.property = std::string(to_string(property));
    report.witness_cap = options.max_witnesses;
    report.holds = true;

    auto add_witness = [&](op_witness w) {
        report.holds = false;
        ++report.witnesses_total;
        if (report.witnesses.size() < report.witness_cap) report.witnesses.push_back(std::move(w));
    };

    const bool want_successful =
        property == op_check::successful || property == op_check::regular;
    const bool want_conservative =
        property == op_check::conservative || property == op_check::regular;
    const bool want_preserving = property == op_check::rationality_preserving;

    for (std::uint64_t bits = 0; bits < (1ull << nlit); ++bits) {
        const judgment_set j(static_cast<std::uint32_t>(bits));
        for (int ix = 0; ix < nlit; ++ix) {
            const literal p = literal::from_index(ix);
            if (want_successful) {
                ++report.cases_examined;
                auto out = op.try_revise(ag, j, p);
                if (!out)
                    add_witness({j, p, std::nullopt, "revision undefined"});
                else if (!out->accepts(p))
                    add_witness({j, p, out, "learnt proposition not accepted"});
            }
            if (want_conservative && j.accepts(p)) {
                ++report.cases_examined;
                auto out = op.try_revise(ag, j, p);
                if (!out || *out != j)
                    add_witness({j, p, out, "already-accepted proposition changed the set"});
            }
            if (want_preserving && ag.is_rational(j) &&
                ag.classify(p) != proposition_status::contradictory) {
                ++report.cases_examined;
                auto out = op.try_revise(ag, j, p);
                if (!out || !ag.is_rational(*out))
                    add_witness({j, p, out, "rational set revised to an irrational one"});
            }
        }
    }
    return report;
}

} // namespace dynagg
