#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynagg/agenda.hpp"
#include "dynagg/errors.hpp"

namespace dynagg {

// A profile is one judgment set per individual, individuals indexed 0..n-1.
// Every operation below assumes n >= 2.
struct profile {
    std::vector<judgment_set> members;

    int size() const { return static_cast<int>(members.size()); }

    // Bit i set iff individual i accepts l.
    std::uint32_t support_mask(literal l) const {
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < members.size(); ++i)
            if (members[i].accepts(l)) m |= 1u << i;
        return m;
    }

    int support_count(literal l) const { return std::popcount(support_mask(l)); }

    friend bool operator==(const profile& a, const profile& b) { return a.members == b.members; }
    friend bool operator<(const profile& a, const profile& b) {
        return std::lexicographical_compare(a.members.begin(), a.members.end(),
                                            b.members.begin(), b.members.end());
    }
};

enum class rule_kind { majority, quota, oligarchy, dictator, constant, premise_based, table };

// Aggregation rule F: D -> 2^X with D either universal (all profiles of
// rational judgment sets) or an explicit profile list (table rules).
//
// Spec strings, n and agenda fixed up front:
//   majority | quota:m | oligarchy:i,j,... | dictator:i |
//   constant:<bitstring> | premise:i,j,...
// Indices are 1-based in specs, 0-based in the API. A constant bitstring of
// length k is a valuation string, of length 2k a bitpair string.
class aggregation_rule {
public:
    static aggregation_rule majority(int n) {
        aggregation_rule r(rule_kind::majority, n);
        r.spec_ = "majority";
        return r;
    }

    static aggregation_rule quota(int n, int m) {
        if (m < 1 || m > n)
            throw semantic_error("quota threshold must lie in 1.." + std::to_string(n) + ", got " +
                                 std::to_string(m));
        aggregation_rule r(rule_kind::quota, n);
        r.quota_ = m;
        r.spec_ = "quota:" + std::to_string(m);
        return r;
    }

    static aggregation_rule oligarchy(int n, std::vector<int> members) {
        validate_members(n, members, "oligarchy");
        aggregation_rule r(rule_kind::oligarchy, n);
        r.members_ = std::move(members);
        r.spec_ = "oligarchy:" + join_indices(r.members_);
        return r;
    }

    static aggregation_rule dictator(int n, int member) {
        validate_members(n, {member}, "dictator");
        aggregation_rule r(rule_kind::dictator, n);
        r.members_ = {member};
        r.spec_ = "dictator:" + std::to_string(member + 1);
        return r;
    }

    static aggregation_rule constant(const agenda& ag, int n, judgment_set output) {
        aggregation_rule r(rule_kind::constant, n);
        r.constant_ = output;
        auto val = ag.valuation_of(output);
        r.spec_ = "constant:" + (val ? ag.valuation_string(*val) : ag.bitpair_string(output));
        return r;
    }

    static aggregation_rule premise_based(const agenda& ag, int n, std::vector<int> premise_issues) {
        if (premise_issues.empty()) throw semantic_error("premise rule needs at least one premise issue");
        std::sort(premise_issues.begin(), premise_issues.end());
        for (std::size_t i = 0; i < premise_issues.size(); ++i) {
            if (premise_issues[i] < 0 || premise_issues[i] >= ag.issue_count())
                throw semantic_error("premise issue index out of range 1.." +
                                     std::to_string(ag.issue_count()));
            if (i > 0 && premise_issues[i] == premise_issues[i - 1])
                throw semantic_error("duplicate premise issue index");
        }
        aggregation_rule r(rule_kind::premise_based, n);
        r.premises_ = std::move(premise_issues);
        r.spec_ = "premise:" + join_indices(r.premises_);
        return r;
    }

    static aggregation_rule from_table(const agenda& ag, int n,
                                       std::vector<std::pair<profile, judgment_set>> rows) {
        if (rows.empty()) throw semantic_error("table rule needs a nonempty domain");
        aggregation_rule r(rule_kind::table, n);
        for (auto& [pr, out] : rows) {
            if (pr.size() != n) throw semantic_error("table rule profile has wrong size");
            for (judgment_set j : pr.members)
                if (!ag.is_rational(j))
                    throw semantic_error("table rule domain contains an irrational judgment set");
            auto [it, inserted] = r.table_.emplace(pr, out);
            if (!inserted && it->second != out)
                throw semantic_error("table rule maps one profile to two outputs");
        }
        r.spec_ = "table";
        return r;
    }

    static aggregation_rule parse(const agenda& ag, int n, std::string_view spec) {
        const auto colon = spec.find(':');
        const std::string head(spec.substr(0, colon));
        const std::string args(colon == std::string_view::npos ? "" : spec.substr(colon + 1));
        if (head == "majority") {
            if (!args.empty()) throw parse_error("rule 'majority' takes no arguments");
            return majority(n);
        }
        if (head == "quota") return quota(n, parse_int(args, "quota threshold"));
        if (head == "oligarchy") {
            auto ix = parse_index_list(args, "oligarchy members");
            for (int& i : ix) --i;
            return oligarchy(n, std::move(ix));
        }
        if (head == "dictator") return dictator(n, parse_int(args, "dictator index") - 1);
        if (head == "constant") return constant(ag, n, parse_bitstring(ag, args));
        if (head == "premise") {
            auto ix = parse_index_list(args, "premise issues");
            for (int& i : ix) --i;
            return premise_based(ag, n, std::move(ix));
        }
        throw parse_error("unknown aggregation rule '" + std::string(spec) +
                          "' (expected majority, quota:m, oligarchy:i,j, dictator:i, "
                          "constant:<bitstring> or premise:i,j)");
    }

    rule_kind kind() const { return kind_; }
    int n() const { return n_; }
    const std::string& spec() const { return spec_; }
    bool universal_domain() const { return kind_ != rule_kind::table; }
    int quota_threshold() const { return quota_; }
    const std::vector<int>& members() const { return members_; }
    const std::vector<int>& premise_issues() const { return premises_; }

    const std::map<profile, judgment_set>& table() const { return table_; }

    bool in_domain(const agenda& ag, const profile& pr) const {
        if (pr.size() != n_) return false;
        if (kind_ == rule_kind::table) return table_.find(pr) != table_.end();
        for (judgment_set j : pr.members)
            if (!ag.is_rational(j)) return false;
        return true;
    }

    judgment_set apply(const agenda& ag, const profile& pr) const {
        if (!in_domain(ag, pr))
            throw semantic_error("profile lies outside the domain of rule '" + spec_ + "'");
        switch (kind_) {
            case rule_kind::majority: return threshold_output(pr, n_ / 2 + 1);
            case rule_kind::quota: return threshold_output(pr, quota_);
            case rule_kind::oligarchy:
            case rule_kind::dictator: {
                judgment_set out(0xffffffffu);
                for (int i : members_) out = out.intersect(pr.members[static_cast<std::size_t>(i)]);
                return out;
            }
            case rule_kind::constant: return constant_;
            case rule_kind::premise_based: return premise_output(ag, pr);
            case rule_kind::table: return table_.find(pr)->second;
        }
        return {};
    }

private:
    aggregation_rule(rule_kind k, int n) : kind_(k), n_(n) {
        if (n < 2) throw semantic_error("aggregation needs at least 2 individuals");
    }

    judgment_set threshold_output(const profile& pr, int threshold) const {
        judgment_set out;
        for (int i = 0; i < static_cast<int>(sizeof(std::uint32_t) * 8); ++i) {
            literal l = literal::from_index(i);
            if (l.issue >= 16) break;
            if (pr.support_count(l) >= threshold) out.add(l);
        }
        return out;
    }

    judgment_set premise_output(const agenda& ag, const profile& pr) const {
        // 1. strict majority on each premise issue
        judgment_set premise_part;
        std::vector<bool> decided(static_cast<std::size_t>(ag.issue_count()), false);
        for (int i : premises_) {
            const int pos = pr.support_count({i, false});
            if (2 * pos > n_) {
                premise_part.add({i, false});
                decided[static_cast<std::size_t>(i)] = true;
            } else if (2 * (n_ - pos) > n_) {
                premise_part.add({i, true});
                decided[static_cast<std::size_t>(i)] = true;
            }
        }
        // 2. admissible valuations compatible with the accepted premises
        std::vector<std::uint32_t> filtered;
        for (std::uint32_t v : ag.valuations())
            if (premise_part.subset_of(ag.polar_set(v))) filtered.push_back(v);

        // 3. entailed issues from the filter; everything else by issue majority
        judgment_set out = premise_part;
        for (int i = 0; i < ag.issue_count(); ++i) {
            if (decided[static_cast<std::size_t>(i)]) continue;
            if (!filtered.empty()) {
                bool all_true = true, all_false = true;
                for (std::uint32_t v : filtered) {
                    if ((v >> i) & 1u)
                        all_false = false;
                    else
                        all_true = false;
                }
                if (all_true) {
                    out.add({i, false});
                    continue;
                }
                if (all_false) {
                    out.add({i, true});
                    continue;
                }
            }
            const int pos = pr.support_count({i, false});
            if (2 * pos > n_)
                out.add({i, false});
            else if (2 * (n_ - pos) > n_)
                out.add({i, true});
        }
        return out;
    }

    static void validate_members(int n, const std::vector<int>& members, const char* what) {
        if (members.empty())
            throw semantic_error(std::string(what) + " needs at least one member");
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (members[i] < 0 || members[i] >= n)
                throw semantic_error(std::string(what) + " member index out of range 1.." +
                                     std::to_string(n));
            for (std::size_t j = i + 1; j < members.size(); ++j)
                if (members[i] == members[j])
                    throw semantic_error(std::string(what) + " member indices must be distinct");
        }
    }

    static std::string join_indices(const std::vector<int>& zero_based) {
        std::string out;
        for (std::size_t i = 0; i < zero_based.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(zero_based[i] + 1);
        }
        return out;
    }

    static int parse_int(const std::string& text, const char* what) {
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
            throw parse_error(std::string("expected an integer for ") + what + ", got '" + text + "'");
        if (text.size() > 6) throw parse_error(std::string(what) + " out of range: '" + text + "'");
        return std::stoi(text);
    }

    static std::vector<int> parse_index_list(const std::string& text, const char* what) {
        if (text.empty()) throw parse_error(std::string("expected indices for ") + what);
        std::vector<int> out;
        std::size_t start = 0;
        while (start <= text.size()) {
            const std::size_t comma = text.find(',', start);
            const std::string part =
                text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            out.push_back(parse_int(part, what));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    static judgment_set parse_bitstring(const agenda& ag, const std::string& text) {
        const std::size_t k = static_cast<std::size_t>(ag.issue_count());
        if (text.find_first_not_of("01") != std::string::npos || text.empty())
            throw parse_error("constant rule expects a 0/1 bitstring, got '" + text + "'");
        if (text.size() == k) {
            std::uint32_t mask = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (text[i] == '1') mask |= 1u << i;
            return ag.polar_set(mask);
        }
        if (text.size() == 2 * k) {
            std::uint32_t bits = 0;
            for (std::size_t j = 0; j < 2 * k; ++j)
                if (text[j] == '1') bits |= 1u << j;
            return judgment_set(bits);
        }
        throw parse_error("constant bitstring must have length " + std::to_string(k) +
                          " (valuation) or " + std::to_string(2 * k) + " (bitpair), got " +
                          std::to_string(text.size()));
    }

    rule_kind kind_;
    int n_;
    int quota_ = 0;
    std::vector<int> members_;
    judgment_set constant_;
    std::vector<int> premises_;
    std::map<profile, judgment_set> table_;
    std::string spec_;
};

// --- domain enumeration -----------------------------------------------------

inline std::uint64_t domain_size(const agenda& ag, const aggregation_rule& rule,
                                 std::uint64_t budget) {
    if (!rule.universal_domain()) return rule.table().size();
    std::uint64_t size = 1;
    for (int i = 0; i < rule.n(); ++i) {
        size *= ag.rational_sets().size();
        if (size > budget)
            throw resource_limit_error("profile space |J|^n exceeds the budget of " +
                                       std::to_string(budget));
    }
    return size;
}

// Visits the rule's domain in canonical order: table domains in stored order
// (profiles sort lexicographically), universal domains as odometer tuples over
// rational_sets() with individual 0 most significant.
template <typename Fn>
void for_each_domain_profile(const agenda& ag, const aggregation_rule& rule, Fn&& fn) {
    if (!rule.universal_domain()) {
        for (const auto& [pr, out] : rule.table()) fn(pr);
        return;
    }
    const auto& rs = ag.rational_sets();
    const int n = rule.n();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    profile pr;
    pr.members.assign(static_cast<std::size_t>(n), rs[0]);
    while (true) {
        fn(static_cast<const profile&>(pr));
        int d = n - 1;
        for (; d >= 0; --d) {
            auto ud = static_cast<std::size_t>(d);
            if (++idx[ud] < rs.size()) {
                pr.members[ud] = rs[idx[ud]];
                break;
            }
            idx[ud] = 0;
            pr.members[ud] = rs[0];
        }
        if (d < 0) break;
    }
}

// --- property checks ---------------------------------------------------------

enum class rule_property {
    non_imposition,
    monotonicity,
    systematicity,
    non_oligarchy,
    unanimity_preservation,
    propositionwise_unanimity_preservation,
    static_rationality,
};

inline std::string to_string(rule_property p) {
    switch (p) {
        case rule_property::non_imposition: return "non-imposition";
        case rule_property::monotonicity: return "monotonicity";
        case rule_property::systematicity: return "systematicity";
        case rule_property::non_oligarchy: return "non-oligarchy";
        case rule_property::unanimity_preservation: return "unanimity-preservation";
        case rule_property::propositionwise_unanimity_preservation:
            return "propositionwise-unanimity-preservation";
        case rule_property::static_rationality: return "static-rationality";
    }
    return "?";
}

inline std::optional<rule_property> rule_property_from_string(std::string_view raw) {
    std::string name(raw);
    for (char& c : name)
        if (c == '_') c = '-';
    if (name == "non-imposition") return rule_property::non_imposition;
    if (name == "monotonicity") return rule_property::monotonicity;
    if (name == "systematicity") return rule_property::systematicity;
    if (name == "non-oligarchy") return rule_property::non_oligarchy;
    if (name == "unanimity-preservation" || name == "unanimity")
        return rule_property::unanimity_preservation;
    if (name == "propositionwise-unanimity-preservation" || name == "pup")
        return rule_property::propositionwise_unanimity_preservation;
    if (name == "static-rationality") return rule_property::static_rationality;
    return std::nullopt;
}

struct rule_witness {
    std::vector<profile> profiles;
    std::vector<literal> props;
    std::vector<judgment_set> outputs;
    std::string note;
};

struct property_report {
    std::string property;
    bool holds = false;
    std::uint64_t cases_examined = 0;
    std::uint64_t witnesses_total = 0;
    std::size_t witness_cap = 0;
    std::vector<rule_witness> witnesses; // first witnesses in enumeration order
    std::string note;
};

struct check_options {
    std::uint64_t budget = 10'000'000;
    std::size_t max_witnesses = 100;
};

namespace detail {

inline void push_witness(property_report& report, rule_witness w) {
    ++report.witnesses_total;
    if (report.witnesses.size() < report.witness_cap) report.witnesses.push_back(std::move(w));
}

inline profile uniform_profile(judgment_set j, int n) {
    profile pr;
    pr.members.assign(static_cast<std::size_t>(n), j);
    return pr;
}

} // namespace detail

inline property_report check_rule_property(const agenda& ag, const aggregation_rule& rule,
                                           rule_property prop, check_options options = {}) {
    domain_size(ag, rule, options.budget); // budget gate
    property_report report;
    report.property = std::string(to_string(prop));
    report.witness_cap = options.max_witnesses;
    report.holds = true;

    const int n = rule.n();
    const int nlit = ag.literal_count();

    switch (prop) {
        case rule_property::non_imposition: {
            // holds iff F is not constant on its domain
            std::optional<profile> first;
            judgment_set first_out;
            bool differs = false;
            for_each_domain_profile(ag, rule, [&](const profile& pr) {
                if (differs) return;
                ++report.cases_examined;
                judgment_set out = rule.apply(ag, pr);
                if (!first) {
                    first = pr;
                    first_out = out;
                } else if (out != first_out) {
                    differs = true;
                    detail::push_witness(report, {{*first, pr}, {}, {first_out, out},
                                                  "two profiles with different outputs"});
                }
            });
            report.holds = differs;
            if (!differs && first)
                detail::push_witness(report, {{*first}, {}, {first_out},
                                              "every profile in the domain maps to this output"});
            break;
        }

        case rule_property::monotonicity: {
            // one individual switching to a rational set accepting p never
            // reverses collective acceptance of p
            const auto& rs = ag.rational_sets();
            for_each_domain_profile(ag, rule, [&](const profile& pr) {
                for (int j = 0; j < nlit; ++j) {
                    const literal p = literal::from_index(j);
                    const judgment_set out = rule.apply(ag, pr);
                    if (!out.accepts(p)) continue;
                    for (int i = 0; i < n; ++i) {
                        if (pr.members[static_cast<std::size_t>(i)].accepts(p)) continue;
                        for (judgment_set replacement : rs) {
                            if (!replacement.accepts(p)) continue;
                            profile modified = pr;
                            modified.members[static_cast<std::size_t>(i)] = replacement;
                            if (!rule.in_domain(ag, modified)) continue;
                            ++report.cases_examined;
                            judgment_set out2 = rule.apply(ag, modified);
                            if (!out2.accepts(p)) {
                                report.holds = false;
                                detail::push_witness(
                                    report, {{pr, modified}, {p}, {out, out2},
                                             "individual " + std::to_string(i + 1) +
                                                 " switches to accepting the proposition"});
                            }
                        }
                    }
                }
            });
            break;
        }

        case rule_property::systematicity: {
            // acceptance must be a function of the support coalition alone
            struct exemplar {
                profile pr;
                literal prop;
                bool accepted;
            };
            std::map<std::uint32_t, exemplar> table;
            for_each_domain_profile(ag, rule, [&](const profile& pr) {
                const judgment_set out = rule.apply(ag, pr);
                for (int j = 0; j < nlit; ++j) {
                    const literal p = literal::from_index(j);
                    ++report.cases_examined;
                    const std::uint32_t coalition = pr.support_mask(p);
                    const bool accepted = out.accepts(p);
                    auto it = table.find(coalition);
                    if (it == table.end()) {
                        table.emplace(coalition, exemplar{pr, p, accepted});
                    } else if (it->second.accepted != accepted) {
                        report.holds = false;
                        detail::push_witness(
                            report,
                            {{it->second.pr, pr},
                             {it->second.prop, p},
                             {rule.apply(ag, it->second.pr), out},
                             "same support coalition, different acceptance"});
                    }
                }
            });
            break;
        }

        case rule_property::non_oligarchy: {
            // violated iff F equals intersection over some nonempty coalition M
            for (std::uint32_t m = 1; m < (1u << n); ++m) {
                bool matches = true;
                for_each_domain_profile(ag, rule, [&](const profile& pr) {
                    if (!matches) return;
                    ++report.cases_examined;
                    judgment_set inter(0xffffffffu);
                    for (int i = 0; i < n; ++i)
                        if ((m >> i) & 1u) inter = inter.intersect(pr.members[static_cast<std::size_t>(i)]);
                    if (rule.apply(ag, pr) != inter) matches = false;
                });
                if (matches) {
                    report.holds = false;
                    std::string note = "oligarchy M = {";
                    bool sep = false;
                    for (int i = 0; i < n; ++i)
                        if ((m >> i) & 1u) {
                            if (sep) note += ",";
                            note += std::to_string(i + 1);
                            sep = true;
                        }
                    note += "}";
                    detail::push_witness(report, {{}, {}, {}, note});
                }
            }
            break;
        }

        case rule_property::unanimity_preservation: {
            for (judgment_set j : ag.rational_sets()) {
                profile pr = detail::uniform_profile(j, n);
                if (!rule.in_domain(ag, pr)) continue;
                ++report.cases_examined;
                judgment_set out = rule.apply(ag, pr);
                if (out != j) {
                    report.holds = false;
                    detail::push_witness(report, {{pr}, {}, {out}, "unanimous profile not returned"});
                }
            }
            break;
        }

        case rule_property::propositionwise_unanimity_preservation: {
            const std::uint32_t everyone = (1u << n) - 1u;
            for_each_domain_profile(ag, rule, [&](const profile& pr) {
                std::optional<judgment_set> out;
                for (int j = 0; j < nlit; ++j) {
                    const literal p = literal::from_index(j);
                    if (pr.support_mask(p) != everyone) continue;
                    ++report.cases_examined;
                    if (!out) out = rule.apply(ag, pr);
                    if (!out->accepts(p)) {
                        report.holds = false;
                        detail::push_witness(report,
                                             {{pr}, {p}, {*out}, "unanimous proposition rejected"});
                    }
                }
            });
            break;
        }

        case rule_property::static_rationality: {
            for_each_domain_profile(ag, rule, [&](const profile& pr) {
                ++report.cases_examined;
                judgment_set out = rule.apply(ag, pr);
                judgment_status st = ag.status(out);
                if (!st.rational) {
                    report.holds = false;
                    std::string why = !st.complete ? "incomplete" : "inconsistent";
                    if (!st.complete && !st.consistent) why = "incomplete and inconsistent";
                    detail::push_witness(report, {{pr}, {}, {out}, "collective output " + why});
                }
            });
            break;
        }
    }
    return report;
}

// The five conditions under which no regular rationality-preserving operator
// makes a rule dynamically rational on a non-simple agenda: universal domain,
// non-imposition, monotonicity, non-oligarchy, systematicity. Reported
// individually plus as a conjunction. Universal domain is structural; the
// rest are enumerated.
struct five_condition_report {
    std::vector<property_report> conditions;
    bool all_hold = false;
};

inline five_condition_report check_five_conditions(const agenda& ag, const aggregation_rule& rule,
                                                   check_options options = {}) {
    five_condition_report out;

    property_report ud;
    ud.property = "universal-domain";
    ud.holds = rule.universal_domain();
    ud.witness_cap = options.max_witnesses;
    ud.note = ud.holds ? "rule is defined on all profiles of rational judgment sets"
                       : "rule restricts its domain to an explicit profile list";
    out.conditions.push_back(std::move(ud));

    out.conditions.push_back(
        check_rule_property(ag, rule, rule_property::non_imposition, options));
    out.conditions.push_back(check_rule_property(ag, rule, rule_property::monotonicity, options));
    out.conditions.push_back(check_rule_property(ag, rule, rule_property::non_oligarchy, options));
    out.conditions.push_back(check_rule_property(ag, rule, rule_property::systematicity, options));

    out.all_hold = true;
    for (const auto& c : out.conditions) out.all_hold = out.all_hold && c.holds;
    return out;
}

} // namespace dynagg
