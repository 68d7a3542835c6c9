#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynagg/errors.hpp"
#include "dynagg/formula.hpp"

namespace dynagg {

// An agenda is a finite set of yes/no issues. Each issue contributes a
// proposition-negation pair of literals, so an agenda with k issues has 2k
// literals. Consistency is defined by a set of admissible valuations: a set of
// literals is consistent iff some admissible valuation accepts every literal
// in it. This keeps consistency well behaved by construction:
//   (i)   a literal and its negation are never jointly consistent,
//   (ii)  subsets of consistent sets are consistent,
//   (iii) the empty set is consistent and every consistent set extends to a
//         complete consistent one.
//
// Representations, fixed across the library:
//   issue index      0..k-1 in declaration order
//   literal index    2*issue for the positive literal, 2*issue+1 for the negation
//   judgment set     bitmask over literal indices (judgment_set)
//   valuation        bitmask over issue indices, bit i = issue i accepted
//   valuation string k characters, char i = '1' iff issue i accepted
//   bitpair string   2k characters, char j = '1' iff literal j accepted

struct literal {
    int issue = 0;
    bool negative = false;

    int index() const { return issue * 2 + (negative ? 1 : 0); }
    literal negated() const { return {issue, !negative}; }

    static literal from_index(int ix) { return {ix / 2, (ix & 1) != 0}; }

    friend bool operator==(const literal& a, const literal& b) {
        return a.issue == b.issue && a.negative == b.negative;
    }
    friend bool operator!=(const literal& a, const literal& b) { return !(a == b); }
    friend bool operator<(const literal& a, const literal& b) { return a.index() < b.index(); }
};

class judgment_set {
public:
    judgment_set() = default;
    explicit judgment_set(std::uint32_t bits) : bits_(bits) {}

    std::uint32_t bits() const { return bits_; }
    bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }

    bool accepts(literal l) const { return (bits_ >> l.index()) & 1u; }
    bool accepts_index(int literal_index) const { return (bits_ >> literal_index) & 1u; }

    judgment_set& add(literal l) {
        bits_ |= 1u << l.index();
        return *this;
    }
    judgment_set& remove(literal l) {
        bits_ &= ~(1u << l.index());
        return *this;
    }

    bool subset_of(judgment_set other) const { return (bits_ & ~other.bits_) == 0; }

    judgment_set intersect(judgment_set other) const { return judgment_set(bits_ & other.bits_); }
    judgment_set unite(judgment_set other) const { return judgment_set(bits_ | other.bits_); }

    int symmetric_difference_size(judgment_set other) const {
        return std::popcount(bits_ ^ other.bits_);
    }

    friend bool operator==(judgment_set a, judgment_set b) { return a.bits_ == b.bits_; }
    friend bool operator!=(judgment_set a, judgment_set b) { return a.bits_ != b.bits_; }

    // Canonical order: lexicographic on the bitpair string. The first literal
    // index where the sets differ decides; the set missing it comes first.
    friend bool operator<(judgment_set a, judgment_set b) {
        std::uint32_t diff = a.bits_ ^ b.bits_;
        if (diff == 0) return false;
        int j = std::countr_zero(diff);
        return ((a.bits_ >> j) & 1u) == 0;
    }

private:
    std::uint32_t bits_ = 0;
};

enum class proposition_status { contradictory, contingent, tautological };

struct judgment_status {
    bool complete = false;
    bool consistent = false;
    bool rational = false; // complete && consistent
};

namespace detail {

// Same shape as the judgment_set order: lexicographic on the valuation string.
inline bool valuation_less(std::uint32_t a, std::uint32_t b) {
    std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    int i = std::countr_zero(diff);
    return ((a >> i) & 1u) == 0;
}

} // namespace detail

class agenda {
public:
    static constexpr int max_issues = 16;

    // Valuation masks are deduplicated and put into canonical (valuation
    // string) order. Labels must be nonempty and pairwise distinct.
    agenda(std::vector<std::string> issue_labels, std::vector<std::uint32_t> valuation_masks)
        : issues_(std::move(issue_labels)), valuations_(std::move(valuation_masks)) {
        const int k = static_cast<int>(issues_.size());
        if (k == 0) throw semantic_error("agenda needs at least one issue");
        if (k > max_issues)
            throw semantic_error("agenda supports at most " + std::to_string(max_issues) +
                                 " issues, got " + std::to_string(k));
        for (int i = 0; i < k; ++i) {
            if (issues_[i].empty()) throw semantic_error("issue labels must be nonempty");
            for (int j = i + 1; j < k; ++j)
                if (issues_[i] == issues_[j])
                    throw semantic_error("duplicate issue label '" + issues_[i] + "'");
        }
        if (valuations_.empty())
            throw semantic_error("agenda needs at least one admissible valuation");
        const std::uint32_t mask_limit = (k == 32) ? 0xffffffffu : ((1u << k) - 1u);
        for (std::uint32_t v : valuations_)
            if ((v & ~mask_limit) != 0)
                throw semantic_error("valuation mask uses issues beyond the agenda");
        std::sort(valuations_.begin(), valuations_.end(), detail::valuation_less);
        valuations_.erase(std::unique(valuations_.begin(), valuations_.end()), valuations_.end());

        rational_.reserve(valuations_.size());
        for (std::uint32_t v : valuations_) rational_.push_back(polar_set(v));
    }

    static agenda from_valuation_strings(std::vector<std::string> issue_labels,
                                         const std::vector<std::string>& rows) {
        const std::size_t k = issue_labels.size();
        std::vector<std::uint32_t> masks;
        masks.reserve(rows.size());
        for (const auto& row : rows) {
            if (row.size() != k)
                throw semantic_error("valuation string '" + row + "' has length " +
                                     std::to_string(row.size()) + ", expected " + std::to_string(k));
            std::uint32_t m = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if (row[i] == '1')
                    m |= 1u << i;
                else if (row[i] != '0')
                    throw semantic_error("valuation string '" + row + "' contains '" +
                                         std::string(1, row[i]) + "', expected '0' or '1'");
            }
            masks.push_back(m);
        }
        return agenda(std::move(issue_labels), std::move(masks));
    }

    int issue_count() const { return static_cast<int>(issues_.size()); }
    int literal_count() const { return 2 * issue_count(); }
    const std::vector<std::string>& issues() const { return issues_; }

    const std::vector<std::uint32_t>& valuations() const { return valuations_; }

    // Rational judgment sets, one per admissible valuation, canonical order.
    const std::vector<judgment_set>& rational_sets() const { return rational_; }

    std::string valuation_string(std::uint32_t mask) const {
        std::string s(issues_.size(), '0');
        for (std::size_t i = 0; i < issues_.size(); ++i)
            if ((mask >> i) & 1u) s[i] = '1';
        return s;
    }

    std::string bitpair_string(judgment_set s) const {
        std::string out(static_cast<std::size_t>(literal_count()), '0');
        for (int j = 0; j < literal_count(); ++j)
            if (s.accepts_index(j)) out[static_cast<std::size_t>(j)] = '1';
        return out;
    }

    // The complete judgment set induced by a valuation: per issue, exactly the
    // literal the valuation agrees with.
    judgment_set polar_set(std::uint32_t valuation_mask) const {
        judgment_set s;
        for (int i = 0; i < issue_count(); ++i)
            s.add({i, ((valuation_mask >> i) & 1u) == 0});
        return s;
    }

    // Inverse of polar_set where defined: valuation mask for a complete set
    // with exactly one literal per issue.
    std::optional<std::uint32_t> valuation_of(judgment_set s) const {
        std::uint32_t mask = 0;
        for (int i = 0; i < issue_count(); ++i) {
            const bool pos = s.accepts({i, false});
            const bool neg = s.accepts({i, true});
            if (pos == neg) return std::nullopt;
            if (pos) mask |= 1u << i;
        }
        return mask;
    }

    bool is_complete(judgment_set s) const {
        for (int i = 0; i < issue_count(); ++i)
            if (!s.accepts({i, false}) && !s.accepts({i, true})) return false;
        return true;
    }

    bool is_consistent(judgment_set s) const {
        for (judgment_set r : rational_)
            if (s.subset_of(r)) return true;
        return false;
    }

    judgment_status status(judgment_set s) const {
        judgment_status st;
        st.complete = is_complete(s);
        st.consistent = is_consistent(s);
        st.rational = st.complete && st.consistent;
        return st;
    }

    bool is_rational(judgment_set s) const { return rational_index(s).has_value(); }

    // Index into rational_sets(), if s is rational.
    std::optional<int> rational_index(judgment_set s) const {
        auto val = valuation_of(s);
        if (!val) return std::nullopt;
        auto it = std::lower_bound(valuations_.begin(), valuations_.end(), *val,
                                   detail::valuation_less);
        if (it == valuations_.end() || *it != *val) return std::nullopt;
        return static_cast<int>(it - valuations_.begin());
    }

    proposition_status classify(literal l) const {
        int accepted = 0;
        for (std::uint32_t v : valuations_) {
            const bool pos = ((v >> l.issue) & 1u) != 0;
            if (pos != l.negative) ++accepted;
        }
        if (accepted == 0) return proposition_status::contradictory;
        if (accepted == static_cast<int>(valuations_.size())) return proposition_status::tautological;
        return proposition_status::contingent;
    }

    // Issues whose positive literal is tautological or contradictory; such
    // agendas are legal but degenerate, and callers may wish to warn.
    std::vector<int> degenerate_issues() const {
        std::vector<int> out;
        for (int i = 0; i < issue_count(); ++i)
            if (classify({i, false}) != proposition_status::contingent) out.push_back(i);
        return out;
    }

    std::string literal_name(literal l) const {
        const std::string& label = issues_.at(static_cast<std::size_t>(l.issue));
        if (!l.negative) return label;
        const bool bare = label.find_first_of(" ~&|()-") == std::string::npos;
        return bare ? "¬" + label : "¬(" + label + ")";
    }

    std::vector<std::string> literal_names(judgment_set s) const {
        std::vector<std::string> out;
        for (int j = 0; j < literal_count(); ++j)
            if (s.accepts_index(j)) out.push_back(literal_name(literal::from_index(j)));
        return out;
    }

    std::string set_display(judgment_set s) const {
        std::string out = "{";
        bool first = true;
        for (const auto& name : literal_names(s)) {
            if (!first) out += ", ";
            out += name;
            first = false;
        }
        return out + "}";
    }

    // Accepts "label" or "~label"; parentheses around the label are optional
    // after '~'. Labels are matched verbatim, longest form first.
    literal parse_literal(std::string_view text) const {
        std::string_view t = text;
        bool negative = false;
        if (!t.empty() && (t.front() == '~' || t.substr(0, 2) == "¬")) {
            negative = true;
            t.remove_prefix(t.front() == '~' ? 1 : 2);
            if (t.size() >= 2 && t.front() == '(' && t.back() == ')') {
                // strip one balanced outer pair unless the label itself needs it
                if (find_issue(t) < 0) t = t.substr(1, t.size() - 2);
            }
        }
        const int issue = find_issue(t);
        if (issue < 0)
            throw semantic_error("unknown proposition '" + std::string(text) +
                                 "' (expected an issue label, optionally negated with '~')");
        return {issue, negative};
    }

    std::uint64_t fingerprint() const;

private:
    std::vector<std::string> issues_;
    std::vector<std::uint32_t> valuations_;
    std::vector<judgment_set> rational_;

    int find_issue(std::string_view label) const {
        for (std::size_t i = 0; i < issues_.size(); ++i)
            if (issues_[i] == label) return static_cast<int>(i);
        return -1;
    }
};

// FNV-1a over the canonical description; stable across runs and platforms.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t agenda::fingerprint() const {
    std::string canon;
    for (const auto& label : issues_) {
        canon += label;
        canon += '\n';
    }
    canon += '|';
    for (std::uint32_t v : valuations_) {
        canon += valuation_string(v);
        canon += '\n';
    }
    return fnv1a64(canon);
}

// Compile formulas into an agenda: one issue per formula (label = its source
// text), admissible valuations = truth-table rows over the union of atoms,
// projected to per-formula truth values and deduplicated.
inline agenda compile_formula_agenda(const std::vector<std::string>& formula_texts) {
    if (formula_texts.empty()) throw semantic_error("agenda needs at least one issue");
    std::vector<formula_ptr> parsed;
    parsed.reserve(formula_texts.size());
    std::vector<std::string> atoms;
    for (const auto& text : formula_texts) {
        formula_ptr f = parse_formula(text);
        collect_atoms(f, atoms);
        parsed.push_back(std::move(f));
    }
    if (atoms.size() > 16)
        throw resource_limit_error("formula agenda supports at most 16 distinct atoms, got " +
                                   std::to_string(atoms.size()));

    std::vector<std::uint32_t> masks;
    const std::uint32_t rows = 1u << atoms.size();
    for (std::uint32_t row = 0; row < rows; ++row) {
        auto value_of = [&](const std::string& name) {
            for (std::size_t a = 0; a < atoms.size(); ++a)
                if (atoms[a] == name) return ((row >> a) & 1u) != 0;
            return false; // unreachable: every atom was collected
        };
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < parsed.size(); ++i)
            if (evaluate(parsed[i], value_of)) m |= 1u << i;
        masks.push_back(m);
    }
    return agenda(std::vector<std::string>(formula_texts), std::move(masks));
}

// --- minimal inconsistent subsets -----------------------------------------

struct mi_options {
    std::optional<int> max_size;              // only report sets up to this size
    std::uint64_t subset_budget = 1u << 24;   // enumeration cap over 2^(2k) subsets
};

namespace detail {

inline std::uint64_t subsets_up_to(int universe, int bound) {
    // sum of C(universe, s) for s <= bound, saturating well below overflow
    long double total = 0, c = 1; // C(universe, 0)
    for (int s = 0; s <= bound; ++s) {
        total += c;
        c = c * (universe - s) / (s + 1);
        if (total > 1e18L) return ~0ull;
    }
    return static_cast<std::uint64_t>(total);
}

} // namespace detail

// All inclusion-minimal inconsistent subsets of the agenda's literals, in
// canonical order (size, then lowest differing literal). Enumerates subsets
// by increasing size and prunes supersets of found sets, so everything kept
// is minimal by construction.
inline std::vector<judgment_set> minimal_inconsistent_subsets(const agenda& ag,
                                                              mi_options options = {}) {
    const int nlit = ag.literal_count();
    const int bound = options.max_size ? std::min(*options.max_size, nlit) : nlit;
    if (detail::subsets_up_to(nlit, bound) > options.subset_budget)
        throw resource_limit_error(
            "minimal inconsistent subset enumeration over " + std::to_string(nlit) +
            " literals exceeds the subset budget of " + std::to_string(options.subset_budget));

    std::vector<judgment_set> found;
    auto has_mi_subset = [&](std::uint64_t mask) {
        for (judgment_set m : found)
            if ((m.bits() & ~mask) == 0) return true;
        return false;
    };

    for (int size = 1; size <= bound; ++size) {
        // Gosper's hack enumerates fixed-popcount masks in increasing value.
        std::uint64_t mask = (1ull << size) - 1ull;
        const std::uint64_t limit = 1ull << nlit;
        while (mask < limit) {
            const judgment_set candidate(static_cast<std::uint32_t>(mask));
            if (!has_mi_subset(mask) && !ag.is_consistent(candidate)) found.push_back(candidate);
            const std::uint64_t c = mask & (0ull - mask);
            const std::uint64_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    std::sort(found.begin(), found.end(), [](judgment_set a, judgment_set b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return found;
}

// Non-simple: some minimal inconsistent subset has more than two elements.
inline bool is_non_simple(const agenda& ag, std::uint64_t subset_budget = 1u << 24) {
    mi_options opt;
    opt.subset_budget = subset_budget;
    for (judgment_set m : minimal_inconsistent_subsets(ag, opt))
        if (m.size() >= 3) return true;
    return false;
}

} // namespace dynagg
