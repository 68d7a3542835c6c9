#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynagg/aggregation.hpp"
#include "dynagg/agenda.hpp"
#include "dynagg/dynamics.hpp"
#include "dynagg/errors.hpp"
#include "dynagg/revision.hpp"
#include "dynagg/search.hpp"
#include "dynagg/version.hpp"

// Serialization and I/O: agenda files, bundled fixtures, JSON report documents
// (deterministic except the wall-clock field) and human-readable rendering.

namespace dynagg {

using json = nlohmann::json;

inline std::string fingerprint_hex(const agenda& ag) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, ag.fingerprint());
    return buf;
}

// --- JSON builders ---------------------------------------------------------

inline json set_json(const agenda& ag, judgment_set s) {
    json j;
    j["literals"] = ag.literal_names(s);
    if (auto val = ag.valuation_of(s))
        j["bits"] = ag.valuation_string(*val);
    else
        j["bitpair"] = ag.bitpair_string(s);
    return j;
}

inline json optional_set_json(const agenda& ag, const std::optional<judgment_set>& s) {
    return s ? set_json(ag, *s) : json(nullptr);
}

inline json profile_json(const agenda& ag, const profile& pr) {
    json arr = json::array();
    for (judgment_set j : pr.members) arr.push_back(set_json(ag, j));
    return arr;
}

inline json agenda_json(const agenda& ag, const std::string& name = "") {
    json j;
    if (!name.empty()) j["name"] = name;
    j["issues"] = ag.issues();
    std::vector<std::string> rows;
    for (std::uint32_t v : ag.valuations()) rows.push_back(ag.valuation_string(v));
    j["valuations"] = rows;
    j["issue_count"] = ag.issue_count();
    j["rational_count"] = ag.rational_sets().size();
    j["fingerprint"] = fingerprint_hex(ag);
    return j;
}

inline json agenda_info_json(const agenda& ag, const std::string& name,
                             const std::vector<judgment_set>& minimal_inconsistent,
                             bool non_simple) {
    json j = agenda_json(ag, name);
    json lits = json::array();
    for (int ix = 0; ix < ag.literal_count(); ++ix) {
        const literal p = literal::from_index(ix);
        const char* status = "contingent";
        switch (ag.classify(p)) {
            case proposition_status::contradictory: status = "contradictory"; break;
            case proposition_status::tautological: status = "tautological"; break;
            case proposition_status::contingent: status = "contingent"; break;
        }
        lits.push_back({{"name", ag.literal_name(p)}, {"status", status}});
    }
    j["literals"] = lits;
    json mi = json::array();
    for (judgment_set s : minimal_inconsistent) mi.push_back(set_json(ag, s));
    j["minimal_inconsistent"] = mi;
    j["non_simple"] = non_simple;
    std::vector<std::string> degenerate;
    for (int i : ag.degenerate_issues()) degenerate.push_back(ag.issues()[static_cast<std::size_t>(i)]);
    j["degenerate_issues"] = degenerate;
    return j;
}

inline json rule_witness_json(const agenda& ag, const rule_witness& w) {
    json j;
    json profiles = json::array();
    for (const profile& pr : w.profiles) profiles.push_back(profile_json(ag, pr));
    j["profiles"] = profiles;
    std::vector<std::string> props;
    for (literal p : w.props) props.push_back(ag.literal_name(p));
    j["propositions"] = props;
    json outputs = json::array();
    for (judgment_set s : w.outputs) outputs.push_back(set_json(ag, s));
    j["outputs"] = outputs;
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

inline json property_report_json(const agenda& ag, const property_report& r) {
    json j;
    j["property"] = r.property;
    j["holds"] = r.holds;
    j["cases_examined"] = r.cases_examined;
    j["witnesses_total"] = r.witnesses_total;
    j["witness_cap"] = r.witness_cap;
    json ws = json::array();
    for (const auto& w : r.witnesses) ws.push_back(rule_witness_json(ag, w));
    j["witnesses"] = ws;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json five_condition_json(const agenda& ag, const five_condition_report& r) {
    json j;
    j["all_hold"] = r.all_hold;
    json conditions = json::array();
    for (const auto& c : r.conditions) conditions.push_back(property_report_json(ag, c));
    j["conditions"] = conditions;
    return j;
}

inline json op_witness_json(const agenda& ag, const op_witness& w) {
    json j;
    j["before"] = set_json(ag, w.before);
    j["learnt"] = ag.literal_name(w.learnt);
    j["after"] = optional_set_json(ag, w.after);
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

inline json op_report_json(const agenda& ag, const op_property_report& r) {
    json j;
    j["property"] = r.property;
    j["holds"] = r.holds;
    j["cases_examined"] = r.cases_examined;
    j["witnesses_total"] = r.witnesses_total;
    j["witness_cap"] = r.witness_cap;
    json ws = json::array();
    for (const auto& w : r.witnesses) ws.push_back(op_witness_json(ag, w));
    j["witnesses"] = ws;
    return j;
}

inline json square_json(const agenda& ag, const commutation_square& sq) {
    json j;
    j["index"] = sq.index;
    j["learnt"] = ag.literal_name(sq.learnt);
    j["before"] = profile_json(ag, sq.before);
    j["collective_before"] = set_json(ag, sq.collective_before);
    j["collective_revised"] = optional_set_json(ag, sq.collective_revised);
    j["revised"] = sq.revised ? profile_json(ag, *sq.revised) : json(nullptr);
    j["aggregated_revised"] = optional_set_json(ag, sq.aggregated_revised);
    j["vacuous"] = sq.vacuous;
    j["commutes"] = sq.vacuous ? json(nullptr) : json(sq.commutes);
    return j;
}

inline json dynamic_report_json(const agenda& ag, const dynamic_report& r) {
    json j;
    j["rule"] = r.rule_spec;
    j["operator"] = r.operator_spec;
    j["n"] = r.n;
    j["learnable"] = r.scope;
    j["totals"] = {{"checked", r.squares_checked},
                   {"commuting", r.commuting},
                   {"violating", r.violating},
                   {"vacuous", r.vacuous}};
    j["witness_cap"] = r.witness_cap;
    json ws = json::array();
    for (const auto& sq : r.witnesses) ws.push_back(square_json(ag, sq));
    j["witnesses"] = ws;
    return j;
}

inline json table_entries_json(const agenda& ag, const std::vector<revision_entry>& entries) {
    json arr = json::array();
    for (const auto& e : entries)
        arr.push_back({{"J", ag.bitpair_string(e.before)},
                       {"p", ag.literal_name(e.learnt)},
                       {"result", ag.bitpair_string(e.after)}});
    return arr;
}

inline json search_outcome_json(const agenda& ag, const std::string& rule_spec,
                                const op_requirements& req, const search_outcome& outcome) {
    json j;
    j["rule"] = rule_spec;
    std::vector<std::string> required;
    if (req.successful) required.push_back("successful");
    if (req.conservative) required.push_back("conservative");
    if (req.rationality_preserving) required.push_back("rationality-preserving");
    j["required"] = required;
    j["verdict"] = to_string(outcome.verdict);
    j["stats"] = {{"nodes", outcome.stats.nodes},
                  {"propagations", outcome.stats.propagations},
                  {"forced_cells", outcome.stats.forced_cells},
                  {"max_depth", outcome.stats.max_depth}};
    if (outcome.verdict == search_verdict::satisfiable)
        j["witness"] = {{"entries", table_entries_json(ag, outcome.witness_entries)}};
    else
        j["witness"] = nullptr;
    return j;
}

inline json escape_report_json(const escape_report& r) {
    json j;
    j["n"] = r.n;
    j["any_contradiction"] = r.any_contradiction;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json rj;
        rj["rule"] = row.rule_spec;
        rj["operator"] = row.operator_spec;
        rj["unanimity_preserving"] = row.unanimity_preserving;
        rj["propositionwise_unanimity_preserving"] = row.propositionwise_up;
        rj["claim_applies"] = row.claim_applies;
        rj["violations"] = row.violations;
        rj["vacuous"] = row.vacuous;
        rj["squares"] = row.squares;
        rj["contradicts_claim"] = row.contradicts_claim;
        if (!row.note.empty()) rj["note"] = row.note;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j;
}

inline json repro_json(const agenda& ag, const repro_report& r) {
    json j;
    j["pass"] = r.pass;
    j["learnt"] = ag.literal_name(r.learnt);
    j["expect_mismatch"] = r.expect_mismatch;
    j["mismatch_observed"] = r.mismatch_observed;
    j["first_failure"] = r.first_failure;
    json cells = json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"name", c.name},
                         {"expected", set_json(ag, c.expected)},
                         {"actual", set_json(ag, c.actual)},
                         {"match", c.match}});
    j["cells"] = cells;
    return j;
}

// Top-level document; deterministic except stats.wall_ms.
inline json report_document(const std::vector<std::string>& command, const json* agenda_block,
                            json report, std::int64_t wall_ms) {
    json doc;
    doc["tool"] = {{"name", tool_name}, {"version", tool_version}};
    doc["command"] = command;
    doc["agenda"] = agenda_block ? *agenda_block : json(nullptr);
    doc["report"] = std::move(report);
    doc["stats"] = {{"wall_ms", wall_ms}};
    return doc;
}

// --- agenda files and fixtures ----------------------------------------------

struct loaded_agenda {
    agenda ag;
    std::string name;
};

inline const std::map<std::string, std::string>& bundled_fixtures() {
    static const std::map<std::string, std::string> fixtures = {
        {"cond-subjunctive",
         R"({"name": "cond-subjunctive",
             "issues": ["p", "p->q", "q"],
             "valuations": ["000", "001", "010", "011", "100", "101", "111"]})"},
        {"cond-material",
         R"({"name": "cond-material",
             "atoms": ["p", "q"],
             "formulas": ["p", "p -> q", "q"]})"},
        {"independent-2",
         R"({"name": "independent-2",
             "issues": ["p", "q"],
             "valuations": ["00", "01", "10", "11"]})"},
    };
    return fixtures;
}

inline loaded_agenda agenda_from_json(const json& doc, const std::string& fallback_name) {
    if (!doc.is_object()) throw semantic_error("agenda document must be a JSON object");
    const bool has_valuations = doc.contains("issues") || doc.contains("valuations");
    const bool has_formulas = doc.contains("formulas") || doc.contains("atoms");
    if (has_valuations && has_formulas)
        throw semantic_error("agenda document mixes the valuation and formula backends; "
                             "use either issues+valuations or atoms+formulas");
    if (!has_valuations && !has_formulas)
        throw semantic_error("agenda document needs issues+valuations or atoms+formulas");

    std::string name = fallback_name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw semantic_error("agenda name must be a string");
        name = doc["name"].get<std::string>();
    }

    auto string_list = [](const json& node, const char* what) {
        if (!node.is_array()) throw semantic_error(std::string(what) + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& item : node) {
            if (!item.is_string())
                throw semantic_error(std::string(what) + " must be an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    };

    if (has_valuations) {
        if (!doc.contains("issues") || !doc.contains("valuations"))
            throw semantic_error("valuation backend needs both 'issues' and 'valuations'");
        return {agenda::from_valuation_strings(string_list(doc["issues"], "issues"),
                                               string_list(doc["valuations"], "valuations")),
                name};
    }

    if (!doc.contains("formulas"))
        throw semantic_error("formula backend needs a 'formulas' array");
    const std::vector<std::string> formulas = string_list(doc["formulas"], "formulas");
    agenda compiled = compile_formula_agenda(formulas);
    if (doc.contains("atoms")) {
        const std::vector<std::string> declared = string_list(doc["atoms"], "atoms");
        std::vector<std::string> used;
        for (const auto& text : formulas) collect_atoms(parse_formula(text), used);
        for (const auto& atom : used) {
            bool found = false;
            for (const auto& d : declared) found = found || d == atom;
            if (!found)
                throw semantic_error("formula atom '" + atom + "' missing from the declared atoms");
        }
    }
    return {std::move(compiled), name};
}

// Resolves a bundled fixture name or a path to a JSON agenda file.
inline loaded_agenda load_agenda(const std::string& ref) {
    const auto& fixtures = bundled_fixtures();
    auto fixture = fixtures.find(ref);
    std::string text;
    std::string fallback = ref;
    if (fixture != fixtures.end()) {
        text = fixture->second;
    } else {
        std::ifstream in(ref);
        if (!in) throw semantic_error("cannot read agenda '" + ref + "': not a bundled fixture (" +
                                      [&] {
                                          std::string names;
                                          for (const auto& [n, t] : fixtures) {
                                              if (!names.empty()) names += ", ";
                                              names += n;
                                          }
                                          return names;
                                      }() +
                                      ") and not a readable file");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        const std::size_t slash = ref.find_last_of('/');
        fallback = slash == std::string::npos ? ref : ref.substr(slash + 1);
        const std::size_t dot = fallback.find_last_of('.');
        if (dot != std::string::npos && dot > 0) fallback = fallback.substr(0, dot);
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw parse_error("agenda '" + ref + "' is not valid JSON: " + err.what());
    }
    return agenda_from_json(doc, fallback);
}

inline json agenda_file_json(const agenda& ag, const std::string& name) {
    json j;
    if (!name.empty()) j["name"] = name;
    j["issues"] = ag.issues();
    std::vector<std::string> rows;
    for (std::uint32_t v : ag.valuations()) rows.push_back(ag.valuation_string(v));
    j["valuations"] = rows;
    return j;
}

// k-length strings are valuation strings, 2k-length bitpair strings.
inline judgment_set set_from_bitstring(const agenda& ag, const std::string& text) {
    const std::size_t k = static_cast<std::size_t>(ag.issue_count());
    if (text.empty() || text.find_first_not_of("01") != std::string::npos)
        throw semantic_error("expected a 0/1 bitstring, got '" + text + "'");
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
    throw semantic_error("bitstring must have length " + std::to_string(k) + " (valuation) or " +
                         std::to_string(2 * k) + " (bitpair), got " + std::to_string(text.size()));
}

// Imposed operator map file: {"map": {"<literal>": "<bitstring>", ...}},
// literals written as 'p' or '~p', one entry per literal of the agenda.
inline revision_operator load_imposed_operator(const agenda& ag, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw semantic_error("cannot read imposed map file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& err) {
        throw parse_error("imposed map '" + path + "' is not valid JSON: " + err.what());
    }
    if (!doc.is_object() || !doc.contains("map") || !doc["map"].is_object())
        throw semantic_error("imposed map file needs a top-level 'map' object");
    std::map<int, judgment_set> map;
    for (const auto& [key, value] : doc["map"].items()) {
        if (!value.is_string()) throw semantic_error("imposed map values must be bitstrings");
        const literal p = ag.parse_literal(key);
        map[p.index()] = set_from_bitstring(ag, value.get<std::string>());
    }
    return revision_operator::imposed(ag, std::move(map), "imposed:" + path);
}

// Operator specs as revision_operator::parse, plus 'imposed:<file>' map files.
inline revision_operator resolve_operator(const agenda& ag, const std::string& spec,
                                          const tie_policy& bare_hamming_policy) {
    if (spec.rfind("imposed:", 0) == 0 && spec != "imposed:canonical")
        return load_imposed_operator(ag, spec.substr(8));
    return revision_operator::parse(ag, spec, bare_hamming_policy);
}

// --- human rendering ---------------------------------------------------------

inline void render_property_report(std::ostream& out, const agenda& ag, const property_report& r) {
    out << r.property << ": " << (r.holds ? "holds" : "VIOLATED") << "  (cases examined: "
        << r.cases_examined << ")\n";
    if (!r.note.empty()) out << "  note: " << r.note << "\n";
    if (!r.holds && r.witnesses_total > 0)
        out << "  witnesses: " << r.witnesses_total << " (showing "
            << r.witnesses.size() << ")\n";
    for (const auto& w : r.witnesses) {
        for (std::size_t i = 0; i < w.profiles.size(); ++i) {
            out << "    profile" << (w.profiles.size() > 1 ? " " + std::to_string(i + 1) : "") << ": ";
            for (std::size_t m = 0; m < w.profiles[i].members.size(); ++m) {
                if (m) out << " ; ";
                out << ag.set_display(w.profiles[i].members[m]);
            }
            out << "\n";
        }
        if (!w.props.empty()) {
            out << "    proposition(s): ";
            for (std::size_t i = 0; i < w.props.size(); ++i)
                out << (i ? ", " : "") << ag.literal_name(w.props[i]);
            out << "\n";
        }
        for (judgment_set s : w.outputs) out << "    output: " << ag.set_display(s) << "\n";
        if (!w.note.empty()) out << "    " << w.note << "\n";
    }
}

inline void render_five_conditions(std::ostream& out, const agenda& ag,
                                   const five_condition_report& r) {
    out << "five-condition check: " << (r.all_hold ? "all conditions hold" : "some condition fails")
        << "\n";
    for (const auto& c : r.conditions) render_property_report(out, ag, c);
}

inline void render_op_report(std::ostream& out, const agenda& ag, const op_property_report& r) {
    out << r.property << ": " << (r.holds ? "holds" : "VIOLATED") << "  (pairs examined: "
        << r.cases_examined << ")\n";
    if (!r.holds)
        out << "  witnesses: " << r.witnesses_total << " (showing " << r.witnesses.size() << ")\n";
    for (const auto& w : r.witnesses) {
        out << "    " << ag.set_display(w.before) << "  learn " << ag.literal_name(w.learnt)
            << "  -> ";
        if (w.after)
            out << ag.set_display(*w.after);
        else
            out << "(undefined)";
        if (!w.note.empty()) out << "   [" << w.note << "]";
        out << "\n";
    }
}

// Four-corner commutation diagram with a legend naming each corner.
inline void render_square(std::ostream& out, const agenda& ag, const commutation_square& sq) {
    auto render_profile = [&](const profile& pr) {
        std::string s;
        for (std::size_t m = 0; m < pr.members.size(); ++m) {
            if (m) s += " ; ";
            s += ag.set_display(pr.members[m]);
        }
        return s;
    };
    const std::string p = ag.literal_name(sq.learnt);
    out << "square #" << sq.index << ", learn " << p << "\n";
    out << "      P ----F----> G\n";
    out << "      |            |\n";
    out << "      |" << p << (std::string(p.size() < 10 ? 10 - p.size() : 1, ' ')) << " |" << p
        << "\n";
    out << "      v            v\n";
    out << "      P' ---F----> F(P')  =?=  G|" << p << "\n";
    out << "  P     = " << render_profile(sq.before) << "\n";
    out << "  G     = " << ag.set_display(sq.collective_before) << "\n";
    out << "  P'    = " << (sq.revised ? render_profile(*sq.revised) : "(undefined)") << "\n";
    out << "  G|" << p << (std::string(p.size() < 4 ? 4 - p.size() : 1, ' ')) << "= "
        << (sq.collective_revised ? ag.set_display(*sq.collective_revised) : "(undefined)") << "\n";
    if (sq.vacuous) {
        out << "  vacuous: the revised profile leaves the rule's domain\n";
        return;
    }
    out << "  F(P') = " << ag.set_display(*sq.aggregated_revised) << "\n";
    out << "  verdict: " << (sq.commutes ? "commutes" : "VIOLATION  F(P') != G|" + p) << "\n";
}

inline void render_dynamic(std::ostream& out, const agenda& ag, const dynamic_report& r) {
    out << "dynamic rationality of " << r.rule_spec << " under " << r.operator_spec
        << " (n=" << r.n << ", learnable=" << r.scope << ")\n";
    out << "  squares: " << r.squares_checked << "  commuting: " << r.commuting
        << "  violating: " << r.violating << "  vacuous: " << r.vacuous << "\n";
    if (r.violating > 0) {
        out << "  showing " << r.witnesses.size() << " of " << r.violating << " violations\n";
        for (const auto& sq : r.witnesses) render_square(out, ag, sq);
    }
}

inline void render_search(std::ostream& out, const agenda& ag, const std::string& rule_spec,
                          const op_requirements& req, const search_outcome& outcome) {
    out << "operator search for " << rule_spec << " requiring {" << req.display() << "}\n";
    out << "  verdict: " << to_string(outcome.verdict) << "\n";
    out << "  nodes: " << outcome.stats.nodes << "  propagations: " << outcome.stats.propagations
        << "  forced cells: " << outcome.stats.forced_cells
        << "  max depth: " << outcome.stats.max_depth << "\n";
    if (outcome.verdict == search_verdict::satisfiable) {
        out << "  witness (constrained cells, defaults elsewhere):\n";
        for (const auto& e : outcome.witness_entries)
            out << "    " << ag.bitpair_string(e.before) << " | learn "
                << ag.literal_name(e.learnt) << " -> " << ag.bitpair_string(e.after) << "\n";
    }
}

inline void render_escapes(std::ostream& out, const escape_report& r) {
    out << "escape-route verification (n=" << r.n << ")\n";
    for (const auto& row : r.rows) {
        out << "  " << row.rule_spec << " + " << row.operator_spec << ": ";
        if (!row.note.empty()) {
            out << "skipped (" << row.note << ")\n";
            continue;
        }
        out << (row.claim_applies ? "claim applies" : "claim does not apply") << ", violations "
            << row.violations << "/" << row.squares;
        if (row.contradicts_claim) out << "  CONTRADICTS CLAIM";
        out << "  [UP=" << (row.unanimity_preserving ? "yes" : "no")
            << " PUP=" << (row.propositionwise_up ? "yes" : "no") << "]\n";
    }
    out << (r.any_contradiction ? "result: some claim contradicted\n"
                                : "result: all claims confirmed\n");
}

inline void render_repro(std::ostream& out, const agenda& ag, const repro_report& r) {
    out << "worked example: three individuals learn " << ag.literal_name(r.learnt)
        << ", majority rule\n";
    for (const auto& c : r.cells) {
        out << "  " << c.name << ": expected " << ag.set_display(c.expected) << ", got "
            << ag.set_display(c.actual) << (c.match ? "" : "   MISMATCH") << "\n";
    }
    out << "  group revision " << ag.set_display(r.group_revised) << " vs revised-then-aggregated "
        << ag.set_display(r.majority_post) << ": "
        << (r.mismatch_observed ? "differ (dynamic rationality violated)" : "equal") << "\n";
    out << (r.pass ? "repro: PASS\n" : "repro: FAIL (first failure: " + r.first_failure + ")\n");
}

} // namespace dynagg
