#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynagg/aggregation.hpp"
#include "dynagg/agenda.hpp"
#include "dynagg/dynamics.hpp"
#include "dynagg/errors.hpp"
#include "dynagg/report.hpp"
#include "dynagg/revision.hpp"
#include "dynagg/search.hpp"
#include "dynagg/version.hpp"

// Command-line front door. Exit codes: 0 = command ran and the property holds
// (or an info command succeeded), 1 = property violated / reproduction failed /
// cross-check disagreement, 2 = usage or input error, 3 = resource budget
// exhausted.

namespace dynagg {

namespace detail {

inline op_requirements parse_requirements(const std::string& csv) {
    op_requirements req;
    bool any = false;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        std::string token = csv.substr(start, comma - start);
        for (char& c : token)
            if (c == '_') c = '-';
        if (!token.empty()) {
            any = true;
            if (token == "successful") {
                req.successful = true;
            } else if (token == "conservative") {
                req.conservative = true;
            } else if (token == "regular") {
                req.successful = true;
                req.conservative = true;
            } else if (token == "rationality-preserving" || token == "rational") {
                req.rationality_preserving = true;
            } else {
                throw semantic_error("unknown operator requirement '" + token +
                                     "' (expected successful, conservative, regular, "
                                     "rationality-preserving)");
            }
        }
        start = comma + 1;
    }
    if (!any)
        throw semantic_error("--require needs at least one of successful, conservative, regular, "
                             "rationality-preserving");
    return req;
}

inline std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        if (comma > start) out.push_back(csv.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

} // namespace detail

inline void render_agenda_info(std::ostream& out, const agenda& ag,
                               const std::vector<judgment_set>& mi, bool non_simple) {
    out << "issues:";
    for (const auto& label : ag.issues()) out << " " << label;
    out << "\nadmissible valuations:";
    for (std::uint32_t v : ag.valuations()) out << " " << ag.valuation_string(v);
    out << "\nrational judgment sets (" << ag.rational_sets().size() << "):\n";
    for (judgment_set s : ag.rational_sets()) out << "  " << ag.set_display(s) << "\n";
    out << "literals:\n";
    for (int ix = 0; ix < ag.literal_count(); ++ix) {
        const literal p = literal::from_index(ix);
        const char* status = "contingent";
        switch (ag.classify(p)) {
            case proposition_status::contradictory: status = "contradictory"; break;
            case proposition_status::tautological: status = "tautological"; break;
            case proposition_status::contingent: status = "contingent"; break;
        }
        out << "  " << ag.literal_name(p) << ": " << status << "\n";
    }
    out << "minimal inconsistent subsets (" << mi.size() << "):\n";
    for (judgment_set s : mi) out << "  " << ag.set_display(s) << "\n";
    out << "non-simple: " << (non_simple ? "yes" : "no") << "\n";
    const auto degenerate = ag.degenerate_issues();
    out << "degenerate issues:";
    if (degenerate.empty()) out << " (none)";
    for (int i : degenerate) out << " " << ag.issues()[static_cast<std::size_t>(i)];
    out << "\n";
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::string> echo;
    echo.reserve(args.size() + 1);
    echo.emplace_back("dynagg");
    echo.insert(echo.end(), args.begin(), args.end());

    std::uint64_t budget = 10'000'000;
    if (const char* env = std::getenv("DYNAGG_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*env == '\0' || end == nullptr || *end != '\0' || v == 0) {
            err << "error: DYNAGG_BUDGET must be a positive integer, got '" << env << "'\n";
            return 2;
        }
        budget = v;
    }

    bool json_output = false;
    std::size_t max_witnesses = 100;
    std::string tie = "example";
    int threads = 1;

    CLI::App app{"laboratory for judgment aggregation under learning: agenda analysis, rule and "
                 "operator property checks, commutation scans, and operator search",
                 "dynagg"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(tool_name) + " " + tool_version);
    app.add_flag("--json", json_output, "emit one structured JSON report document");
    app.add_option("--budget", budget,
                   "enumeration/search budget in profiles, pairs, squares, or nodes "
                   "(default from DYNAGG_BUDGET, else 10000000)")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-witnesses", max_witnesses, "cap on stored witnesses (counts stay exact)");
    app.add_option("--tie-policy", tie,
                   "tie policy for bare 'hamming': example = protect premises, prose = protect "
                   "the conclusion")
        ->check(CLI::IsMember({"example", "prose"}));
    app.add_option("--threads", threads, "worker threads for commutation scans");

    int exit_code = 0;

    auto emit_json = [&](const json* agenda_block, json body) {
        const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        out << report_document(echo, agenda_block, std::move(body), wall).dump(2) << "\n";
    };
    auto human_header = [&](const loaded_agenda& la) {
        out << "agenda " << la.name << "  [" << fingerprint_hex(la.ag) << "]  "
            << la.ag.issue_count() << " issues, " << la.ag.rational_sets().size()
            << " rational sets\n";
    };
    auto bare_policy = [&](const agenda& ag) {
        return tie == "prose" ? tie_policy::protect_conclusion(ag)
                              : tie_policy::protect_premises(ag);
    };
    auto make_check_options = [&] {
        check_options o;
        o.budget = budget;
        o.max_witnesses = max_witnesses;
        return o;
    };
    auto make_dynamics_options = [&](learnable_scope scope) {
        dynamics_options o;
        o.budget = budget;
        o.max_witnesses = max_witnesses;
        o.threads = threads;
        o.scope = scope;
        return o;
    };

    // --- agenda info ---------------------------------------------------------
    auto* agenda_cmd = app.add_subcommand("agenda", "agenda analysis");
    agenda_cmd->require_subcommand(1);
    agenda_cmd->fallthrough();
    auto* info_cmd = agenda_cmd->add_subcommand(
        "info", "issues, valuations, rational sets, literal status, minimal inconsistent subsets");
    info_cmd->fallthrough();
    std::string info_agenda;
    int info_max_mi = -1;
    info_cmd->add_option("--agenda", info_agenda, "bundled fixture name or agenda file path")
        ->required();
    info_cmd->add_option("--max-mi-size", info_max_mi,
                         "only report minimal inconsistent subsets up to this size");
    info_cmd->callback([&] {
        const loaded_agenda la = load_agenda(info_agenda);
        mi_options mo;
        if (info_max_mi >= 0) mo.max_size = info_max_mi;
        const auto mi = minimal_inconsistent_subsets(la.ag, mo);
        bool non_simple = false;
        for (judgment_set s : mi) non_simple = non_simple || s.size() >= 3;
        if (json_output) {
            const json ag_block = agenda_json(la.ag, la.name);
            emit_json(&ag_block, agenda_info_json(la.ag, la.name, mi, non_simple));
        } else {
            human_header(la);
            render_agenda_info(out, la.ag, mi, non_simple);
        }
        exit_code = 0;
    });

    // --- check ---------------------------------------------------------------
    auto* check_cmd = app.add_subcommand("check", "property checks and commutation scans");
    check_cmd->require_subcommand(1);
    check_cmd->fallthrough();

    auto* rule_cmd = check_cmd->add_subcommand("rule", "aggregation rule properties");
    rule_cmd->fallthrough();
    std::string cr_agenda, cr_rule, cr_property;
    int cr_n = 0;
    rule_cmd->add_option("--agenda", cr_agenda, "bundled fixture name or agenda file path")
        ->required();
    rule_cmd->add_option("--rule", cr_rule,
                         "majority | quota:m | oligarchy:i,j | dictator:i | constant:<bits> | "
                         "premise:i,j")
        ->required();
    rule_cmd->add_option("--n", cr_n, "number of individuals")->required();
    rule_cmd
        ->add_option("--property", cr_property,
                     "non-imposition | monotonicity | systematicity | non-oligarchy | "
                     "unanimity-preservation | propositionwise-unanimity-preservation | "
                     "static-rationality | five-conditions")
        ->required();
    rule_cmd->callback([&] {
        const loaded_agenda la = load_agenda(cr_agenda);
        const aggregation_rule rule = aggregation_rule::parse(la.ag, cr_n, cr_rule);
        const json ag_block = agenda_json(la.ag, la.name);
        if (cr_property == "five-conditions") {
            const five_condition_report rep = check_five_conditions(la.ag, rule,
                                                                    make_check_options());
            if (json_output) {
                json body;
                body["rule"] = rule.spec();
                body["n"] = rule.n();
                body["five_conditions"] = five_condition_json(la.ag, rep);
                emit_json(&ag_block, std::move(body));
            } else {
                human_header(la);
                out << "rule " << rule.spec() << ", n=" << rule.n() << "\n";
                render_five_conditions(out, la.ag, rep);
            }
            exit_code = rep.all_hold ? 0 : 1;
            return;
        }
        const auto property = rule_property_from_string(cr_property);
        if (!property)
            throw semantic_error("unknown rule property '" + cr_property + "'");
        const property_report rep = check_rule_property(la.ag, rule, *property,
                                                        make_check_options());
        if (json_output) {
            json body;
            body["rule"] = rule.spec();
            body["n"] = rule.n();
            body["check"] = property_report_json(la.ag, rep);
            emit_json(&ag_block, std::move(body));
        } else {
            human_header(la);
            out << "rule " << rule.spec() << ", n=" << rule.n() << "\n";
            render_property_report(out, la.ag, rep);
        }
        exit_code = rep.holds ? 0 : 1;
    });

    auto* op_cmd = check_cmd->add_subcommand("op", "revision operator properties");
    op_cmd->fallthrough();
    std::string co_agenda, co_op, co_property;
    op_cmd->add_option("--agenda", co_agenda, "bundled fixture name or agenda file path")
        ->required();
    op_cmd->add_option("--op", co_op,
                       "hamming[:protect=<issues|premises|conclusion>] | constant | "
                       "imposed:canonical | imposed:<map file> | irrational:corrected | "
                       "irrational:printed")
        ->required();
    op_cmd->add_option("--property", co_property,
                       "successful | conservative | regular | rationality-preserving | all")
        ->required();
    op_cmd->callback([&] {
        const loaded_agenda la = load_agenda(co_agenda);
        const revision_operator op = resolve_operator(la.ag, co_op, bare_policy(la.ag));
        std::vector<op_check> checks;
        if (co_property == "all") {
            checks = {op_check::successful, op_check::conservative, op_check::regular,
                      op_check::rationality_preserving};
        } else {
            const auto c = op_check_from_string(co_property);
            if (!c) throw semantic_error("unknown operator property '" + co_property + "'");
            checks = {*c};
        }
        bool all_hold = true;
        json reports = json::array();
        if (!json_output) {
            human_header(la);
            out << "operator " << op.spec() << "\n";
        }
        for (op_check c : checks) {
            const op_property_report rep = check_operator_property(la.ag, op, c,
                                                                   make_check_options());
            all_hold = all_hold && rep.holds;
            if (json_output)
                reports.push_back(op_report_json(la.ag, rep));
            else
                render_op_report(out, la.ag, rep);
        }
        if (json_output) {
            const json ag_block = agenda_json(la.ag, la.name);
            json body;
            body["operator"] = op.spec();
            body["checks"] = std::move(reports);
            emit_json(&ag_block, std::move(body));
        }
        exit_code = all_hold ? 0 : 1;
    });

    auto* dynamic_cmd = check_cmd->add_subcommand(
        "dynamic", "dynamic rationality: aggregation and revision commute on every square");
    dynamic_cmd->fallthrough();
    std::string cd_agenda, cd_rule, cd_op, cd_learnable = "all";
    int cd_n = 0;
    dynamic_cmd->add_option("--agenda", cd_agenda, "bundled fixture name or agenda file path")
        ->required();
    dynamic_cmd->add_option("--rule", cd_rule, "aggregation rule spec")->required();
    dynamic_cmd->add_option("--op", cd_op, "revision operator spec")->required();
    dynamic_cmd->add_option("--n", cd_n, "number of individuals")->required();
    dynamic_cmd->add_option("--learnable", cd_learnable, "which literals may be learnt")
        ->check(CLI::IsMember({"all", "noncontradictory"}));
    dynamic_cmd->callback([&] {
        const loaded_agenda la = load_agenda(cd_agenda);
        const aggregation_rule rule = aggregation_rule::parse(la.ag, cd_n, cd_rule);
        const revision_operator op = resolve_operator(la.ag, cd_op, bare_policy(la.ag));
        const learnable_scope scope = cd_learnable == "noncontradictory"
                                          ? learnable_scope::noncontradictory_only
                                          : learnable_scope::all_literals;
        const dynamic_report rep =
            check_dynamic_rationality(la.ag, rule, op, make_dynamics_options(scope));
        if (json_output) {
            const json ag_block = agenda_json(la.ag, la.name);
            emit_json(&ag_block, dynamic_report_json(la.ag, rep));
        } else {
            human_header(la);
            render_dynamic(out, la.ag, rep);
        }
        exit_code = rep.violating == 0 ? 0 : 1;
    });

    // --- search operator -------------------------------------------------------
    auto* search_cmd = app.add_subcommand("search", "constraint search");
    search_cmd->require_subcommand(1);
    search_cmd->fallthrough();
    auto* op_search_cmd = search_cmd->add_subcommand(
        "operator", "does a revision operator with the required properties commute with the rule?");
    op_search_cmd->fallthrough();
    std::string so_agenda, so_rule;
    std::string so_require = "successful,conservative,rationality-preserving";
    int so_n = 0;
    bool so_cross = false;
    op_search_cmd->add_option("--agenda", so_agenda, "bundled fixture name or agenda file path")
        ->required();
    op_search_cmd->add_option("--rule", so_rule, "aggregation rule spec")->required();
    op_search_cmd->add_option("--n", so_n, "number of individuals")->required();
    op_search_cmd->add_option("--require", so_require,
                              "comma-separated operator requirements; regular = "
                              "successful+conservative, rational = rationality-preserving");
    op_search_cmd->add_flag("--cross-check", so_cross,
                            "also run the brute-force enumeration engine and compare verdicts");
    op_search_cmd->callback([&] {
        const loaded_agenda la = load_agenda(so_agenda);
        const aggregation_rule rule = aggregation_rule::parse(la.ag, so_n, so_rule);
        const op_requirements req = detail::parse_requirements(so_require);
        search_instance instance;
        instance.required = req;
        instance.node_budget = budget;
        const search_outcome outcome = exists_commuting_operator(la.ag, rule, instance);

        json body = search_outcome_json(la.ag, rule.spec(), req, outcome);
        body["n"] = rule.n();

        std::optional<search_outcome> oracle;
        if (so_cross) {
            oracle = exists_commuting_operator_by_enumeration(la.ag, rule, instance, budget);
            json cross;
            cross["verdict"] = to_string(oracle->verdict);
            if (oracle->verdict == search_verdict::budget_exhausted) {
                cross["agrees"] = nullptr;
                cross["note"] = "enumeration engine exhausted its budget";
            } else {
                cross["agrees"] = oracle->verdict == outcome.verdict;
            }
            body["cross_check"] = std::move(cross);
        }

        if (json_output) {
            const json ag_block = agenda_json(la.ag, la.name);
            emit_json(&ag_block, std::move(body));
        } else {
            human_header(la);
            render_search(out, la.ag, rule.spec(), req, outcome);
            if (oracle) {
                out << "  cross-check verdict: " << to_string(oracle->verdict);
                if (oracle->verdict == search_verdict::budget_exhausted)
                    out << " (inconclusive)";
                else
                    out << (oracle->verdict == outcome.verdict ? " (agrees)" : " (DISAGREES)");
                out << "\n";
            }
        }

        if (outcome.verdict == search_verdict::budget_exhausted) {
            exit_code = 3;
        } else if (oracle && oracle->verdict != search_verdict::budget_exhausted &&
                   oracle->verdict != outcome.verdict) {
            exit_code = 1;
        } else {
            exit_code = 0;
        }
    });

    // --- verify escapes ----------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "claim verification");
    verify_cmd->require_subcommand(1);
    verify_cmd->fallthrough();
    auto* escapes_cmd = verify_cmd->add_subcommand(
        "escapes",
        "each relaxed operator commutes with every rule its possibility claim covers");
    escapes_cmd->fallthrough();
    std::string ve_agenda, ve_rules;
    int ve_n = 0;
    escapes_cmd->add_option("--agenda", ve_agenda, "bundled fixture name or agenda file path")
        ->required();
    escapes_cmd->add_option("--n", ve_n, "number of individuals")->required();
    escapes_cmd->add_option("--rules", ve_rules,
                            "comma-separated rule specs (default: majority, every quota, "
                            "dictator:1, oligarchy:1,2)");
    escapes_cmd->callback([&] {
        const loaded_agenda la = load_agenda(ve_agenda);
        const escape_report rep =
            verify_escape_routes(la.ag, ve_n, detail::split_csv(ve_rules),
                                 make_dynamics_options(learnable_scope::all_literals));
        if (json_output) {
            const json ag_block = agenda_json(la.ag, la.name);
            emit_json(&ag_block, escape_report_json(rep));
        } else {
            human_header(la);
            render_escapes(out, rep);
        }
        exit_code = rep.any_contradiction ? 1 : 0;
    });

    // --- repro ------------------------------------------------------------------
    auto* repro_cmd = app.add_subcommand("repro", "golden reproductions");
    repro_cmd->require_subcommand(1);
    repro_cmd->fallthrough();
    auto* tark_cmd = repro_cmd->add_subcommand(
        "tark-example",
        "three individuals learn p on the subjunctive conditional agenda; majority judgments "
        "before and after, cell by cell");
    tark_cmd->fallthrough();
    std::string rp_op;
    tark_cmd->add_option("--op", rp_op, "override the revision operator (default: minimal-change "
                                        "hamming protecting the premises)");
    tark_cmd->callback([&] {
        const agenda ag = subjunctive_conditional_agenda();
        std::optional<revision_operator> op_override;
        std::string op_spec;
        if (!rp_op.empty()) {
            op_override = resolve_operator(ag, rp_op, bare_policy(ag));
            op_spec = op_override->spec();
        } else if (tie == "prose") {
            op_override = revision_operator::hamming(ag, tie_policy::protect_conclusion(ag));
            op_spec = op_override->spec();
        } else {
            op_spec = revision_operator::hamming(ag, tie_policy::protect_premises(ag)).spec();
        }
        const repro_report rep = repro_tark_example(op_override);
        if (json_output) {
            const json ag_block = agenda_json(ag, "cond-subjunctive");
            json body = repro_json(ag, rep);
            body["operator"] = op_spec;
            body["rule"] = "majority";
            emit_json(&ag_block, std::move(body));
        } else {
            out << "agenda cond-subjunctive  [" << fingerprint_hex(ag) << "]  operator " << op_spec
                << "\n";
            render_repro(out, ag, rep);
        }
        exit_code = rep.pass ? 0 : 1;
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const semantic_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_limit_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}

} // namespace dynagg
