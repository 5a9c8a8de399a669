// Copyright 2026 The chainlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

using namespace chainlogic;
using namespace chainlogic::cli;
using ojson = nlohmann::ordered_json;

namespace {

struct Flags {
    std::string config;
    bool json = false;
    bool no_prune = false;
    std::string demo;
    std::string setting;
    bool both = false;
    bool maximize_s4 = false;
    std::string format;
    std::string out;
};

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

std::string sci(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

std::string tol_text(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

/// Shortest round-trip representation, matching the JSON serializer.
std::string exact(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

std::string complex_text(Complex z) {
    if (z.imag() == 0.0) {
        return fixed6(z.real());
    }
    return fixed6(z.real()) + (z.imag() < 0 ? " - " : " + ") + fixed6(std::abs(z.imag())) + "i";
}

std::string join(const std::vector<std::string> &parts, const char *sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); i++) {
        if (i) {
            s += sep;
        }
        s += parts[i];
    }
    return s;
}

ojson complex_json(Complex z) {
    return ojson::array({z.real(), z.imag()});
}

ojson amplitudes_json(const HardyAmplitudes &a) {
    return ojson::array({complex_json(a.a), complex_json(a.b), complex_json(a.c)});
}

ojson no_signaling_json(const NoSignalingReport &r) {
    return ojson{{"max_discrepancy", r.max_discrepancy}, {"tol", r.tol}, {"intact", r.intact}};
}

ScenarioConfig load(const Flags &f, std::ostream &err) {
    ScenarioConfig cfg = f.config.empty() ? default_config() : load_config(f.config);
    for (const auto &w : cfg.warnings) {
        err << w << "\n";
    }
    return cfg;
}

std::string amplitudes_text(const HardyAmplitudes &a) {
    return "a = " + complex_text(a.a) + ", b = " + complex_text(a.b) + ", c = " + complex_text(a.c);
}

// consistency -----------------------------------------------------------------

int cmd_consistency(const Flags &f, std::ostream &out, std::ostream &err) {
    ScenarioConfig cfg = load(f, err);
    std::optional<HistoryFamily> family;
    std::optional<ConsistencyReport> report;
    std::string source;
    if (!f.demo.empty()) {
        family = xzx_demo_family();
        report = consistency_matrix(*family, cfg.tol.consistency);
        source = "demo:xzx";
    } else {
        HardyScenario s = build_measurement_scenario(cfg.amplitudes, cfg.options(!f.no_prune));
        family = s.tree.family();
        report = s.consistency;
        source = std::string("hardy:") + to_string(cfg.mode);
    }
    const auto &hs = family->histories();
    auto diag = [&](std::size_t k) {
        return report->matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
    };
    int code = report->consistent ? exit_ok : exit_inconsistent;

    if (f.json) {
        ojson j{{"schema", 1}, {"command", "consistency"}, {"source", source}, {"dim", family->grid().dim()}};
        j["tol"] = report->tol;
        j["consistent"] = report->consistent;
        if (report->worst_offdiag.has_value()) {
            const auto &w = *report->worst_offdiag;
            j["worst_offdiag"] = ojson{
                {"g", w.g},
                {"k", w.k},
                {"magnitude", w.magnitude},
                {"g_path", hs[w.g].labels()},
                {"k_path", hs[w.k].labels()},
            };
        } else {
            j["worst_offdiag"] = nullptr;
        }
        ojson rows = ojson::array();
        for (std::size_t k = 0; k < hs.size(); k++) {
            rows.push_back(ojson{{"path", hs[k].labels()}, {"weight", diag(k)}});
        }
        j["histories"] = rows;
        j["exit_code"] = code;
        out << j.dump(2) << "\n";
        return code;
    }

    out << "family: " << source << ", dim " << family->grid().dim() << ", " << hs.size() << " histories\n";
    out << "verdict: " << (report->consistent ? "consistent" : "INCONSISTENT") << " (tol " << tol_text(report->tol)
        << ")\n";
    if (report->worst_offdiag.has_value()) {
        const auto &w = *report->worst_offdiag;
        out << "worst off-diagonal: |M[" << w.g << "][" << w.k << "]| = " << fixed6(w.magnitude) << " ("
            << sci(w.magnitude) << ")\n";
        out << "  g: " << join(hs[w.g].labels(), " -> ") << "\n";
        out << "  k: " << join(hs[w.k].labels(), " -> ") << "\n";
    } else {
        out << "worst off-diagonal: none (single history)\n";
    }
    out << (report->consistent ? "leaf probabilities:\n" : "diagonal weights (not probabilities):\n");
    for (std::size_t k = 0; k < hs.size(); k++) {
        out << "  " << fixed6(diag(k)) << "  " << join(hs[k].labels(), " -> ") << "\n";
    }
    return code;
}

// hardy -----------------------------------------------------------------------

int cmd_hardy(const Flags &f, std::ostream &out, std::ostream &err) {
    ScenarioConfig cfg = load(f, err);
    HardyScenario s = build_measurement_scenario(cfg.amplitudes, cfg.options(!f.no_prune));
    HardyReport r = verify_hardy_predictions(s, cfg.tol.consistency);
    NoSignalingReport ns = no_signaling_report(s, cfg.tol.consistency);
    int code = r.is_hardy ? exit_ok : exit_not_hardy;

    if (f.json) {
        ojson stmts = ojson::array();
        for (const auto &st : r.statements) {
            stmts.push_back(ojson{
                {"name", st.name}, {"description", st.description}, {"probability", st.probability}, {"passed", st.passed}});
        }
        ojson j{
            {"schema", 1},
            {"command", "hardy"},
            {"mode", to_string(cfg.mode)},
            {"amplitudes", amplitudes_json(cfg.amplitudes)},
            {"statements", stmts},
            {"strict_hardy", r.strict_hardy},
            {"is_hardy", r.is_hardy},
            {"no_signaling", no_signaling_json(ns)},
            {"exit_code", code},
        };
        out << j.dump(2) << "\n";
        return code;
    }

    out << "state: " << amplitudes_text(cfg.amplitudes) << "  (" << to_string(cfg.mode) << " mode)\n";
    for (const auto &st : r.statements) {
        out << "  " << st.name << "  " << fixed6(st.probability) << "  " << (st.passed ? "pass" : "FAIL") << "  "
            << st.description << "\n";
    }
    out << "no-signaling: max marginal discrepancy " << sci(ns.max_discrepancy) << " ("
        << (ns.intact ? "intact" : "VIOLATED") << ", tol " << tol_text(ns.tol) << ")\n";
    if (!r.strict_hardy) {
        err << "chainlogic: not a Hardy state: a, b and c must all be nonzero\n";
    } else if (!r.is_hardy) {
        err << "chainlogic: Hardy predictions not reproduced\n";
    }
    return code;
}

// counterfactual --------------------------------------------------------------

std::string verdict_line(const CounterfactualVerdict &v) {
    if (v.kind == VerdictKind::possible) {
        const PivotOutcomes *worst = nullptr;
        for (const auto &p : v.pivot_paths) {
            if (worst == nullptr || p.probability_of("MR2-") > worst->probability_of("MR2-")) {
                worst = &p;
            }
        }
        if (worst == nullptr) {
            return "possible";
        }
        return "possible: P(MR2-|" + worst->pivot.path.back() + " path) = " + fixed6(worst->probability_of("MR2-"));
    }
    double p = 1.0;
    for (const auto &path : v.pivot_paths) {
        p = std::min(p, path.probability_of(v.outcome));
    }
    if (v.kind == VerdictKind::impossible) {
        p = 0.0;
        for (const auto &path : v.pivot_paths) {
            p = std::max(p, path.probability_of(v.outcome));
        }
    }
    return std::string(to_string(v.kind)) + "(" + v.outcome + "), p = " + fixed6(p);
}

ojson verdict_json(LeftSetting setting, const CounterfactualVerdict &v) {
    ojson paths = ojson::array();
    for (const auto &p : v.pivot_paths) {
        ojson outcomes = ojson::object();
        for (const auto &o : p.outcomes) {
            outcomes[o.outcome] = o.probability;
        }
        paths.push_back(ojson{{"path", p.pivot.path}, {"probability", p.pivot.probability}, {"outcomes", outcomes}});
    }
    return ojson{
        {"setting", to_string(setting)},
        {"verdict", to_string(v.kind)},
        {"outcome", v.outcome.empty() ? ojson(nullptr) : ojson(v.outcome)},
        {"pivot_paths", paths},
    };
}

void print_verdict(std::ostream &out, LeftSetting setting, const CounterfactualVerdict &v) {
    out << "SR under " << to_string(setting) << ": " << verdict_line(v) << "\n";
    for (const auto &p : v.pivot_paths) {
        out << "  pivot " << join(p.pivot.path, " -> ") << " (p = " << fixed6(p.pivot.probability) << "):";
        for (const auto &o : p.outcomes) {
            out << " P(" << o.outcome << ") = " << fixed6(o.probability);
        }
        out << "\n";
    }
}

int cmd_counterfactual(const Flags &f, std::ostream &out, std::ostream &err) {
    if (f.setting.empty() && !f.both) {
        err << "chainlogic: counterfactual needs --setting ML1|ML2 or --both\n";
        return exit_usage;
    }
    ScenarioConfig cfg = load(f, err);
    if (!cfg.amplitudes.is_strict()) {
        throw NotHardyStateError("counterfactual: a, b and c must all be nonzero");
    }
    HardyScenario s = build_measurement_scenario(cfg.amplitudes, cfg.options());

    if (f.both) {
        LocalityReport r = locality_report(s);
        if (f.json) {
            ojson j{
                {"schema", 1},
                {"command", "counterfactual"},
                {"results", ojson::array({verdict_json(LeftSetting::ml1, r.under_ml1), verdict_json(LeftSetting::ml2, r.under_ml2)})},
                {"locality",
                 ojson{{"nonlocality_demonstrated", r.nonlocality_demonstrated}, {"no_signaling", no_signaling_json(r.no_signaling)}}},
                {"exit_code", exit_ok},
            };
            out << j.dump(2) << "\n";
            return exit_ok;
        }
        print_verdict(out, LeftSetting::ml1, r.under_ml1);
        print_verdict(out, LeftSetting::ml2, r.under_ml2);
        std::string ns = r.no_signaling.intact
                             ? "no-signaling intact: max marginal discrepancy < " + tol_text(r.no_signaling.tol)
                             : "NO-SIGNALING VIOLATED: max marginal discrepancy " + sci(r.no_signaling.max_discrepancy);
        out << (r.nonlocality_demonstrated ? "NONLOCALITY DEMONSTRATED" : "nonlocality not demonstrated") << " (" << ns
            << ")\n";
        return exit_ok;
    }

    LeftSetting setting = f.setting == "ML1" ? LeftSetting::ml1 : LeftSetting::ml2;
    CounterfactualVerdict v = evaluate_sr(s, setting);
    if (f.json) {
        ojson j{
            {"schema", 1},
            {"command", "counterfactual"},
            {"results", ojson::array({verdict_json(setting, v)})},
            {"exit_code", exit_ok},
        };
        out << j.dump(2) << "\n";
        return exit_ok;
    }
    print_verdict(out, setting, v);
    return exit_ok;
}

// sweep -----------------------------------------------------------------------

std::string sr_cell(const CounterfactualVerdict &v) {
    if (v.kind == VerdictKind::possible) {
        return "possible";
    }
    return std::string(to_string(v.kind)) + "(" + v.outcome + ")";
}

int cmd_sweep(const Flags &f, std::ostream &out, std::ostream &err) {
    ScenarioConfig cfg = load(f, err);
    if (!cfg.sweep.has_value()) {
        err << "chainlogic: config field '/sweep': missing (sweep needs a sweep spec)\n";
        return exit_usage;
    }
    const SweepSpec &spec = *cfg.sweep;
    std::vector<HardyAmplitudes> triples;
    for (double b : spec.b_values) {
        triples.push_back(family_member(*spec.family, b));
    }
    triples.insert(triples.end(), spec.triples.begin(), spec.triples.end());
    bool family_only = triples.empty() && f.maximize_s4 && spec.family.has_value();
    if (triples.empty() && !family_only) {
        err << "chainlogic: config field '/sweep': empty sweep\n";
        return exit_usage;
    }
    ScenarioOptions options = cfg.options();
    std::vector<SweepRow> rows = parameter_sweep(triples, options);

    std::optional<S4Maximum> maximum;
    if (f.maximize_s4) {
        if (spec.family.has_value()) {
            maximum = maximize_s4(*spec.family, options);
        } else {
            const SweepRow &best = max_s4_row(rows);
            maximum = S4Maximum{std::nan(""), best.amplitudes, best.s4};
        }
    }

    std::string format = f.json ? "json" : (f.format.empty() ? "text" : f.format);
    if (format == "json") {
        ojson jrows = ojson::array();
        for (const auto &r : rows) {
            jrows.push_back(ojson{
                {"amplitudes", amplitudes_json(r.amplitudes)},
                {"s4", r.s4},
                {"p_mr2_plus_given_ml2_plus", r.mr2_plus_given_ml2_plus},
                {"sr_ml1", sr_cell(r.sr_ml1)},
                {"sr_ml2", sr_cell(r.sr_ml2)},
                {"no_signaling_max_discrepancy", r.no_signaling_discrepancy},
            });
        }
        ojson j{
            {"schema", 1},
            {"command", "sweep"},
            {"family", spec.family.has_value() ? ojson(to_string(*spec.family)) : ojson(nullptr)},
            {"rows", jrows},
        };
        if (maximum.has_value()) {
            j["maximum"] = ojson{
                {"parameter", std::isnan(maximum->parameter) ? ojson(nullptr) : ojson(maximum->parameter)},
                {"amplitudes", amplitudes_json(maximum->amplitudes)},
                {"s4", maximum->s4},
            };
        }
        j["exit_code"] = exit_ok;
        out << j.dump(2) << "\n";
        return exit_ok;
    }
    if (format == "csv") {
        out << "a_re,a_im,b_re,b_im,c_re,c_im,s4,p_mr2_plus_given_ml2_plus,sr_ml1,sr_ml2,no_signaling_max_discrepancy\n";
        for (const auto &r : rows) {
            const auto &a = r.amplitudes;
            out << exact(a.a.real()) << "," << exact(a.a.imag()) << "," << exact(a.b.real()) << "," << exact(a.b.imag())
                << "," << exact(a.c.real()) << "," << exact(a.c.imag()) << "," << exact(r.s4) << ","
                << exact(r.mr2_plus_given_ml2_plus) << "," << sr_cell(r.sr_ml1) << "," << sr_cell(r.sr_ml2) << ","
                << exact(r.no_signaling_discrepancy) << "\n";
        }
        if (maximum.has_value()) {
            out << "# max_s4," << exact(maximum->s4) << ",parameter,"
                << (std::isnan(maximum->parameter) ? std::string("") : exact(maximum->parameter)) << "\n";
        }
        return exit_ok;
    }

    if (!rows.empty()) {
        out << "       |a|        |b|        |c|         S4  P(MR2+|ML2+)  SR(ML1)          SR(ML2)   no-signal\n";
        for (const auto &r : rows) {
            const auto &a = r.amplitudes;
            char line[256];
            std::snprintf(
                line, sizeof(line), "  %8.6f   %8.6f   %8.6f   %8.6f      %8.6f  %-16s %-9s %.1e\n", std::abs(a.a),
                std::abs(a.b), std::abs(a.c), r.s4, r.mr2_plus_given_ml2_plus, sr_cell(r.sr_ml1).c_str(),
                sr_cell(r.sr_ml2).c_str(), r.no_signaling_discrepancy);
            out << line;
        }
    }
    if (maximum.has_value()) {
        out << "max S4 = " << fixed6(maximum->s4);
        if (!std::isnan(maximum->parameter)) {
            out << " at b = " << fixed6(maximum->parameter) << " (" << to_string(*spec.family) << ")";
        }
        out << ": " << amplitudes_text(maximum->amplitudes) << "\n";
    }
    return exit_ok;
}

// export ----------------------------------------------------------------------

int cmd_export(const Flags &f, std::ostream &out, std::ostream &err) {
    ScenarioConfig cfg = load(f, err);
    HardyScenario s = build_measurement_scenario(cfg.amplitudes, cfg.options(!f.no_prune));
    ExportFormat format = f.format == "json" ? ExportFormat::json : ExportFormat::dot;
    std::string text = export_tree(s.tree, format);
    if (f.out.empty() || f.out == "-") {
        out << text;
        return exit_ok;
    }
    std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open '" + f.out + "' for writing");
    }
    file << text;
    file.close();
    if (!file) {
        throw IoError("error writing '" + f.out + "'");
    }
    err << "wrote " << s.tree.leaf_count() << "-leaf tree to " << f.out << "\n";
    return exit_ok;
}

}  // namespace

HistoryFamily chainlogic::cli::xzx_demo_family() {
    double h = 1.0 / std::sqrt(2.0);
    StateVector z0{1.0, 0.0};
    StateVector z1{0.0, 1.0};
    StateVector xp{h, h};
    StateVector xm{h, -h};
    struct Outcome {
        const char *label;
        Projector p;
    };
    std::array<Outcome, 2> x{{{"x+", projector_from_span({xp})}, {"x-", projector_from_span({xm})}}};
    std::array<Outcome, 2> z{{{"z0", projector_from_span({z0})}, {"z1", projector_from_span({z1})}}};
    TimeGrid grid = TimeGrid::identity(3, 2);
    std::vector<History> histories;
    for (const auto &e1 : x) {
        for (const auto &e2 : z) {
            for (const auto &e3 : x) {
                histories.emplace_back(
                    grid,
                    std::vector<HistoryEvent>{
                        {1, e1.label, e1.p, std::nullopt},
                        {2, e2.label, e2.p, std::nullopt},
                        {3, e3.label, e3.p, std::nullopt},
                    });
            }
        }
    }
    return HistoryFamily(grid, DensityOperator::from_state(z0), std::move(histories), true);
}

int chainlogic::cli::run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Consistent-histories reasoning about Hardy's two-qubit nonlocality setup.", "chainlogic"};
    app.require_subcommand(1, 1);
    Flags f;

    auto add_config = [&](CLI::App *sub) {
        sub->add_option("--config", f.config, "Scenario config (JSON, schema 1); defaults to equal amplitudes");
    };
    auto add_json = [&](CLI::App *sub) { sub->add_flag("--json", f.json, "Machine-readable JSON report"); };
    auto add_no_prune = [&](CLI::App *sub) {
        sub->add_flag("--no-prune", f.no_prune, "Keep zero-probability branches as ordinary leaves");
    };

    CLI::App *consistency = app.add_subcommand("consistency", "Consistency verdict and leaf probabilities");
    add_config(consistency);
    add_json(consistency);
    add_no_prune(consistency);
    consistency->add_option("--demo", f.demo, "Built-in demo family instead of the config")
        ->check(CLI::IsMember({"xzx"}));

    CLI::App *hardy = app.add_subcommand("hardy", "Hardy statements S1-S4 and the no-signaling check");
    add_config(hardy);
    add_json(hardy);
    add_no_prune(hardy);

    CLI::App *counterfactual = app.add_subcommand("counterfactual", "Evaluate the counterfactual SR");
    add_config(counterfactual);
    add_json(counterfactual);
    auto *setting = counterfactual->add_option("--setting", f.setting, "Left-side setting")
                        ->check(CLI::IsMember({"ML1", "ML2"}));
    counterfactual->add_flag("--both", f.both, "Evaluate under both left settings and report locality")
        ->excludes(setting);

    CLI::App *sweep = app.add_subcommand("sweep", "Sweep amplitude triples from the config's sweep spec");
    add_config(sweep);
    add_json(sweep);
    sweep->add_flag("--maximize-s4", f.maximize_s4, "Also report the S4 maximizer over the family");
    sweep->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));

    CLI::App *exporter = app.add_subcommand("export", "Write the framework tree as DOT or JSON");
    add_config(exporter);
    add_no_prune(exporter);
    exporter->add_option("--format", f.format, "Output format (default dot)")->check(CLI::IsMember({"dot", "json"}));
    exporter->add_option("--out", f.out, "Output path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (consistency->parsed()) {
            return cmd_consistency(f, out, err);
        }
        if (hardy->parsed()) {
            return cmd_hardy(f, out, err);
        }
        if (counterfactual->parsed()) {
            return cmd_counterfactual(f, out, err);
        }
        if (sweep->parsed()) {
            return cmd_sweep(f, out, err);
        }
        return cmd_export(f, out, err);
    } catch (const ConfigError &e) {
        err << "chainlogic: " << e.what() << "\n";
        return exit_usage;
    } catch (const IoError &e) {
        err << "chainlogic: " << e.what() << "\n";
        return exit_io;
    } catch (const FrameworkViolationError &e) {
        err << "chainlogic: " << e.what() << "\n";
        return exit_inconsistent;
    } catch (const NotHardyStateError &e) {
        err << "chainlogic: not a Hardy state: " << e.what() << "\n";
        return exit_not_hardy;
    } catch (const DegenerateBasisError &e) {
        err << "chainlogic: not a Hardy state: " << e.what() << "\n";
        return exit_not_hardy;
    } catch (const std::exception &e) {
        err << "chainlogic: internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
