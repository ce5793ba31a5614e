#include "amn/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "amn/autonomy.hpp"
#include "amn/dsl.hpp"
#include "amn/model.hpp"
#include "amn/render.hpp"
#include "amn/simulator.hpp"
#include "amn/span.hpp"
#include "amn/validator.hpp"
#include "amn/value.hpp"

namespace amn {

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

// Exit codes, kept in one place so every handler agrees.
constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

// Color is used only for severity words in text diagnostics, only when
// writing to a terminal, and never when AMN_NO_COLOR is set.
bool color_enabled() {
    if (std::getenv("AMN_NO_COLOR") != nullptr) return false;
    return isatty(fileno(stderr)) != 0;
}

void print_diagnostic(const Diagnostic& d, std::ostream& os, bool color) {
    if (!color) {
        os << format_diagnostic(d) << "\n";
    } else {
        const char* tint = d.severity == Severity::Error ? "\x1b[31m" : "\x1b[33m";
        os << d.span.file << ":" << d.span.start.line << ":" << d.span.start.col << ": " << tint
           << severity_name(d.severity) << "\x1b[0m " << d.code << " " << d.message << "\n";
    }
    for (const auto& r : d.related) {
        os << "    related: " << r.file << ":" << r.start.line << ":" << r.start.col << "\n";
    }
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& os) {
    const bool color = color_enabled();
    for (const auto& d : diags) print_diagnostic(d, os, color);
}

ordered_json span_json(const SourceSpan& s) {
    return ordered_json{
        {"file", s.file},
        {"start", {{"line", s.start.line}, {"col", s.start.col}}},
        {"end", {{"line", s.end.line}, {"col", s.end.col}}},
    };
}

ordered_json diagnostic_json(const Diagnostic& d) {
    ordered_json j;
    j["code"] = d.code;
    j["severity"] = severity_name(d.severity);
    j["message"] = d.message;
    j["file"] = d.span.file;
    j["start"] = {{"line", d.span.start.line}, {"col", d.span.start.col}};
    j["end"] = {{"line", d.span.end.line}, {"col", d.span.end.col}};
    j["related"] = ordered_json::array();
    for (const auto& r : d.related) j["related"].push_back(span_json(r));
    return j;
}

// Loads and parses a model file. Parse errors are printed and turn into exit
// kExitFindings; warnings are printed and execution continues. Returns the
// exit code to propagate, or nullopt when the caller may proceed.
struct LoadedModel {
    Model model;
    std::string text;
};

std::optional<int> load_model(const std::string& path, std::ostream& err, LoadedModel& out) {
    auto text = read_file(path);
    if (!text) {
        err << "amn: cannot read " << path << "\n";
        return kExitUsage;
    }
    ParseResult pr = parse(*text, path);
    if (!pr.diagnostics.empty()) print_diagnostics(pr.diagnostics, err);
    if (has_errors(pr.diagnostics)) return kExitFindings;
    out.model = std::move(pr.model);
    out.text = std::move(*text);
    return std::nullopt;
}

int emit_text(const std::string& text, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
    if (out_path.empty()) {
        out << text;
        return kExitOk;
    }
    if (!write_file(out_path, text)) {
        err << "amn: cannot write " << out_path << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_fmt(const std::string& path, bool check, std::ostream& out, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "amn: cannot read " << path << "\n";
        return kExitUsage;
    }
    FmtResult fr = fmt(*text, path);
    if (!fr.ok) {
        print_diagnostics(fr.diagnostics, err);
        return kExitFindings;
    }
    if (check) {
        if (fr.text == *text) return kExitOk;
        err << path << ": not in canonical form\n";
        return kExitFindings;
    }
    out << fr.text;
    return kExitOk;
}

int cmd_validate(const std::string& path, const std::string& format, std::ostream& out,
                 std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "amn: cannot read " << path << "\n";
        return kExitUsage;
    }
    ParseResult pr = parse(*text, path);
    std::vector<Diagnostic> diags = pr.diagnostics;
    std::vector<Diagnostic> vd = validate(pr.model);
    diags.insert(diags.end(), vd.begin(), vd.end());
    sort_diagnostics(diags);

    int errors = 0;
    int warnings = 0;
    for (const auto& d : diags) (d.severity == Severity::Error ? errors : warnings)++;

    if (format == "json") {
        ordered_json doc;
        doc["schema"] = "amn.diagnostics/1";
        doc["file"] = path;
        doc["errors"] = errors;
        doc["warnings"] = warnings;
        doc["diagnostics"] = ordered_json::array();
        for (const auto& d : diags) doc["diagnostics"].push_back(diagnostic_json(d));
        out << doc.dump(2) << "\n";
    } else if (!diags.empty()) {
        const bool color = color_enabled();
        for (const auto& d : diags) print_diagnostic(d, out, color);
    }
    return errors > 0 ? kExitFindings : kExitOk;
}

ordered_json profile_json(const InteractionProfile& p) {
    ordered_json j;
    j["decision_authority"] = authority_name(p.decision_authority);
    j["veto"] = veto_name(p.veto);
    j["candidate_flow"] = candidate_flow_name(p.candidate_flow);
    j["notification"] = notification_level_name(p.notification);
    j["task_transfer"] = task_transfer_name(p.task_transfer);
    j["monitoring"] = monitoring_name(p.monitoring);
    j["executor"] = executor_name(p.executor);
    j["random_delegation"] = p.random_delegation;
    return j;
}

int cmd_classify(const std::string& path, const std::string& human, const std::string& machine,
                 const std::string& format, std::ostream& out, std::ostream& err) {
    LoadedModel lm;
    if (auto rc = load_model(path, err, lm)) return *rc;

    auto features = extract_features(lm.model, human, machine);
    if (!ok(features)) {
        err << "amn: classify: " << error(features).message << "\n";
        return kExitRuntime;
    }
    const InteractionProfile& profile = value(features);
    LevelResult levels = classify_level(profile);
    auto pattern = classify_pattern(lm.model);

    if (format == "json") {
        ordered_json doc;
        doc["schema"] = "amn.classify/1";
        if (ok(pattern) && value(pattern).pattern) {
            doc["pattern"] = pattern_name(*value(pattern).pattern);
        } else {
            doc["pattern"] = nullptr;
        }
        doc["levels"] = levels.levels;
        doc["profile"] = profile_json(profile);
        doc["approximate"] = levels.approximate;
        out << doc.dump(2) << "\n";
        return kExitOk;
    }

    if (!ok(pattern)) {
        out << "pattern: unavailable (" << error(pattern).message << ")\n";
    } else if (value(pattern).pattern) {
        out << "pattern: " << pattern_name(*value(pattern).pattern);
        if (!value(pattern).detail.empty()) out << " (" << value(pattern).detail << ")";
        out << "\n";
    } else {
        out << "pattern: composite";
        if (!value(pattern).detail.empty()) out << " (" << value(pattern).detail << ")";
        out << "\n";
    }
    out << "levels:";
    for (int l : levels.levels) out << " " << l;
    if (levels.approximate) out << " (approximate)";
    out << "\n";
    out << "profile:\n";
    out << "  decision_authority: " << authority_name(profile.decision_authority) << "\n";
    out << "  veto: " << veto_name(profile.veto) << "\n";
    out << "  candidate_flow: " << candidate_flow_name(profile.candidate_flow) << "\n";
    out << "  notification: " << notification_level_name(profile.notification) << "\n";
    out << "  task_transfer: " << task_transfer_name(profile.task_transfer) << "\n";
    out << "  monitoring: " << monitoring_name(profile.monitoring) << "\n";
    out << "  executor: " << executor_name(profile.executor) << "\n";
    out << "  random_delegation: " << (profile.random_delegation ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_scaffold(int level, const std::string& out_path, std::ostream& out, std::ostream& err) {
    Model m = scaffold_level(level);
    return emit_text(print(m), out_path, out, err);
}

int cmd_simulate(const std::string& path, int ticks, std::uint64_t seed,
                 const std::string& inject_path, const std::string& trace_path,
                 bool check_conformance, std::ostream& out, std::ostream& err) {
    LoadedModel lm;
    if (auto rc = load_model(path, err, lm)) return *rc;

    std::vector<InjectedAction> schedule;
    if (!inject_path.empty()) {
        auto text = read_file(inject_path);
        if (!text) {
            err << "amn: cannot read " << inject_path << "\n";
            return kExitUsage;
        }
        InjectionParse ip = parse_injections(*text, inject_path);
        if (!ip.diagnostics.empty()) print_diagnostics(ip.diagnostics, err);
        if (has_errors(ip.diagnostics)) return kExitFindings;
        schedule = std::move(ip.schedule);
    }

    SimResult<Trace> r = run(lm.model, seed, ticks, schedule);
    if (!sim_ok(r)) {
        const SimError& e = sim_error(r);
        if (e.kind == SimError::Kind::ValidationRequired) {
            std::vector<Diagnostic> diags = validate(lm.model);
            print_diagnostics(diags, err);
            return kExitFindings;
        }
        err << "amn: simulate: " << e.message << "\n";
        return kExitRuntime;
    }
    const Trace& trace = sim_value(r);

    if (int rc = emit_text(to_jsonl(trace), trace_path, out, err); rc != kExitOk) return rc;

    if (check_conformance) {
        SimResult<ConformanceReport> cr = check_trace(trace, lm.model);
        if (!sim_ok(cr)) {
            err << "amn: conformance: " << sim_error(cr).message << "\n";
            return kExitRuntime;
        }
        const ConformanceReport& report = sim_value(cr);
        if (!report.ok()) {
            for (const auto& ch : report.channels) {
                if (!ch.flagged) continue;
                err << "conformance: " << ch.channel_text << ": declared "
                    << format_number(ch.declared) << ", measured " << format_number(ch.measured)
                    << " (" << ch.followed << " of " << ch.delivered << " followed)\n";
            }
            if (!report.always_discipline_ok)
                err << "conformance: committed decisions outnumber always-mode notifications\n";
            if (!report.on_request_discipline_ok)
                err << "conformance: notifications sent ahead of requests\n";
            for (const auto& n : report.notes) err << "conformance note: " << n << "\n";
            return kExitFindings;
        }
    }
    return kExitOk;
}

int cmd_render(const std::string& path, const std::string& out_path, bool legend_only,
               std::optional<int> collapse, bool show_behavior, const std::string& badges,
               std::ostream& out, std::ostream& err) {
    RenderOptions opts;
    opts.show_behavior = show_behavior;
    opts.collapse_below_depth = collapse;
    opts.badge_style = badges == "words" ? BadgeStyle::Words : BadgeStyle::ShortCodes;

    if (legend_only) return emit_text(legend(opts), out_path, out, err);

    if (path.empty()) {
        err << "amn: render: a model file is required (or pass --legend)\n";
        return kExitUsage;
    }
    LoadedModel lm;
    if (auto rc = load_model(path, err, lm)) return *rc;

    RenderResult rr = to_dot(lm.model, opts);
    if (!rr.ok) {
        print_diagnostics(rr.diagnostics, err);
        return kExitFindings;
    }
    return emit_text(rr.text, out_path, out, err);
}

} // namespace

const char* cli_version() { return kVersion; }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tooling for agent interaction models: format, check, classify, "
                 "simulate, and draw them."};
    app.name("amn");
    app.set_version_flag("--version", std::string("amn ") + kVersion);
    app.require_subcommand(1);

    // fmt
    std::string fmt_file;
    bool fmt_check = false;
    CLI::App* fmt_cmd = app.add_subcommand("fmt", "Rewrite a model file in canonical form");
    fmt_cmd->add_option("file", fmt_file, "model file")->required()->check(CLI::ExistingFile);
    fmt_cmd->add_flag("--check", fmt_check, "report (exit 1) instead of printing when the file "
                                            "is not canonical");

    // validate
    std::string val_file;
    std::string val_format = "text";
    CLI::App* val_cmd = app.add_subcommand("validate", "Run all model checks and report findings");
    val_cmd->add_option("file", val_file, "model file")->required()->check(CLI::ExistingFile);
    val_cmd->add_option("--format", val_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));

    // classify
    std::string cls_file;
    std::string cls_human;
    std::string cls_machine;
    std::string cls_format = "text";
    CLI::App* cls_cmd =
        app.add_subcommand("classify", "Report the autonomy levels and interaction pattern of a "
                                       "human-machine pair");
    cls_cmd->add_option("file", cls_file, "model file")->required()->check(CLI::ExistingFile);
    cls_cmd->add_option("--human", cls_human, "path of the human-side agent")->required();
    cls_cmd->add_option("--machine", cls_machine, "path of the machine-side agent")->required();
    cls_cmd->add_option("--format", cls_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));

    // scaffold
    int sc_level = 0;
    std::string sc_out;
    CLI::App* sc_cmd =
        app.add_subcommand("scaffold", "Generate a minimal model sitting at a given autonomy "
                                       "level");
    sc_cmd->add_option("--level", sc_level, "autonomy level")
        ->required()
        ->check(CLI::Range(1, 20));
    sc_cmd->add_option("-o,--output", sc_out, "write to a file instead of stdout");

    // simulate
    std::string sim_file;
    int sim_ticks = 100;
    std::uint64_t sim_seed = 0;
    std::string sim_inject;
    std::string sim_trace;
    bool sim_conf = false;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Execute a model and print its event "
                                                       "trace as JSON lines");
    sim_cmd->add_option("file", sim_file, "model file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--ticks", sim_ticks, "maximum ticks to run")
        ->check(CLI::Range(0, 1000000));
    sim_cmd->add_option("--seed", sim_seed, "random seed");
    sim_cmd->add_option("--inject", sim_inject, "file of externally injected actions")
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("--trace", sim_trace, "write the trace to a file instead of stdout");
    sim_cmd->add_flag("--check-conformance", sim_conf,
                      "after the run, compare observed channel behavior against declared "
                      "parameters (exit 1 on violations)");

    // render
    std::string ren_file;
    std::string ren_out;
    bool ren_legend = false;
    std::optional<int> ren_collapse;
    bool ren_behavior = false;
    std::string ren_badges = "codes";
    CLI::App* ren_cmd = app.add_subcommand("render", "Draw a model as Graphviz DOT");
    ren_cmd->add_option("file", ren_file, "model file")->check(CLI::ExistingFile);
    ren_cmd->add_option("-o,--output", ren_out, "write to a file instead of stdout");
    ren_cmd->add_flag("--legend", ren_legend, "print the notation legend instead of a model");
    ren_cmd->add_option("--collapse", ren_collapse,
                        "hide agents nested deeper than this level, re-attaching their edges")
        ->check(CLI::Range(0, 1000));
    ren_cmd->add_flag("--show-behavior", ren_behavior, "include rule and state summaries in "
                                                       "node labels");
    ren_cmd->add_option("--badges", ren_badges, "badge style in node labels")
        ->check(CLI::IsMember({"codes", "words"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "amn: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    if (app.got_subcommand(fmt_cmd)) return cmd_fmt(fmt_file, fmt_check, out, err);
    if (app.got_subcommand(val_cmd)) return cmd_validate(val_file, val_format, out, err);
    if (app.got_subcommand(cls_cmd))
        return cmd_classify(cls_file, cls_human, cls_machine, cls_format, out, err);
    if (app.got_subcommand(sc_cmd)) return cmd_scaffold(sc_level, sc_out, out, err);
    if (app.got_subcommand(sim_cmd))
        return cmd_simulate(sim_file, sim_ticks, sim_seed, sim_inject, sim_trace, sim_conf, out,
                            err);
    if (app.got_subcommand(ren_cmd))
        return cmd_render(ren_file, ren_out, ren_legend, ren_collapse, ren_behavior, ren_badges,
                          out, err);

    err << "amn: no subcommand given\n\n" << app.help();
    return kExitUsage;
}

} // namespace amn
