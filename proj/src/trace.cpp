#include <cctype>
#include <sstream>

#include "json.hpp"

#include "amn/simulator.hpp"

namespace amn {

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::Emitted: return "emitted";
        case TraceKind::Delivered: return "delivered";
        case TraceKind::Dropped: return "dropped";
        case TraceKind::RuleFired: return "rule_fired";
        case TraceKind::StateChanged: return "state_changed";
        case TraceKind::CandidateSelected: return "candidate_selected";
        case TraceKind::WindowOpened: return "window_opened";
        case TraceKind::WindowVetoed: return "window_vetoed";
        case TraceKind::WindowCommitted: return "window_committed";
        case TraceKind::InstructionFollowed: return "instruction_followed";
        case TraceKind::InstructionIgnored: return "instruction_ignored";
    }
    return "emitted";
}

std::string object_text(const EventObjectSpec& o) {
    std::string s = o.spec.to_text();
    if (o.quant) s += std::string(" / ") + quant_name(*o.quant);
    else if (o.quant_word) s += " / " + *o.quant_word;
    if (o.media) s += " @ " + o.media->to_text();
    return s;
}

std::string to_jsonl(const Trace& t) {
    std::string out;
    for (const TraceEvent& e : t.events) {
        nlohmann::ordered_json j;
        j["tick"] = e.tick;
        j["seq"] = e.seq;
        j["kind"] = trace_kind_name(e.kind);
        j["subject"] = e.subject;
        j["object"] = e.object;
        j["detail"] = e.detail;
        out += j.dump();
        out += '\n';
    }
    return out;
}

InjectionParse parse_injections(const std::string& text, const std::string& filename) {
    InjectionParse out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto diag = [&](int ln, const std::string& msg) {
        SourceSpan span{filename, {ln, 1}, {ln, 1}};
        out.diagnostics.push_back(
            Diagnostic{"AMN-INJ-01", Severity::Error, msg, span, {}});
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> words;
        std::string cur;
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) words.push_back(std::move(cur));
        if (words.empty() || words.front().front() == '#') continue;

        if (words.front().rfind("tick=", 0) != 0) {
            diag(lineno, "an injection line starts with tick=<n>");
            continue;
        }
        std::string num = words.front().substr(5);
        auto n = parse_number(num);
        if (!n || *n < 0 || *n != static_cast<int>(*n)) {
            diag(lineno, "\"" + num + "\" is not a valid tick number");
            continue;
        }
        if (words.size() < 3) {
            diag(lineno, "expected: tick=<n> <agent-path> <action> [args]");
            continue;
        }
        InjectedAction a;
        a.tick = static_cast<int>(*n);
        a.agent = words[1];
        a.action = words[2];
        a.args.assign(words.begin() + 3, words.end());
        out.schedule.push_back(std::move(a));
    }
    sort_diagnostics(out.diagnostics);
    return out;
}

} // namespace amn
