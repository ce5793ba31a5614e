#include <algorithm>

#include "amn/dsl.hpp"

namespace amn {
namespace {

/// Canonical text emitter. Layout is fixed so that structurally equal models
/// produce byte-identical output: globals first (sorted by name), then root
/// agents in document order, then connections in canonical sort order.
struct Printer {
    std::string out;

    void line(int indent, const std::string& text) {
        out.append(static_cast<std::size_t>(indent) * 2, ' ');
        out += text;
        out += "\n";
    }

    static std::string percent(double fraction) { return format_number(fraction * 100.0) + "%"; }

    static std::string objspec_text(const EventObjectSpec& o) {
        std::string s = o.spec.to_text();
        s += "/";
        if (o.quant) s += quant_name(*o.quant);
        else if (o.quant_word) s += *o.quant_word;
        else s += "unknown";
        if (o.media) s += " @ " + o.media->to_text();
        return s;
    }

    static std::string pattern_text(const EventPattern& p) {
        std::string s = p.spec.to_text();
        if (p.quant) s += std::string("/") + quant_name(*p.quant);
        else if (p.quant_word) s += "/" + *p.quant_word;
        if (p.media) s += " via " + p.media->to_text();
        if (p.sender) s += " from " + *p.sender;
        return s;
    }

    static std::string action_head(const Rule& r) {
        std::string s = "rule " + r.name + " : on " + pattern_text(r.trigger);
        if (r.guard) s += " if " + r.guard->to_text();
        if (r.delegation)
            s += " delegate " + percent(r.delegation->probability) + " " + r.delegation->actuator;
        s += " then";
        return s;
    }

    static std::string inline_action(const Action& a) {
        switch (a.kind) {
            case Action::Kind::Emit: {
                std::string s = "emit " + a.actuator + " " + objspec_text(a.object);
                if (!a.payload.empty()) {
                    s += " with { ";
                    bool first = true;
                    for (const auto& [k, e] : a.payload) {
                        if (!first) s += ", ";
                        first = false;
                        s += k + " = " + e.to_text();
                    }
                    s += " }";
                }
                return s;
            }
            case Action::Kind::SetState:
                return "set " + a.state + " = " + a.value.to_text();
            case Action::Kind::SelectCandidate:
                switch (a.strategy) {
                    case SelectStrategy::UtilityArgmax: return "select utility";
                    case SelectStrategy::First: return "select first";
                    case SelectStrategy::RuleNamed: return "select rule " + a.strategy_rule;
                }
                return "select first";
            case Action::Kind::Commit: return "commit";
            case Action::Kind::AbortPending: return "abort";
            case Action::Kind::StartVetoWindow: return ""; // handled by emit_action
        }
        return "";
    }

    // Emits one action at the given indent; `last` controls the trailing comma.
    void emit_action(int indent, const Action& a, bool last) {
        std::string sep = last ? "" : ",";
        if (a.kind == Action::Kind::StartVetoWindow) {
            line(indent, "window " + std::to_string(a.duration) + " {");
            const Actions& body = a.on_expiry ? *a.on_expiry : Actions{};
            for (std::size_t i = 0; i < body.size(); ++i)
                emit_action(indent + 1, body[i], i + 1 == body.size());
            line(indent, "}" + sep);
            return;
        }
        line(indent, inline_action(a) + sep);
    }

    void emit_rule(int indent, const Rule& r) {
        if (r.actions.size() == 1 && r.actions.front().kind != Action::Kind::StartVetoWindow) {
            line(indent, action_head(r) + " " + inline_action(r.actions.front()));
            return;
        }
        line(indent, action_head(r));
        for (std::size_t i = 0; i < r.actions.size(); ++i)
            emit_action(indent + 1, r.actions[i], i + 1 == r.actions.size());
    }

    void emit_agent(int indent, const AgentDef& a) {
        if (a.kind == AgentKind::GlobalRef) {
            line(indent, "agent " + a.name + ";");
            return;
        }
        std::string head;
        if (a.kind == AgentKind::Calling) head += "calling ";
        head += "agent " + a.name + a.instancing.to_text();

        bool empty = a.sensors.empty() && a.actuators.empty() && a.nature == Nature{} &&
                     a.behavior == Behavior{} && a.children.empty();
        if (empty) {
            line(indent, head + " {}");
            return;
        }
        line(indent, head + " {");
        int in = indent + 1;

        for (const auto& s : a.sensors)
            line(in, "sensor " + s.name + " : " + s.modality.to_text());
        for (const auto& s : a.actuators)
            line(in, "actuator " + s.name + " : " + s.modality.to_text());

        if (a.nature.social) line(in, std::string("social ") + social_name(*a.nature.social));
        if (a.nature.ethical) line(in, std::string("ethics ") + ethical_name(*a.nature.ethical));
        if (a.nature.autonomy_type)
            line(in, std::string("type ") + autonomy_type_name(*a.nature.autonomy_type));
        if (a.nature.archetype)
            line(in, std::string("archetype ") + archetype_name(*a.nature.archetype));
        if (a.nature.functional_type)
            line(in, "functional " + quote_string(*a.nature.functional_type));

        for (const auto& g : a.behavior.goals)
            line(in, "goal " + g.name + " " + std::to_string(g.priority) + " : " + g.target.to_text());
        if (a.behavior.utility) {
            std::string s = "utility ";
            bool first = true;
            for (const auto& t : a.behavior.utility->terms) {
                if (!first) s += ", ";
                first = false;
                s += t.metric + " * " + format_number(t.weight);
            }
            line(in, s);
        }
        for (const auto& r : a.behavior.rules) emit_rule(in, r);
        for (const auto& [name, value] : a.behavior.states)
            line(in, "state " + name + " = " + value.to_text());

        for (const auto& child : a.children) emit_agent(in, child);

        line(indent, "}");
    }

    void emit_connection(const Connection& c) {
        std::string s = c.from.to_text();
        s += c.style == ConnectionStyle::Continuous ? " -> " : " --> ";
        s += c.to.to_text();

        const ChannelParams& p = c.params;
        if (!p.empty()) {
            std::vector<std::string> parts;
            if (p.attention) parts.push_back("attention = " + percent(*p.attention));
            if (p.reliability) parts.push_back("reliability = " + percent(*p.reliability));
            if (p.conformity) parts.push_back("conformity = " + percent(*p.conformity));
            if (p.security) parts.push_back("security = " + percent(*p.security));
            s += " { ";
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) s += ", ";
                s += parts[i];
            }
            s += " }";
        }
        if (!c.carries.empty()) {
            s += " carries ";
            for (std::size_t i = 0; i < c.carries.size(); ++i) {
                if (i) s += ", ";
                s += objspec_text(c.carries[i]);
            }
        }
        line(0, s);
    }
};

} // namespace

std::string print(const Model& m) {
    Printer p;

    for (const auto& [name, def] : m.globals) { // std::map: sorted by name
        p.out += "global ";
        p.emit_agent(0, def);
        p.out += "\n";
    }
    for (const auto& root : m.roots) {
        p.emit_agent(0, root);
        p.out += "\n";
    }

    std::vector<const Connection*> conns;
    conns.reserve(m.connections.size());
    for (const auto& c : m.connections) conns.push_back(&c);
    std::stable_sort(conns.begin(), conns.end(), [](const Connection* a, const Connection* b) {
        return a->canonical_key() < b->canonical_key();
    });
    for (const Connection* c : conns) p.emit_connection(*c);

    return p.out;
}

} // namespace amn
