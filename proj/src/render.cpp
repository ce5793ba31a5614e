#include <algorithm>
#include <numeric>

#include "amn/render.hpp"

#include "amn/ops.hpp"
#include "amn/simulator.hpp" // object_text
#include "amn/validator.hpp"
#include "amn/value.hpp"

namespace amn {

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out;
}

std::string pct(double v) { return format_number(v * 100.0) + "%"; }

// -- badges -----------------------------------------------------------------

const char* social_code(SocialConcept c) {
    switch (c) {
        case SocialConcept::SelfInterested: return "self";
        case SocialConcept::Helpful: return "help";
        case SocialConcept::Cooperative: return "coop";
    }
    return "";
}

const char* ethical_code(EthicalConcept c) {
    switch (c) {
        case EthicalConcept::NonEthical: return "non";
        case EthicalConcept::Implicit: return "impl";
        case EthicalConcept::Explicit: return "expl";
        case EthicalConcept::Full: return "full";
    }
    return "";
}

const char* autonomy_code(AutonomyType t) {
    switch (t) {
        case AutonomyType::Interpretation: return "interp";
        case AutonomyType::KnowHow: return "know";
        case AutonomyType::Plan: return "plan";
        case AutonomyType::Goal: return "goal";
        case AutonomyType::Reasoning: return "reason";
        case AutonomyType::Monitoring: return "mon";
        case AutonomyType::Skill: return "skill";
        case AutonomyType::Resource: return "res";
        case AutonomyType::Condition: return "cond";
    }
    return "";
}

const char* archetype_code(ProcessingArchetype a) {
    switch (a) {
        case ProcessingArchetype::Reflex: return "reflex";
        case ProcessingArchetype::InternalState: return "state";
        case ProcessingArchetype::GoalBased: return "goal";
        case ProcessingArchetype::UtilityBased: return "util";
    }
    return "";
}

std::string badges(const Nature& n, BadgeStyle style) {
    const bool words = style == BadgeStyle::Words;
    std::string out;
    if (n.social)
        out += std::string("[SOC:") +
               (words ? social_name(*n.social) : social_code(*n.social)) + "]";
    if (n.ethical)
        out += std::string("[ETH:") +
               (words ? ethical_name(*n.ethical) : ethical_code(*n.ethical)) + "]";
    if (n.autonomy_type)
        out += std::string("[TYP:") +
               (words ? autonomy_type_name(*n.autonomy_type)
                      : autonomy_code(*n.autonomy_type)) +
               "]";
    if (n.archetype)
        out += std::string("[ARC:") +
               (words ? archetype_name(*n.archetype) : archetype_code(*n.archetype)) +
               "]";
    if (n.functional_type) out += "[FUN:" + *n.functional_type + "]";
    return out;
}

// -- tree emission ----------------------------------------------------------

struct Emitter {
    const Model& m;
    const RenderOptions& opts;
    std::string out;
    // Every deref-expanded agent path -> the node that represents it in the
    // output (itself, or the nearest visible ancestor under collapsing).
    std::map<std::string, std::string> anchor;

    bool visible(int depth) const {
        return !opts.collapse_below_depth || depth <= *opts.collapse_below_depth;
    }

    void indent(int n) { out.append(static_cast<std::size_t>(n) * 2, ' '); }

    // Returns DOT-ready label text: user pieces escaped, lines joined with
    // the two-character \n sequence DOT understands.
    std::string display_label(const AgentDef& def) const {
        std::string label = esc(def.name);
        std::string card = def.instancing.to_text();
        if (!card.empty()) label += " " + esc(card);
        std::string b = badges(def.nature, opts.badge_style);
        if (!b.empty()) label += "\\n" + esc(b);
        if (opts.show_behavior) {
            std::string rules;
            for (const Rule& r : def.behavior.rules)
                rules += (rules.empty() ? "" : ", ") + r.name;
            if (!rules.empty()) label += "\\nrules: " + esc(rules);
            std::string states;
            for (const auto& [name, v] : def.behavior.states)
                states += (states.empty() ? "" : ", ") + name;
            if (!states.empty()) label += "\\nstates: " + esc(states);
        }
        return label;
    }

    // bold: this subtree came from a global definition (reference boundary).
    void emit_agent(const AgentDef& as_written, const std::string& parent,
                    int depth, int ind, bool bold_here) {
        const AgentDef* def = &as_written;
        bool bold = bold_here;
        if (as_written.kind == AgentKind::GlobalRef) {
            auto it = m.globals.find(as_written.name);
            if (it == m.globals.end()) return; // cannot happen post-validation
            def = &it->second;
            bold = true;
        }

        std::string path = parent.empty() ? def->name : parent + "." + def->name;
        std::string self_anchor = visible(depth) ? path : anchor.at(parent);
        anchor.emplace(path, self_anchor);

        bool as_cluster = !def->children.empty() && visible(depth + 1);

        if (visible(depth)) {
            std::string style = def->kind == AgentKind::Calling ? "dashed"
                                : bold                          ? "bold"
                                                                : "solid";
            if (as_cluster) {
                indent(ind);
                out += "subgraph \"cluster_" + esc(path) + "\" {\n";
                indent(ind + 1);
                out += "label=\"" + display_label(*def) + "\";\n";
                indent(ind + 1);
                out += "style=" + style + ";\n";
                indent(ind + 1);
                out += "\"" + esc(path) + "\" [shape=point, width=0.1];\n";
                for (const AgentDef& c : def->children)
                    emit_agent(c, path, depth + 1, ind + 1, false);
                indent(ind);
                out += "}\n";
                return;
            }
            indent(ind);
            out += "\"" + esc(path) + "\" [label=\"" + display_label(*def) +
                   "\", shape=box, style=" + style + "];\n";
        }
        // Hidden (or leaf-rendered) children still need anchors for edges.
        for (const AgentDef& c : def->children)
            emit_agent(c, path, depth + 1, ind, false);
    }

    void emit_edges() {
        std::vector<std::size_t> order(m.connections.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return m.connections[a].canonical_key() < m.connections[b].canonical_key();
        });

        for (std::size_t ci : order) {
            const Connection& c = m.connections[ci];
            auto fa = anchor.find(c.from.path);
            auto ta = anchor.find(c.to.path);
            if (fa == anchor.end() || ta == anchor.end()) continue; // unresolved
            std::string label;
            if (opts.show_params) {
                std::string p;
                auto piece = [&](const char* key, const std::optional<double>& v) {
                    if (!v) return;
                    p += (p.empty() ? "" : " ") + std::string(key) + "=" + pct(*v);
                };
                piece("att", c.params.attention);
                piece("rel", c.params.reliability);
                piece("conf", c.params.conformity);
                piece("sec", c.params.security);
                label += p;
            }
            std::string carried;
            for (const EventObjectSpec& o : c.carries)
                carried += (carried.empty() ? "" : ", ") + esc(object_text(o));
            if (!carried.empty()) label += (label.empty() ? "" : "\\n") + carried;

            indent(1);
            out += "\"" + esc(fa->second) + "\" -> \"" + esc(ta->second) + "\"";
            std::string attrs;
            if (!label.empty()) attrs += "label=\"" + label + "\"";
            if (c.style == ConnectionStyle::Discontinuous)
                attrs += std::string(attrs.empty() ? "" : ", ") + "style=dashed";
            if (!attrs.empty()) out += " [" + attrs + "]";
            out += ";\n";
        }
    }
};

} // namespace

RenderResult to_dot(const Model& m, const RenderOptions& opts) {
    RenderResult res;
    res.diagnostics = validate(m);
    if (has_errors(res.diagnostics)) return res;
    res.diagnostics.clear();

    Emitter e{m, opts, {}, {}};
    e.out += "digraph model {\n";
    e.out += "  rankdir=LR;\n";
    e.out += "  node [shape=box, fontname=\"Helvetica\"];\n";
    e.out += "  edge [fontname=\"Helvetica\", fontsize=10];\n";
    for (const AgentDef& root : m.roots) e.emit_agent(root, "", 1, 1, false);
    e.emit_edges();
    e.out += "}\n";

    res.ok = true;
    res.text = std::move(e.out);
    return res;
}

std::string legend(const RenderOptions& opts) {
    const bool words = opts.badge_style == BadgeStyle::Words;
    std::string out = "digraph legend {\n";
    out += "  rankdir=LR;\n";
    out += "  node [shape=plaintext, fontname=\"Helvetica\"];\n";
    int i = 0;
    auto entry = [&](const std::string& badge, const std::string& meaning) {
        out += "  legend_" + std::to_string(i++) + " [label=\"" +
               esc(badge + "  " + meaning) + "\"];\n";
    };

    for (SocialConcept c : {SocialConcept::SelfInterested, SocialConcept::Helpful,
                            SocialConcept::Cooperative})
        entry(std::string("[SOC:") + (words ? social_name(c) : social_code(c)) + "]",
              std::string("social self-concept: ") + social_name(c));
    for (EthicalConcept c : {EthicalConcept::NonEthical, EthicalConcept::Implicit,
                             EthicalConcept::Explicit, EthicalConcept::Full})
        entry(std::string("[ETH:") + (words ? ethical_name(c) : ethical_code(c)) + "]",
              std::string("ethical self-concept: ") + ethical_name(c));
    for (AutonomyType t :
         {AutonomyType::Interpretation, AutonomyType::KnowHow, AutonomyType::Plan,
          AutonomyType::Goal, AutonomyType::Reasoning, AutonomyType::Monitoring,
          AutonomyType::Skill, AutonomyType::Resource, AutonomyType::Condition})
        entry(std::string("[TYP:") + (words ? autonomy_type_name(t) : autonomy_code(t)) + "]",
              std::string("autonomy type: ") + autonomy_type_name(t));
    for (ProcessingArchetype a :
         {ProcessingArchetype::Reflex, ProcessingArchetype::InternalState,
          ProcessingArchetype::GoalBased, ProcessingArchetype::UtilityBased})
        entry(std::string("[ARC:") + (words ? archetype_name(a) : archetype_code(a)) + "]",
              std::string("processing archetype: ") + archetype_name(a));
    entry("[FUN:tag]", "functional type, as declared");
    entry("name [m..M]", "instance range (multi-instance agent)");
    entry("dashed border", "calling agent (cannot contain sub-agents)");
    entry("bold border", "expanded from a global definition");
    entry("dashed edge", "discontinuous connection");
    out += "}\n";
    return out;
}

} // namespace amn
