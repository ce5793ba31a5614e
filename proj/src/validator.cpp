#include <set>

#include "amn/validator.hpp"

#include "amn/ops.hpp"

namespace amn {
namespace {

struct Checker {
    const Model& m;
    std::vector<Diagnostic> diags;

    explicit Checker(const Model& model) : m(model) {}

    SourceSpan span_for(const std::string& element_id) const {
        const SourceSpan* s = m.span_of(element_id);
        return s ? *s : SourceSpan{};
    }

    void add(const char* code, Severity sev, std::string msg, const std::string& span_id,
             std::vector<std::string> related_ids = {}) {
        Diagnostic d{code, sev, std::move(msg), span_for(span_id), {}};
        for (const auto& id : related_ids)
            if (const SourceSpan* s = m.span_of(id)) d.related.push_back(*s);
        diags.push_back(std::move(d));
    }

    // Global reference target, or null when the name is not registered.
    const AgentDef* global_def(const std::string& name) const {
        auto it = m.globals.find(name);
        return it == m.globals.end() ? nullptr : &it->second;
    }

    // Resolves a child for checks that read through global references.
    const AgentDef* deref(const AgentDef& a) const {
        const AgentDef* cur = &a;
        for (int depth = 0; cur && cur->kind == AgentKind::GlobalRef && depth < 64; ++depth)
            cur = global_def(cur->name);
        return cur && cur->kind == AgentKind::GlobalRef ? nullptr : cur;
    }

    // ---------------------------------------------------------------------
    // Event object argument checks (shared by emitted and carried objects)

    void check_object_args(const EventObjectSpec& o, const std::string& span_id,
                           const std::string& where) {
        const Specialization& s = o.spec;
        if (s.kind == Specialization::Kind::Generic &&
            (!s.generic_tag || s.generic_tag->empty()))
            add("AMN-DR9-01", Severity::Error,
                "generic object " + where + " has no media tag (write generic(\"tag\"))",
                span_id);
        if (s.kind == Specialization::Kind::Reaction && !s.reaction)
            add("AMN-DR10-01", Severity::Error,
                "reaction object " + where +
                    " does not say which reaction it is (acceptance, refusal, or veto)",
                span_id);
        if (s.kind == Specialization::Kind::Instruction && !s.instruction)
            add("AMN-DR10-02", Severity::Error,
                "instruction object " + where + " has a missing or malformed instruction kind",
                span_id);
        if (s.kind == Specialization::Kind::Notification && !s.notification)
            add("AMN-DR12-01", Severity::Error,
                "notification object " + where +
                    " does not say when it is produced (discretion, on_request, or always)",
                span_id);
        if (!o.quant) {
            std::string msg =
                o.quant_word
                    ? "unknown scope indicator \"" + *o.quant_word + "\" " + where +
                          " (expected single, selection, or all)"
                    : "object " + where + " has no scope indicator (single, selection, or all)";
            add("AMN-DR11-01", Severity::Error, std::move(msg), span_id);
        }
    }

    // ---------------------------------------------------------------------
    // Per-agent checks

    void check_agent(const AgentDef& a, const std::string& spanpath, bool inside_global) {
        const std::string aid = id_agent(spanpath);

        if (a.kind == AgentKind::GlobalRef) {
            if (!global_def(a.name))
                add("AMN-DR1-03", Severity::Error,
                    "\"" + spanpath + "\" refers to global \"" + a.name +
                        "\", which is not defined",
                    aid);
            return; // the definition is checked where it is written
        }

        if (a.kind == AgentKind::Calling && !a.children.empty())
            add("AMN-DR1-02", Severity::Error,
                "calling agent \"" + spanpath + "\" cannot contain child agents", aid);

        if (a.instancing.mode == Instancing::Mode::Multi && a.instancing.max &&
            a.instancing.min > *a.instancing.max)
            add("AMN-DR7-02", Severity::Error,
                "instance range of \"" + spanpath + "\" has minimum " +
                    std::to_string(a.instancing.min) + " above maximum " +
                    std::to_string(*a.instancing.max),
                aid);

        for (const std::string& decl : a.duplicate_decls) {
            std::string what;
            if (decl.rfind("state:", 0) == 0)
                what = "state \"" + decl.substr(6) + "\" is";
            else if (decl == "utility")
                what = "the utility function is";
            else
                what = "the " + decl + " declaration is";
            add("AMN-DR7-01", Severity::Error,
                what + " given more than once in \"" + spanpath +
                    "\"; only the first is kept",
                aid);
        }

        check_duplicate_names(a, spanpath, aid);
        check_social_conflict(a, spanpath, aid);
        check_behavior(a, spanpath, aid);
        if (!inside_global) check_utility_sources(a, spanpath);

        for (const AgentDef& child : a.children)
            check_agent(child, spanpath + "." + child.name, inside_global);
    }

    void check_duplicate_names(const AgentDef& a, const std::string& spanpath,
                               const std::string& aid) {
        auto dup_scan = [&](auto&& names_with_ids, const std::string& what) {
            std::map<std::string, std::string> first; // name -> span id
            for (const auto& [name, id] : names_with_ids) {
                auto [it, fresh] = first.emplace(name, id);
                if (!fresh)
                    add("AMN-GEN-01", Severity::Error,
                        what + " \"" + name + "\" is declared twice in \"" + spanpath + "\"",
                        id, {it->second});
            }
        };

        std::vector<std::pair<std::string, std::string>> items;
        for (const AgentDef& c : a.children)
            items.emplace_back(c.name, id_agent(spanpath + "." + c.name));
        dup_scan(items, "child agent");

        items.clear();
        for (const Interface& s : a.sensors)
            items.emplace_back(s.name, id_iface(spanpath, InterfaceDir::Sensor, s.name));
        dup_scan(items, "sensor");

        items.clear();
        for (const Interface& s : a.actuators)
            items.emplace_back(s.name, id_iface(spanpath, InterfaceDir::Actuator, s.name));
        dup_scan(items, "actuator");

        items.clear();
        for (const Rule& r : a.behavior.rules)
            items.emplace_back(r.name, id_rule(spanpath, r.name));
        dup_scan(items, "rule");

        items.clear();
        for (const Goal& g : a.behavior.goals)
            items.emplace_back(g.name, id_goal(spanpath, g.name));
        dup_scan(items, "goal");

        if (a.behavior.utility) {
            items.clear();
            for (const UtilityTerm& t : a.behavior.utility->terms)
                items.emplace_back(t.metric, id_utility(spanpath));
            dup_scan(items, "utility metric");
        }
        (void)aid;
    }

    void check_social_conflict(const AgentDef& a, const std::string& spanpath,
                               const std::string& aid) {
        if (a.nature.social != SocialConcept::Cooperative || a.children.empty()) return;
        for (const AgentDef& c : a.children) {
            const AgentDef* def = deref(c);
            if (!def || def->nature.social != SocialConcept::SelfInterested) return;
        }
        add("AMN-DR7-03", Severity::Warning,
            "\"" + spanpath +
                "\" presents itself as cooperative but every child is self-interested",
            aid);
    }

    void check_behavior(const AgentDef& a, const std::string& spanpath,
                        const std::string& aid) {
        (void)aid;

        // Goal priorities must be distinct.
        std::map<int, std::string> prio_first; // priority -> goal span id
        for (const Goal& g : a.behavior.goals) {
            auto [it, fresh] = prio_first.emplace(g.priority, id_goal(spanpath, g.name));
            if (!fresh)
                add("AMN-DR5-01", Severity::Error,
                    "goals of \"" + spanpath + "\" share priority " +
                        std::to_string(g.priority),
                    id_goal(spanpath, g.name), {it->second});
        }

        std::set<std::string> rule_names;
        for (const Rule& r : a.behavior.rules) rule_names.insert(r.name);

        auto has_actuator = [&](const std::string& name) {
            return a.find_interface(InterfaceDir::Actuator, name) != nullptr;
        };

        // State names referenced from expressions must be declared.
        auto check_states_in = [&](const Expr& e, const std::string& span_id,
                                   const std::string& where) {
            walk_expr(e, [&](const Expr& node) {
                if (node.kind == Expr::Kind::Var && node.scope == Expr::Scope::State &&
                    !a.behavior.states.count(node.name))
                    add("AMN-DR4-02", Severity::Error,
                        where + " reads state \"" + node.name + "\", which \"" + spanpath +
                            "\" does not declare",
                        span_id);
            });
        };

        for (const Goal& g : a.behavior.goals)
            check_states_in(g.target, id_goal(spanpath, g.name),
                            "the target of goal \"" + g.name + "\"");

        for (const Rule& r : a.behavior.rules) {
            const std::string rid = id_rule(spanpath, r.name);
            const std::string in_rule = "in rule \"" + r.name + "\" of \"" + spanpath + "\"";

            if (r.trigger.quant_word)
                add("AMN-DR11-01", Severity::Error,
                    "unknown scope indicator \"" + *r.trigger.quant_word + "\" " + in_rule +
                        " (expected single, selection, or all)",
                    rid);

            if (r.guard)
                check_states_in(*r.guard, rid, "the condition of rule \"" + r.name + "\"");

            if (r.delegation && !has_actuator(r.delegation->actuator))
                add("AMN-DR4-01", Severity::Error,
                    "rule \"" + r.name + "\" delegates through actuator \"" +
                        r.delegation->actuator + "\", which \"" + spanpath +
                        "\" does not declare",
                    rid);

            walk_actions(r.actions, [&](const Action& act) {
                switch (act.kind) {
                    case Action::Kind::Emit:
                        if (!has_actuator(act.actuator))
                            add("AMN-DR4-01", Severity::Error,
                                "rule \"" + r.name + "\" emits through actuator \"" +
                                    act.actuator + "\", which \"" + spanpath +
                                    "\" does not declare",
                                rid);
                        check_object_args(act.object, rid, in_rule);
                        for (const auto& [key, e] : act.payload)
                            check_states_in(e, rid, "the payload field \"" + key +
                                                        "\" of rule \"" + r.name + "\"");
                        break;
                    case Action::Kind::SetState:
                        if (!a.behavior.states.count(act.state))
                            add("AMN-DR4-02", Severity::Error,
                                "rule \"" + r.name + "\" sets state \"" + act.state +
                                    "\", which \"" + spanpath + "\" does not declare",
                                rid);
                        check_states_in(act.value, rid,
                                        "the value written by rule \"" + r.name + "\"");
                        break;
                    case Action::Kind::SelectCandidate:
                        if (act.strategy == SelectStrategy::RuleNamed &&
                            !rule_names.count(act.strategy_rule))
                            add("AMN-DR4-03", Severity::Error,
                                "rule \"" + r.name + "\" selects by rule \"" +
                                    act.strategy_rule + "\", which \"" + spanpath +
                                    "\" does not declare",
                                rid);
                        break;
                    case Action::Kind::StartVetoWindow:
                        if (act.duration < 1)
                            add("AMN-DR4-04", Severity::Error,
                                "rule \"" + r.name + "\" opens a window of " +
                                    std::to_string(act.duration) +
                                    " ticks; windows last at least one tick",
                                rid);
                        break;
                    case Action::Kind::Commit:
                    case Action::Kind::AbortPending:
                        break;
                }
            });
        }
    }

    // A utility term needs a source for its readings: a state of the same
    // name or an inbound connection carrying metric objects. Agents inside
    // global definitions are skipped: their wiring depends on where each
    // reference is placed.
    void check_utility_sources(const AgentDef& a, const std::string& path) {
        if (!a.behavior.utility) return;
        bool metric_inbound = false;
        for (const Connection& c : m.connections) {
            if (c.to.path != path) continue;
            for (const EventObjectSpec& o : c.carries)
                metric_inbound = metric_inbound || o.spec.kind == Specialization::Kind::Metric;
        }
        if (metric_inbound) return;
        for (const UtilityTerm& t : a.behavior.utility->terms) {
            if (a.behavior.states.count(t.metric)) continue;
            add("AMN-DR5-02", Severity::Warning,
                "utility metric \"" + t.metric + "\" of \"" + path +
                    "\" has no source: no state of that name and no inbound connection "
                    "carrying metric objects",
                id_utility(path));
        }
    }

    // ---------------------------------------------------------------------
    // Global reference cycles

    void check_ref_cycles() {
        // Edges: global name -> referenced global names, with the span id of
        // each reference site.
        std::map<std::string, std::vector<std::pair<std::string, std::string>>> edges;
        for (const auto& [name, def] : m.globals) {
            auto& out = edges[name];
            collect_refs(def, "global:" + name, out);
        }

        std::map<std::string, int> color; // 0 unseen, 1 in progress, 2 done
        for (const auto& [name, def] : m.globals) cycle_dfs(name, edges, color);
    }

    void collect_refs(const AgentDef& a, const std::string& spanpath,
                      std::vector<std::pair<std::string, std::string>>& out) {
        for (const AgentDef& c : a.children) {
            std::string child_path = spanpath + "." + c.name;
            if (c.kind == AgentKind::GlobalRef)
                out.emplace_back(c.name, id_agent(child_path));
            else
                collect_refs(c, child_path, out);
        }
    }

    void cycle_dfs(const std::string& name,
                   const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& edges,
                   std::map<std::string, int>& color) {
        int& c = color[name];
        if (c != 0) return;
        c = 1;
        auto it = edges.find(name);
        if (it != edges.end()) {
            for (const auto& [target, site_id] : it->second) {
                auto tc = color.find(target);
                if (tc != color.end() && tc->second == 1) {
                    add("AMN-DR1-01", Severity::Error,
                        "expanding global \"" + target +
                            "\" returns to itself through this reference",
                        site_id);
                } else if (m.globals.count(target)) {
                    cycle_dfs(target, edges, color);
                }
            }
        }
        color[name] = 2;
    }

    // ---------------------------------------------------------------------
    // Connections

    void check_connection(const Connection& c, std::size_t index) {
        const std::string cid = id_connection(index);
        const std::string label = c.from.to_text() +
                                  (c.style == ConnectionStyle::Continuous ? " -> " : " --> ") +
                                  c.to.to_text();

        // The resolved definitions are kept alive here so the interface
        // pointers below stay valid for the whole check.
        std::optional<AgentDef> from_def, to_def;
        const Interface* out_iface = nullptr;
        const Interface* in_iface = nullptr;

        auto endpoint = [&](const Endpoint& e, InterfaceDir want,
                            std::optional<AgentDef>& slot) -> const Interface* {
            auto r = resolve(m, e.path);
            if (!ok(r)) {
                add("AMN-GEN-02", Severity::Error,
                    "connection endpoint \"" + e.to_text() + "\" does not name an agent",
                    cid);
                return nullptr;
            }
            slot = value(r);
            const AgentDef& def = *slot;
            if (const Interface* f = def.find_interface(want, e.name)) return f;
            InterfaceDir other =
                want == InterfaceDir::Actuator ? InterfaceDir::Sensor : InterfaceDir::Actuator;
            if (def.find_interface(other, e.name)) {
                add("AMN-DR3-01", Severity::Error,
                    want == InterfaceDir::Actuator
                        ? "connection \"" + label + "\" starts at \"" + e.to_text() +
                              "\", which is a sensor, not an actuator"
                        : "connection \"" + label + "\" ends at \"" + e.to_text() +
                              "\", which is an actuator, not a sensor",
                    cid);
            } else {
                add("AMN-GEN-02", Severity::Error,
                    "agent \"" + e.path + "\" has no interface named \"" + e.name + "\"",
                    cid);
            }
            return nullptr;
        };

        out_iface = endpoint(c.from, InterfaceDir::Actuator, from_def);
        in_iface = endpoint(c.to, InterfaceDir::Sensor, to_def);

        if (out_iface && in_iface && !compatible(out_iface->modality, in_iface->modality))
            add("AMN-DR2-01", Severity::Error,
                "connection \"" + label + "\" joins a " + out_iface->modality.to_text() +
                    " actuator to a " + in_iface->modality.to_text() + " sensor",
                cid,
                {id_iface(c.from.path, InterfaceDir::Actuator, c.from.name),
                 id_iface(c.to.path, InterfaceDir::Sensor, c.to.name)});

        auto range_check = [&](const char* code, const char* pname,
                               const std::optional<double>& v) {
            if (v && (*v < 0.0 || *v > 1.0))
                add(code, Severity::Error,
                    std::string(pname) + " of \"" + label + "\" is " +
                        format_number(*v * 100.0) + "%; it must lie between 0% and 100%",
                    cid);
        };
        range_check("AMN-DR6-01", "attention", c.params.attention);
        range_check("AMN-DR8-01", "reliability", c.params.reliability);
        range_check("AMN-DR8-01", "conformity", c.params.conformity);
        range_check("AMN-DR8-01", "security", c.params.security);

        if (c.params.security && c.carries.empty())
            add("AMN-DR8-02", Severity::Warning,
                "\"" + label + "\" declares security but carries no objects to protect",
                cid);

        for (std::size_t k = 0; k < c.carries.size(); ++k) {
            const EventObjectSpec& o = c.carries[k];
            std::string oid = id_carried(index, k);
            if (!m.span_of(oid)) oid = cid;
            check_object_args(o, oid, "carried on \"" + label + "\"");
            if (o.media && out_iface && !compatible(*o.media, out_iface->modality))
                add("AMN-DR2-02", Severity::Error,
                    "object carried on \"" + label + "\" declares " + o.media->to_text() +
                        " media, but the emitting actuator is " +
                        out_iface->modality.to_text(),
                    oid);
        }
    }

    // ---------------------------------------------------------------------

    void run() {
        // Root-level name clashes.
        std::map<std::string, std::string> first_root;
        for (const AgentDef& r : m.roots) {
            auto [it, fresh] = first_root.emplace(r.name, id_agent(r.name));
            if (!fresh)
                add("AMN-GEN-01", Severity::Error,
                    "top-level agent \"" + r.name + "\" is declared twice", id_agent(r.name),
                    {it->second});
        }

        for (const AgentDef& r : m.roots) check_agent(r, r.name, false);
        for (const auto& [name, def] : m.globals)
            check_agent(def, "global:" + name, true);

        check_ref_cycles();

        for (std::size_t i = 0; i < m.connections.size(); ++i)
            check_connection(m.connections[i], i);
    }
};

} // namespace

std::vector<Diagnostic> validate(const Model& m) {
    Checker c(m);
    c.run();
    sort_diagnostics(c.diags);
    return c.diags;
}

} // namespace amn
