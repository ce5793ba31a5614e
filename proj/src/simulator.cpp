#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "amn/expr.hpp"
#include "amn/ops.hpp"
#include "amn/simulator.hpp"
#include "amn/validator.hpp"

namespace amn {
namespace {

// ---------------------------------------------------------------------------
// Flattening

void flatten(const Model& m, const AgentDef& a, const std::string& path,
             std::vector<World::DefSlot>& out, int depth = 0) {
    if (depth > 64) return; // cycles are a validator error
    const AgentDef* d = &a;
    if (d->kind == AgentKind::GlobalRef) {
        auto it = m.globals.find(d->name);
        if (it == m.globals.end()) return;
        d = &it->second;
    }
    out.push_back({path, *d});
    for (const AgentDef& c : d->children) flatten(m, c, path + "." + c.name, out, depth + 1);
}

std::string strip_instance(const std::string& id) {
    std::size_t hash = id.rfind('#');
    return hash == std::string::npos ? id : id.substr(0, hash);
}

std::string parent_path(const std::string& path) {
    std::size_t dot = path.rfind('.');
    return dot == std::string::npos ? std::string() : path.substr(0, dot);
}

// ---------------------------------------------------------------------------
// Per-step working context

struct Step {
    World& w;
    std::vector<TraceEvent> out;
    std::map<std::string, std::vector<std::size_t>> by_path; // path -> instance indices
    std::map<std::string, std::size_t> slot_of;              // path -> def slot

    explicit Step(World& world) : w(world) {
        for (std::size_t i = 0; i < w.instances.size(); ++i)
            by_path[w.instances[i].path].push_back(i);
        for (std::size_t i = 0; i < w.defs.size(); ++i) slot_of[w.defs[i].path] = i;
    }

    void trace(TraceKind k, std::string subject, std::string object, std::string detail) {
        out.push_back({w.tick, w.next_seq++, k, std::move(subject), std::move(object),
                       std::move(detail)});
    }

    const AgentDef& def_of(const AgentInstance& inst) const { return w.defs[inst.def_slot].def; }

    AgentInstance* instance_by_id(const std::string& id) {
        auto it = by_path.find(strip_instance(id));
        if (it == by_path.end()) return nullptr;
        for (std::size_t i : it->second)
            if (w.instances[i].id() == id) return &w.instances[i];
        return nullptr;
    }

    // Nearest self-or-ancestor definition carrying a social self-concept.
    std::optional<SocialConcept> nearest_social(const std::string& path) const {
        for (std::string p = path; !p.empty(); p = parent_path(p)) {
            auto it = slot_of.find(p);
            if (it != slot_of.end() && w.defs[it->second].def.nature.social)
                return w.defs[it->second].def.nature.social;
        }
        return std::nullopt;
    }

    ExprEnv env_for(const AgentInstance& inst, const DeliveredObject* trigger) const {
        const AgentInstance* ip = &inst;
        return [ip, trigger](Expr::Scope sc, const std::string& name) -> std::optional<Value> {
            const std::map<std::string, Value>* src = nullptr;
            switch (sc) {
                case Expr::Scope::State: src = &ip->states; break;
                case Expr::Scope::Selected: src = ip->selected ? &*ip->selected : nullptr; break;
                case Expr::Scope::Object: src = trigger ? &trigger->payload : nullptr; break;
            }
            if (!src) return std::nullopt;
            auto it = src->find(name);
            if (it == src->end()) return std::nullopt;
            return it->second;
        };
    }

    Modality sender_modality(const DeliveredObject& o) const {
        if (o.channel >= 0 && o.channel < static_cast<int>(w.connections.size())) {
            const Connection& c = w.connections[static_cast<std::size_t>(o.channel)];
            auto it = slot_of.find(c.from.path);
            if (it != slot_of.end()) {
                const Interface* f = w.defs[it->second].def.find_interface(InterfaceDir::Actuator, c.from.name);
                if (f) return f->modality;
            }
        }
        return Modality::generic("");
    }

    bool trigger_matches(const EventPattern& p, const DeliveredObject& o) const {
        const Specialization& ps = p.spec;
        const Specialization& os = o.spec.spec;
        if (ps.kind != os.kind) return false;
        switch (ps.kind) {
            case Specialization::Kind::Generic:
                if (ps.generic_tag && os.generic_tag && *ps.generic_tag != *os.generic_tag)
                    return false;
                break;
            case Specialization::Kind::Reaction:
                if (ps.reaction && os.reaction != ps.reaction) return false;
                break;
            case Specialization::Kind::Instruction:
                if (ps.instruction && (!os.instruction || !(*os.instruction == *ps.instruction)))
                    return false;
                break;
            case Specialization::Kind::Notification:
                if (ps.notification && os.notification != ps.notification) return false;
                break;
            default: break; // task, candidates, metric: kind match suffices
        }
        if (p.media) {
            Modality have = o.spec.media ? *o.spec.media : sender_modality(o);
            if (!compatible(have, *p.media)) return false;
        }
        if (p.sender) {
            if (o.sender.empty()) return false;
            if (!path_within(strip_instance(o.sender), *p.sender)) return false;
        }
        return true;
    }

    // -----------------------------------------------------------------------
    // Emission

    void emit_object(const AgentInstance& src, const std::string& actuator,
                     const EventObjectSpec& spec, const std::map<std::string, Value>& payload,
                     const std::string& note) {
        const std::string sid = src.id();
        const std::string text = object_text(spec);
        bool any = false;
        for (std::size_t ci = 0; ci < w.connections.size(); ++ci) {
            const Connection& c = w.connections[ci];
            if (c.from.path != src.path || c.from.name != actuator) continue;
            any = true;
            DeliveredObject o;
            o.spec = spec;
            o.payload = payload;
            o.sender = sid;
            o.channel = static_cast<int>(ci);
            w.channels[ci].in_flight.push_back({std::move(o), w.tick + 1});
            trace(TraceKind::Emitted, sid, text, "via " + actuator + " -> " + c.to.to_text() + note);
        }
        if (!any) {
            trace(TraceKind::Emitted, sid, text, "via " + actuator + " (no channel)" + note);
            trace(TraceKind::Dropped, sid, text, "no channel");
        }
    }

    // -----------------------------------------------------------------------
    // Selection

    std::string candidate_label(const std::map<std::string, Value>& payload, int id) const {
        auto it = payload.find("label");
        if (it != payload.end() && it->second.is_string()) return it->second.as_string();
        return "#" + std::to_string(id);
    }

    void do_select(AgentInstance& inst, const Action& a) {
        const std::string iid = inst.id();
        if (inst.candidate_pool.empty()) {
            trace(TraceKind::CandidateSelected, iid, "(none)", "empty candidate pool");
            return;
        }

        auto numeric = [](const std::map<std::string, Value>& p,
                          const std::string& k) -> std::optional<double> {
            auto it = p.find(k);
            if (it == p.end() || !it->second.is_number()) return std::nullopt;
            return it->second.as_number();
        };

        // A social self-concept on the agent (or an enclosing one) takes over
        // whenever every candidate reports both utilities.
        std::optional<SocialConcept> self_concept = nearest_social(inst.path);
        bool have_utils = true;
        for (const auto& [id, c] : inst.candidate_pool)
            have_utils = have_utils && numeric(c.payload, "own_utility") &&
                         numeric(c.payload, "group_utility");

        int chosen = inst.candidate_pool.front().first;
        std::string how;
        if (self_concept && have_utils) {
            std::vector<CandidateProposal> props;
            for (const auto& [id, c] : inst.candidate_pool)
                props.push_back({id, *numeric(c.payload, "own_utility"),
                                 *numeric(c.payload, "group_utility"), c.payload});
            std::string note;
            auto r = resolve_conflict(self_concept, props, w.config.detriment_limit, &note);
            chosen = sim_value(r); // proposals non-empty and a concept present
            how = std::string("concept=") + social_name(*self_concept);
            if (!note.empty()) how += " (" + note + ")";
        } else {
            switch (a.strategy) {
                case SelectStrategy::First:
                    how = "first";
                    break;
                case SelectStrategy::UtilityArgmax: {
                    const UtilityFunction* uf =
                        def_of(inst).behavior.utility ? &*def_of(inst).behavior.utility : nullptr;
                    double best = -std::numeric_limits<double>::infinity();
                    for (const auto& [id, c] : inst.candidate_pool) {
                        double score = 0.0;
                        if (uf)
                            for (const UtilityTerm& t : uf->terms) {
                                double v = 0.0;
                                if (auto pv = numeric(c.payload, t.metric)) v = *pv;
                                else if (auto it = inst.states.find(t.metric);
                                         it != inst.states.end() && it->second.is_number())
                                    v = it->second.as_number();
                                score += t.weight * v;
                            }
                        if (score > best) {
                            best = score;
                            chosen = id;
                        }
                    }
                    how = "utility_argmax";
                    break;
                }
                case SelectStrategy::RuleNamed: {
                    const Rule* r = nullptr;
                    for (const Rule& cand : def_of(inst).behavior.rules)
                        if (cand.name == a.strategy_rule) r = &cand;
                    bool found = false;
                    if (r && r->guard)
                        for (const auto& [id, c] : inst.candidate_pool) {
                            // the candidate under test is exposed as object.*
                            auto env = env_for(inst, &c);
                            auto v = eval_expr(*r->guard, env);
                            if (v && v->is_bool() && v->as_bool()) {
                                chosen = id;
                                found = true;
                                break;
                            }
                        }
                    how = "rule " + a.strategy_rule;
                    if (!found) how += " (no candidate satisfied it; fell back to the first)";
                    break;
                }
            }
        }

        for (const auto& [id, c] : inst.candidate_pool)
            if (id == chosen) {
                inst.selected = c.payload;
                trace(TraceKind::CandidateSelected, iid, candidate_label(c.payload, id),
                      how + " id=" + std::to_string(id));
                break;
            }
        inst.candidate_pool.clear();
    }

    // -----------------------------------------------------------------------
    // Actions

    std::string selected_label(const AgentInstance& inst) const {
        if (!inst.selected) return "(none)";
        auto it = inst.selected->find("label");
        if (it != inst.selected->end() && it->second.is_string())
            return it->second.as_string();
        return "(selected)";
    }

    void run_actions(AgentInstance& inst, const Actions& actions, const DeliveredObject* trigger,
                     int window_id) {
        const std::string iid = inst.id();
        auto env = env_for(inst, trigger);
        for (const Action& a : actions) {
            switch (a.kind) {
                case Action::Kind::Emit: {
                    std::map<std::string, Value> payload;
                    bool bad = false;
                    for (const auto& [k, e] : a.payload) {
                        auto v = eval_expr(e, env);
                        if (!v) {
                            trace(TraceKind::InstructionIgnored, iid, object_text(a.object),
                                  "payload field \"" + k + "\" did not evaluate; emission skipped");
                            bad = true;
                            break;
                        }
                        payload.emplace(k, *v);
                    }
                    if (!bad) emit_object(inst, a.actuator, a.object, payload, "");
                    break;
                }
                case Action::Kind::SetState: {
                    auto v = eval_expr(a.value, env);
                    if (!v) {
                        trace(TraceKind::InstructionIgnored, iid, a.state,
                              "state expression did not evaluate; assignment skipped");
                        break;
                    }
                    auto it = inst.states.find(a.state);
                    std::string before = it == inst.states.end() ? "(unset)" : it->second.to_text();
                    inst.states[a.state] = *v;
                    trace(TraceKind::StateChanged, iid, a.state, before + " -> " + v->to_text());
                    break;
                }
                case Action::Kind::SelectCandidate:
                    do_select(inst, a);
                    break;
                case Action::Kind::StartVetoWindow: {
                    VetoWindow vw;
                    vw.id = w.next_window++;
                    vw.owner = iid;
                    vw.opened_at = w.tick;
                    vw.duration = std::max(1, static_cast<int>(a.duration));
                    vw.on_expiry = a.on_expiry;
                    w.windows.push_back(vw);
                    trace(TraceKind::WindowOpened, iid, "w:" + std::to_string(vw.id),
                          "duration=" + std::to_string(vw.duration));
                    break;
                }
                case Action::Kind::Commit:
                    trace(TraceKind::WindowCommitted, iid, selected_label(inst),
                          window_id >= 0 ? "window w:" + std::to_string(window_id) : "immediate");
                    break;
                case Action::Kind::AbortPending:
                    for (VetoWindow& vw : w.windows)
                        if (!vw.resolved && vw.owner == iid) {
                            vw.vetoed = true;
                            vw.resolved = true;
                            trace(TraceKind::WindowVetoed, iid, "w:" + std::to_string(vw.id),
                                  "aborted");
                        }
                    break;
            }
        }
    }

    // -----------------------------------------------------------------------
    // Phase 0: startup (first tick only)

    // Agents that declare a rule for the instantiate lifecycle signal receive
    // it once, when the world comes alive. Agents without such a rule receive
    // nothing, so ordinary models see no extra traffic.
    void seed_startup() {
        for (AgentInstance& inst : w.instances) {
            const AgentDef& def = w.defs[inst.def_slot].def;
            DeliveredObject o;
            o.spec.spec = Specialization::instruction_of(
                InstructionKind{InstructionKind::Base::Instantiate, {}});
            o.spec.quant = Quant::Single;
            o.channel = -2; // lifecycle, not injected
            o.delivered_tick = w.tick;
            bool wanted = false;
            for (const Rule& r : def.behavior.rules)
                if (trigger_matches(r.trigger, o)) { wanted = true; break; }
            if (!wanted) continue;
            trace(TraceKind::Delivered, inst.id(), object_text(o.spec), "startup");
            inst.inbox.push_back(std::move(o));
        }
    }

    // -----------------------------------------------------------------------
    // Phase 1: injections

    void apply_injection(const InjectedAction& a) {
        auto itp = by_path.find(a.agent);
        if (itp == by_path.end() || itp->second.empty()) {
            trace(TraceKind::InstructionIgnored, a.agent, a.action, "injection: unknown agent");
            return;
        }
        AgentInstance& inst = w.instances[itp->second.front()];
        const std::string iid = inst.id();

        if (a.action == "veto") {
            bool any = false;
            for (VetoWindow& vw : w.windows) {
                if (vw.resolved || strip_instance(vw.owner) != a.agent) continue;
                vw.vetoed = true;
                vw.resolved = true;
                any = true;
                trace(TraceKind::WindowVetoed, vw.owner, "w:" + std::to_string(vw.id),
                      "injected veto");
            }
            if (!any)
                trace(TraceKind::InstructionIgnored, iid, "veto", "injection: no open window");
            return;
        }

        if (a.action == "approve" || a.action == "request") {
            DeliveredObject o;
            if (a.action == "approve")
                o.spec.spec = Specialization::reaction_of(ReactionKind::Acceptance);
            else
                o.spec.spec = Specialization::instruction_of(
                    InstructionKind{InstructionKind::Base::Custom, "request"});
            o.spec.quant = Quant::Single;
            o.delivered_tick = w.tick;
            trace(TraceKind::Delivered, iid, object_text(o.spec), "injected");
            inst.inbox.push_back(std::move(o));
            return;
        }

        if (a.action == "emit") {
            if (a.args.empty()) {
                trace(TraceKind::InstructionIgnored, iid, "emit", "injection: missing actuator");
                return;
            }
            std::string actuator = a.args.front();
            std::string spec_text;
            std::map<std::string, Value> payload;
            bool ok_args = true;
            for (std::size_t i = 1; i < a.args.size(); ++i) {
                const std::string& t = a.args[i];
                std::size_t eq = t.find('=');
                if (eq == std::string::npos) {
                    spec_text += t;
                    continue;
                }
                std::string k = t.substr(0, eq), v = t.substr(eq + 1);
                if (v == "true") payload.emplace(k, Value(true));
                else if (v == "false") payload.emplace(k, Value(false));
                else if (auto n = parse_number(v)) payload.emplace(k, Value(*n));
                else {
                    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
                        v = v.substr(1, v.size() - 2);
                    payload.emplace(k, Value(std::move(v)));
                }
            }
            auto spec = parse_objspec_text(spec_text);
            if (!spec) {
                trace(TraceKind::InstructionIgnored, iid, spec_text,
                      "injection: unrecognized object spec");
                ok_args = false;
            }
            if (ok_args) emit_object(inst, actuator, *spec, payload, " (injected)");
            return;
        }

        trace(TraceKind::InstructionIgnored, iid, a.action, "injection: unknown action");
    }

    static std::optional<EventObjectSpec> parse_objspec_text(const std::string& raw) {
        std::string s;
        for (char c : raw)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) return std::nullopt;

        EventObjectSpec o;
        std::string head = s;
        // the quant separator is the slash outside any parentheses
        std::size_t depth = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '(') ++depth;
            else if (s[i] == ')' && depth) --depth;
            else if (s[i] == '/' && depth == 0) {
                head = s.substr(0, i);
                auto q = quant_from(s.substr(i + 1));
                if (!q) return std::nullopt;
                o.quant = q;
                break;
            }
        }
        if (!o.quant) o.quant = Quant::Single;

        std::string word = head, arg;
        std::size_t open = head.find('(');
        if (open != std::string::npos) {
            if (head.back() != ')') return std::nullopt;
            word = head.substr(0, open);
            arg = head.substr(open + 1, head.size() - open - 2);
            if (arg.size() >= 2 && arg.front() == '"' && arg.back() == '"')
                arg = arg.substr(1, arg.size() - 2);
        }

        if (word == "task") o.spec = Specialization::task();
        else if (word == "candidates") o.spec = Specialization::candidates();
        else if (word == "metric") o.spec = Specialization::metric();
        else if (word == "generic") {
            if (arg.empty()) return std::nullopt;
            o.spec = Specialization::generic(arg);
        } else if (word == "reaction") {
            auto r = reaction_from(arg);
            if (!r) return std::nullopt;
            o.spec = Specialization::reaction_of(*r);
        } else if (word == "notification") {
            auto n = notification_from(arg);
            if (!n) return std::nullopt;
            o.spec = Specialization::notification_of(*n);
        } else if (word == "instruction") {
            if (arg == "instantiate")
                o.spec = Specialization::instruction_of(
                    InstructionKind{InstructionKind::Base::Instantiate, {}});
            else if (arg == "suspend")
                o.spec = Specialization::instruction_of(
                    InstructionKind{InstructionKind::Base::Suspend, {}});
            else if (arg == "abort")
                o.spec = Specialization::instruction_of(
                    InstructionKind{InstructionKind::Base::Abort, {}});
            else if (!arg.empty())
                o.spec = Specialization::instruction_of(
                    InstructionKind{InstructionKind::Base::Custom, arg});
            else
                return std::nullopt;
        } else {
            return std::nullopt;
        }
        return o;
    }

    // -----------------------------------------------------------------------
    // Phases 2 and 3: delivery and reliability gating

    void deliver() {
        for (std::size_t ci = 0; ci < w.channels.size(); ++ci) {
            ChannelState& ch = w.channels[ci];
            const Connection& conn = w.connections[ci];
            const long cap = ch.capacity.value_or(std::numeric_limits<long>::max());
            const std::string ctok = "c:" + std::to_string(ci);
            auto receivers = by_path.find(conn.to.path);

            long delivered_now = 0;
            std::deque<ChannelState::InFlight> keep;
            while (!ch.in_flight.empty()) {
                ChannelState::InFlight item = std::move(ch.in_flight.front());
                ch.in_flight.pop_front();
                if (item.ready_at > w.tick) {
                    keep.push_back(std::move(item));
                    continue;
                }
                if (delivered_now >= cap) {
                    if (w.config.overflow == OverflowPolicy::DropNewest) {
                        trace(TraceKind::Dropped, ctok, object_text(item.obj.spec), "capacity");
                    } else {
                        item.ready_at = w.tick + 1;
                        keep.push_back(std::move(item));
                    }
                    continue;
                }
                if (receivers == by_path.end() || receivers->second.empty()) {
                    trace(TraceKind::Dropped, ctok, object_text(item.obj.spec), "no receiver");
                    continue;
                }
                ++delivered_now;
                std::size_t ridx =
                    receivers->second[ch.next_receiver % receivers->second.size()];
                ch.next_receiver = (ch.next_receiver + 1) % receivers->second.size();
                AgentInstance& rec = w.instances[ridx];
                item.obj.delivered_tick = w.tick;

                bool considered = true;
                if (conn.params.reliability) {
                    if (w.config.stochastic_reliability) {
                        std::uniform_real_distribution<double> dist(0.0, 1.0);
                        considered = dist(w.rng) < *conn.params.reliability;
                    } else {
                        considered = *conn.params.reliability >= w.config.reliability_threshold;
                    }
                }
                std::string det = ctok + " from " +
                                  (item.obj.sender.empty() ? "(injected)" : item.obj.sender);
                if (!considered) det += " (ignored: unreliable)";
                trace(TraceKind::Delivered, rec.id(), object_text(item.obj.spec), det);
                if (considered) rec.inbox.push_back(std::move(item.obj));
            }
            ch.in_flight = std::move(keep);
        }

        // Candidate objects join the receiver's pool as they arrive.
        for (AgentInstance& inst : w.instances)
            for (const DeliveredObject& o : inst.inbox)
                if (o.spec.spec.kind == Specialization::Kind::Candidates &&
                    o.delivered_tick == w.tick)
                    inst.candidate_pool.emplace_back(w.next_candidate++, o);
    }

    // -----------------------------------------------------------------------
    // Phases 4 and 5: rules and selection

    void fire_rules() {
        for (std::size_t ii = 0; ii < w.instances.size(); ++ii) {
            AgentInstance& inst = w.instances[ii];
            const std::string iid = inst.id();
            std::vector<DeliveredObject> inbox = std::move(inst.inbox);
            inst.inbox.clear();
            if (inbox.empty()) continue;

            const Behavior& b = def_of(inst).behavior;
            std::vector<bool> consumed(inbox.size(), false);
            std::vector<bool> batch_fired(b.rules.size(), false);

            auto channel_token = [](const DeliveredObject& o) {
                if (o.channel >= 0) return "c:" + std::to_string(o.channel);
                return std::string(o.channel == -2 ? "startup" : "injected");
            };
            auto note_followed = [&](const DeliveredObject& o, const Rule& r) {
                if (o.spec.spec.kind == Specialization::Kind::Instruction)
                    trace(TraceKind::InstructionFollowed, iid, object_text(o.spec),
                          channel_token(o) + " rule " + r.name);
            };

            for (std::size_t oi = 0; oi < inbox.size(); ++oi) {
                if (consumed[oi]) continue;
                for (std::size_t ri = 0; ri < b.rules.size(); ++ri) {
                    const Rule& r = b.rules[ri];
                    if (!trigger_matches(r.trigger, inbox[oi])) continue;
                    if (r.guard) {
                        auto v = eval_expr(*r.guard, env_for(inst, &inbox[oi]));
                        if (!v || !v->is_bool() || !v->as_bool()) continue;
                    }

                    bool batch = r.trigger.quant &&
                                 (*r.trigger.quant == Quant::All ||
                                  *r.trigger.quant == Quant::Selection);
                    std::vector<std::size_t> fired_on{oi};
                    consumed[oi] = true;
                    if (batch) {
                        if (batch_fired[ri]) break; // consumed by the earlier firing
                        batch_fired[ri] = true;
                        for (std::size_t oj = oi + 1; oj < inbox.size(); ++oj) {
                            if (consumed[oj] || !trigger_matches(r.trigger, inbox[oj])) continue;
                            if (r.guard) {
                                auto v = eval_expr(*r.guard, env_for(inst, &inbox[oj]));
                                if (!v || !v->is_bool() || !v->as_bool()) continue;
                            }
                            consumed[oj] = true;
                            fired_on.push_back(oj);
                        }
                    }

                    bool delegated = false;
                    if (r.delegation) {
                        std::uniform_real_distribution<double> dist(0.0, 1.0);
                        delegated = dist(w.rng) < r.delegation->probability;
                    }
                    trace(TraceKind::RuleFired, iid, r.name,
                          "on " + object_text(inbox[oi].spec) +
                              (fired_on.size() > 1
                                   ? " (x" + std::to_string(fired_on.size()) + ")"
                                   : "") +
                              (delegated ? " (delegated)" : ""));
                    for (std::size_t oj : fired_on) note_followed(inbox[oj], r);

                    if (delegated) {
                        for (std::size_t oj : fired_on)
                            emit_object(inst, r.delegation->actuator, inbox[oj].spec,
                                        inbox[oj].payload, " (delegated)");
                    } else {
                        run_actions(inst, r.actions, &inbox[oi], -1);
                    }
                    break;
                }
            }

            for (std::size_t oi = 0; oi < inbox.size(); ++oi)
                if (!consumed[oi] &&
                    inbox[oi].spec.spec.kind == Specialization::Kind::Instruction)
                    trace(TraceKind::InstructionIgnored, iid, object_text(inbox[oi].spec),
                          channel_token(inbox[oi]) + " no rule fired");
        }
    }

    // -----------------------------------------------------------------------
    // Phase 6: windows

    void tick_windows() {
        for (std::size_t wi = 0; wi < w.windows.size(); ++wi) {
            if (w.windows[wi].resolved) continue;
            if (w.tick < w.windows[wi].opened_at + w.windows[wi].duration) continue;
            // copy out before running actions: they may grow w.windows
            auto on_expiry = w.windows[wi].on_expiry;
            std::string owner = w.windows[wi].owner;
            int id = w.windows[wi].id;
            w.windows[wi].resolved = true;
            AgentInstance* inst = instance_by_id(owner);
            if (inst && on_expiry) run_actions(*inst, *on_expiry, nullptr, id);
        }
        w.windows.erase(std::remove_if(w.windows.begin(), w.windows.end(),
                                       [](const VetoWindow& vw) { return vw.resolved; }),
                        w.windows.end());
    }
};

} // namespace

// ---------------------------------------------------------------------------

bool World::quiescent() const {
    if (tick == 0) return false; // startup has not run yet
    for (const ChannelState& ch : channels)
        if (!ch.in_flight.empty()) return false;
    for (const VetoWindow& vw : windows)
        if (!vw.resolved) return false;
    return true;
}

SimResult<World> instantiate(const Model& m, std::uint64_t seed, RunConfig config) {
    if (has_errors(validate(m)))
        return SimError{SimError::Kind::ValidationRequired,
                        "the model has validation errors; fix them before running"};

    World w;
    w.rng_seed = seed;
    w.rng.seed(seed);
    w.config = config;
    w.connections = m.connections;

    for (const AgentDef& root : m.roots) flatten(m, root, root.name, w.defs);

    for (std::size_t slot = 0; slot < w.defs.size(); ++slot) {
        const AgentDef& d = w.defs[slot].def;
        const std::string& path = w.defs[slot].path;
        const bool multi = d.instancing.mode == Instancing::Mode::Multi;
        std::uint32_t lo = multi ? d.instancing.min : 1;
        std::optional<std::uint32_t> hi = multi ? d.instancing.max : std::optional<std::uint32_t>(1);
        std::uint32_t count = lo;
        if (auto it = config.instance_counts.find(path); it != config.instance_counts.end()) {
            if (it->second < lo || (hi && it->second > *hi))
                return SimError{SimError::Kind::CardinalityExceeded,
                                "\"" + path + "\" allows " + d.instancing.to_text() +
                                    " instances; " + std::to_string(it->second) +
                                    " were requested"};
            count = it->second;
        }
        for (std::uint32_t k = 0; k < count; ++k) {
            AgentInstance inst;
            inst.def_slot = slot;
            inst.path = path;
            inst.index = static_cast<int>(k);
            inst.lone = count == 1;
            inst.states = d.behavior.states;
            w.instances.push_back(std::move(inst));
        }
    }

    for (std::size_t ci = 0; ci < w.connections.size(); ++ci) {
        ChannelState ch;
        ch.connection = static_cast<int>(ci);
        if (w.connections[ci].params.attention) {
            double att = *w.connections[ci].params.attention;
            ch.capacity = std::max(1L, static_cast<long>(
                                           std::ceil(att * w.config.attention_base)));
        }
        w.channels.push_back(std::move(ch));
    }

    return w;
}

std::vector<TraceEvent> step(World& w, const std::vector<InjectedAction>& injected) {
    Step s(w);
    if (w.tick == 0) s.seed_startup();
    for (const InjectedAction& a : injected) s.apply_injection(a);
    s.deliver();
    s.fire_rules();
    s.tick_windows();
    w.tick += 1;
    return std::move(s.out);
}

SimResult<Trace> run(const Model& m, std::uint64_t seed, int max_ticks,
                     const std::vector<InjectedAction>& injections, RunConfig config) {
    if (max_ticks < 1)
        return SimError{SimError::Kind::BadArgument, "max_ticks must be at least 1"};
    auto wr = instantiate(m, seed, config);
    if (!sim_ok(wr)) return sim_error(wr);
    World w = sim_value(wr);

    Trace t;
    for (int i = 0; i < max_ticks; ++i) {
        std::vector<InjectedAction> now;
        bool later = false;
        for (const InjectedAction& a : injections) {
            if (a.tick == w.tick) now.push_back(a);
            else if (a.tick > w.tick) later = true;
        }
        if (now.empty() && !later && w.quiescent()) break;
        auto ev = step(w, now);
        t.events.insert(t.events.end(), ev.begin(), ev.end());
    }
    return t;
}

SimResult<int> resolve_conflict(std::optional<SocialConcept> self_concept,
                                const std::vector<CandidateProposal>& proposals,
                                double detriment_limit, std::string* note) {
    if (!self_concept)
        return SimError{SimError::Kind::MissingConcept,
                        "conflict resolution needs a social self-concept"};
    if (proposals.empty())
        return SimError{SimError::Kind::BadArgument, "no proposals to choose between"};

    auto argmax = [&](bool use_own, auto admissible) -> std::optional<int> {
        std::optional<int> best_id;
        double best = -std::numeric_limits<double>::infinity();
        for (const CandidateProposal& p : proposals) {
            if (!admissible(p)) continue;
            double v = use_own ? p.own_utility : p.group_utility;
            if (!best_id || v > best || (v == best && p.id < *best_id)) {
                best = v;
                best_id = p.id;
            }
        }
        return best_id;
    };

    bool use_own = *self_concept == SocialConcept::SelfInterested;
    auto constrained = [&](const CandidateProposal& p) {
        switch (*self_concept) {
            case SocialConcept::SelfInterested: return p.group_utility >= -detriment_limit;
            case SocialConcept::Helpful: return p.own_utility >= 0.0;
            case SocialConcept::Cooperative: return true;
        }
        return true;
    };

    if (auto id = argmax(use_own, constrained)) return *id;
    if (note)
        *note = std::string("no candidate met the ") + social_name(*self_concept) +
                " constraint; chose the best unconstrained";
    return *argmax(use_own, [](const CandidateProposal&) { return true; });
}

} // namespace amn
