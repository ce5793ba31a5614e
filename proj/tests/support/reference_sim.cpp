#include "reference_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "amn/simulator.hpp" // object_text, to_jsonl, Trace (serialization only)

namespace amn_test {

namespace {

using namespace amn;

struct RObj {
    EventObjectSpec spec;
    std::map<std::string, Value> payload;
    std::string sender;
    int channel = -1; // -2 startup
    int ready_at = 0;
};

struct RAgent {
    std::string path;
    AgentDef def;
    std::map<std::string, Value> states;
    std::vector<RObj> inbox;
};

struct RWindow {
    int id = 0;
    std::size_t owner = 0;
    int opened = 0;
    int duration = 1;
    std::shared_ptr<const Actions> body;
    bool done = false;
};

struct Ref {
    const Model& m;
    std::vector<RAgent> agents;
    std::vector<std::vector<RObj>> queues; // one per connection
    std::vector<RWindow> windows;
    Trace trace;
    int tick = 0;
    int seq = 0;
    int next_window = 0;

    explicit Ref(const Model& model) : m(model) {
        for (const AgentDef& r : m.roots) add(r, r.name);
        queues.resize(m.connections.size());
    }

    void add(const AgentDef& a, const std::string& path) {
        const AgentDef* d = &a;
        if (d->kind == AgentKind::GlobalRef) {
            auto it = m.globals.find(d->name);
            if (it == m.globals.end()) return;
            d = &it->second;
        }
        agents.push_back({path, *d, d->behavior.states, {}});
        for (const AgentDef& c : d->children) add(c, path + "." + c.name);
    }

    void ev(TraceKind k, std::string subject, std::string object, std::string detail) {
        trace.events.push_back(
            {tick, seq++, k, std::move(subject), std::move(object), std::move(detail)});
    }

    // -- expression evaluation (own transcription of the documented rules) --

    std::optional<Value> eval(const Expr& e, const RAgent& a, const RObj* trigger) {
        switch (e.kind) {
            case Expr::Kind::Literal: return e.literal;
            case Expr::Kind::Var: {
                const std::map<std::string, Value>* src = nullptr;
                if (e.scope == Expr::Scope::State) src = &a.states;
                if (e.scope == Expr::Scope::Object && trigger) src = &trigger->payload;
                if (!src) return std::nullopt; // selected: never set in this subset
                auto it = src->find(e.name);
                if (it == src->end()) return std::nullopt;
                return it->second;
            }
            case Expr::Kind::Unary: {
                auto v = eval(*e.lhs, a, trigger);
                if (!v) return std::nullopt;
                if (e.op == Expr::Op::Not)
                    return v->is_bool() ? std::optional<Value>(Value(!v->as_bool()))
                                        : std::nullopt;
                return v->is_number() ? std::optional<Value>(Value(-v->as_number()))
                                      : std::nullopt;
            }
            case Expr::Kind::Binary: break;
        }
        if (e.op == Expr::Op::And || e.op == Expr::Op::Or) {
            auto l = eval(*e.lhs, a, trigger);
            if (!l || !l->is_bool()) return std::nullopt;
            if (e.op == Expr::Op::And && !l->as_bool()) return Value(false);
            if (e.op == Expr::Op::Or && l->as_bool()) return Value(true);
            auto r = eval(*e.rhs, a, trigger);
            if (!r || !r->is_bool()) return std::nullopt;
            return Value(r->as_bool());
        }
        auto l = eval(*e.lhs, a, trigger);
        auto r = eval(*e.rhs, a, trigger);
        if (!l || !r) return std::nullopt;
        switch (e.op) {
            case Expr::Op::Eq: return Value(*l == *r);
            case Expr::Op::Ne: return Value(!(*l == *r));
            case Expr::Op::Lt:
            case Expr::Op::Le:
            case Expr::Op::Gt:
            case Expr::Op::Ge: {
                int c = 0;
                if (l->is_number() && r->is_number())
                    c = l->as_number() < r->as_number() ? -1
                        : l->as_number() > r->as_number() ? 1 : 0;
                else if (l->is_string() && r->is_string())
                    c = l->as_string().compare(r->as_string());
                else
                    return std::nullopt;
                if (e.op == Expr::Op::Lt) return Value(c < 0);
                if (e.op == Expr::Op::Le) return Value(c <= 0);
                if (e.op == Expr::Op::Gt) return Value(c > 0);
                return Value(c >= 0);
            }
            default: break;
        }
        if (!l->is_number() || !r->is_number()) return std::nullopt;
        double x = l->as_number(), y = r->as_number();
        switch (e.op) {
            case Expr::Op::Add: return Value(x + y);
            case Expr::Op::Sub: return Value(x - y);
            case Expr::Op::Mul: return Value(x * y);
            case Expr::Op::Div: return y == 0.0 ? std::nullopt : std::optional<Value>(Value(x / y));
            default: return std::nullopt;
        }
    }

    // -- trigger matching ---------------------------------------------------

    bool matches(const EventPattern& p, const RObj& o) const {
        const Specialization& ps = p.spec;
        const Specialization& os = o.spec.spec;
        if (ps.kind != os.kind) return false;
        if (ps.kind == Specialization::Kind::Generic && ps.generic_tag && os.generic_tag &&
            *ps.generic_tag != *os.generic_tag)
            return false;
        if (ps.kind == Specialization::Kind::Reaction && ps.reaction && os.reaction != ps.reaction)
            return false;
        if (ps.kind == Specialization::Kind::Instruction && ps.instruction &&
            (!os.instruction || !(*os.instruction == *ps.instruction)))
            return false;
        if (ps.kind == Specialization::Kind::Notification && ps.notification &&
            os.notification != ps.notification)
            return false;
        // Media and sender filters: outside the generated subset.
        return true;
    }

    // -- emission -----------------------------------------------------------

    void emit(std::size_t ai, const std::string& actuator, const EventObjectSpec& spec,
              std::map<std::string, Value> payload) {
        const std::string& path = agents[ai].path;
        const std::string text = object_text(spec);
        bool any = false;
        for (std::size_t ci = 0; ci < m.connections.size(); ++ci) {
            const Connection& c = m.connections[ci];
            if (c.from.path != path || c.from.name != actuator) continue;
            any = true;
            queues[ci].push_back({spec, payload, path, static_cast<int>(ci), tick + 1});
            ev(TraceKind::Emitted, path, text, "via " + actuator + " -> " + c.to.to_text());
        }
        if (!any) {
            ev(TraceKind::Emitted, path, text, "via " + actuator + " (no channel)");
            ev(TraceKind::Dropped, path, text, "no channel");
        }
    }

    // -- actions ------------------------------------------------------------

    void run_actions(std::size_t ai, const Actions& actions, const RObj* trigger, int window_id) {
        RAgent& a = agents[ai];
        for (const Action& act : actions) {
            switch (act.kind) {
                case Action::Kind::Emit: {
                    std::map<std::string, Value> payload;
                    bool bad = false;
                    for (const auto& [k, e] : act.payload) {
                        auto v = eval(e, a, trigger);
                        if (!v) {
                            ev(TraceKind::InstructionIgnored, a.path, object_text(act.object),
                               "payload field \"" + k + "\" did not evaluate; emission skipped");
                            bad = true;
                            break;
                        }
                        payload.emplace(k, *v);
                    }
                    if (!bad) emit(ai, act.actuator, act.object, std::move(payload));
                    break;
                }
                case Action::Kind::SetState: {
                    auto v = eval(act.value, a, trigger);
                    if (!v) {
                        ev(TraceKind::InstructionIgnored, a.path, act.state,
                           "state expression did not evaluate; assignment skipped");
                        break;
                    }
                    auto it = a.states.find(act.state);
                    std::string before = it == a.states.end() ? "(unset)" : it->second.to_text();
                    a.states[act.state] = *v;
                    ev(TraceKind::StateChanged, a.path, act.state, before + " -> " + v->to_text());
                    break;
                }
                case Action::Kind::StartVetoWindow: {
                    RWindow vw{next_window++, ai, tick, std::max(1, act.duration), act.on_expiry,
                               false};
                    ev(TraceKind::WindowOpened, a.path, "w:" + std::to_string(vw.id),
                       "duration=" + std::to_string(vw.duration));
                    windows.push_back(std::move(vw));
                    break;
                }
                case Action::Kind::Commit:
                    // No selection happens in this subset, so the label slot
                    // always reads "(none)".
                    ev(TraceKind::WindowCommitted, a.path, "(none)",
                       window_id >= 0 ? "window w:" + std::to_string(window_id) : "immediate");
                    break;
                case Action::Kind::AbortPending:
                    for (RWindow& vw : windows)
                        if (!vw.done && vw.owner == ai) {
                            vw.done = true;
                            ev(TraceKind::WindowVetoed, a.path, "w:" + std::to_string(vw.id),
                               "aborted");
                        }
                    break;
                case Action::Kind::SelectCandidate:
                    break; // outside the generated subset
            }
        }
    }

    // -- phases -------------------------------------------------------------

    void startup() {
        for (RAgent& a : agents) {
            RObj o;
            o.spec.spec = Specialization::instruction_of(
                InstructionKind{InstructionKind::Base::Instantiate, {}});
            o.spec.quant = Quant::Single;
            o.channel = -2;
            bool wanted = false;
            for (const Rule& r : a.def.behavior.rules)
                if (matches(r.trigger, o)) { wanted = true; break; }
            if (!wanted) continue;
            ev(TraceKind::Delivered, a.path, object_text(o.spec), "startup");
            a.inbox.push_back(std::move(o));
        }
    }

    std::optional<std::size_t> agent_at(const std::string& path) const {
        for (std::size_t i = 0; i < agents.size(); ++i)
            if (agents[i].path == path) return i;
        return std::nullopt;
    }

    void deliver() {
        for (std::size_t ci = 0; ci < queues.size(); ++ci) {
            const Connection& conn = m.connections[ci];
            long cap = std::numeric_limits<long>::max();
            if (conn.params.attention)
                cap = std::max(1L, static_cast<long>(std::ceil(*conn.params.attention * 4)));
            const std::string ctok = "c:" + std::to_string(ci);
            auto rec = agent_at(conn.to.path);

            long delivered = 0;
            std::vector<RObj> keep;
            for (RObj& o : queues[ci]) {
                if (o.ready_at > tick) {
                    keep.push_back(std::move(o));
                    continue;
                }
                if (delivered >= cap) {
                    ev(TraceKind::Dropped, ctok, object_text(o.spec), "capacity");
                    continue;
                }
                if (!rec) {
                    ev(TraceKind::Dropped, ctok, object_text(o.spec), "no receiver");
                    continue;
                }
                ++delivered;
                bool considered =
                    !conn.params.reliability || *conn.params.reliability >= 0.5;
                std::string det = ctok + " from " + o.sender;
                if (!considered) det += " (ignored: unreliable)";
                ev(TraceKind::Delivered, agents[*rec].path, object_text(o.spec), det);
                if (considered) agents[*rec].inbox.push_back(std::move(o));
            }
            queues[ci] = std::move(keep);
        }
    }

    std::string token(const RObj& o) const {
        if (o.channel >= 0) return "c:" + std::to_string(o.channel);
        return o.channel == -2 ? "startup" : "injected";
    }

    void fire_rules() {
        for (std::size_t ai = 0; ai < agents.size(); ++ai) {
            RAgent& a = agents[ai];
            std::vector<RObj> inbox = std::move(a.inbox);
            a.inbox.clear();
            if (inbox.empty()) continue;

            const std::vector<Rule>& rules = a.def.behavior.rules;
            std::vector<bool> consumed(inbox.size(), false);
            std::vector<bool> batch_fired(rules.size(), false);

            auto guard_ok = [&](const Rule& r, const RObj& o) {
                if (!r.guard) return true;
                auto v = eval(*r.guard, a, &o);
                return v && v->is_bool() && v->as_bool();
            };

            for (std::size_t oi = 0; oi < inbox.size(); ++oi) {
                if (consumed[oi]) continue;
                for (std::size_t ri = 0; ri < rules.size(); ++ri) {
                    const Rule& r = rules[ri];
                    if (!matches(r.trigger, inbox[oi]) || !guard_ok(r, inbox[oi])) continue;

                    bool batch = r.trigger.quant && (*r.trigger.quant == Quant::All ||
                                                     *r.trigger.quant == Quant::Selection);
                    std::vector<std::size_t> fired{oi};
                    consumed[oi] = true;
                    if (batch) {
                        if (batch_fired[ri]) break; // swallowed by the earlier firing
                        batch_fired[ri] = true;
                        for (std::size_t oj = oi + 1; oj < inbox.size(); ++oj) {
                            if (consumed[oj] || !matches(r.trigger, inbox[oj]) ||
                                !guard_ok(r, inbox[oj]))
                                continue;
                            consumed[oj] = true;
                            fired.push_back(oj);
                        }
                    }

                    ev(TraceKind::RuleFired, a.path, r.name,
                       "on " + object_text(inbox[oi].spec) +
                           (fired.size() > 1 ? " (x" + std::to_string(fired.size()) + ")" : ""));
                    for (std::size_t oj : fired)
                        if (inbox[oj].spec.spec.kind == Specialization::Kind::Instruction)
                            ev(TraceKind::InstructionFollowed, a.path,
                               object_text(inbox[oj].spec), token(inbox[oj]) + " rule " + r.name);
                    run_actions(ai, r.actions, &inbox[oi], -1);
                    break;
                }
            }

            for (std::size_t oi = 0; oi < inbox.size(); ++oi)
                if (!consumed[oi] &&
                    inbox[oi].spec.spec.kind == Specialization::Kind::Instruction)
                    ev(TraceKind::InstructionIgnored, a.path, object_text(inbox[oi].spec),
                       token(inbox[oi]) + " no rule fired");
        }
    }

    void expire_windows() {
        for (std::size_t wi = 0; wi < windows.size(); ++wi) {
            if (windows[wi].done) continue;
            if (tick < windows[wi].opened + windows[wi].duration) continue;
            auto body = windows[wi].body;
            std::size_t owner = windows[wi].owner;
            int id = windows[wi].id;
            windows[wi].done = true;
            if (body) run_actions(owner, *body, nullptr, id);
        }
        windows.erase(std::remove_if(windows.begin(), windows.end(),
                                     [](const RWindow& w) { return w.done; }),
                      windows.end());
    }

    bool quiescent() const {
        if (tick == 0) return false;
        for (const auto& q : queues)
            if (!q.empty()) return false;
        for (const RWindow& w : windows)
            if (!w.done) return false;
        return true;
    }

    void run(int max_ticks) {
        for (int i = 0; i < max_ticks; ++i) {
            if (quiescent()) break;
            if (tick == 0) startup();
            deliver();
            fire_rules();
            expire_windows();
            ++tick;
        }
    }
};

} // namespace

std::string reference_trace_jsonl(const Model& m, std::uint64_t /*seed*/, int max_ticks) {
    Ref ref(m);
    ref.run(max_ticks);
    return to_jsonl(ref.trace);
}

} // namespace amn_test
