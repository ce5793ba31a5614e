#include <cstdlib>

#include "amn/dsl.hpp"
#include "lexer.hpp"

namespace amn {
namespace {

using dsl_detail::Tok;
using dsl_detail::Token;

/// Recursive-descent parser. Statements that fail to parse are skipped up to
/// the next plausible statement start so later errors still surface.
struct Parser {
    const std::vector<Token>& toks;
    std::size_t pos = 0;
    Model model;
    std::vector<Diagnostic> diags;

    explicit Parser(const std::vector<Token>& t) : toks(t) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& prev() const { return toks[pos == 0 ? 0 : pos - 1]; }
    bool at_end() const { return peek().kind == Tok::End; }

    bool is_punct(const char* p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text == p;
    }
    bool is_word(const char* w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == w;
    }

    const Token& advance() {
        const Token& t = peek();
        if (!at_end()) ++pos;
        return t;
    }
    bool match_punct(const char* p) {
        if (!is_punct(p)) return false;
        advance();
        return true;
    }
    bool match_word(const char* w) {
        if (!is_word(w)) return false;
        advance();
        return true;
    }

    void error_at(const SourceSpan& span, const std::string& msg,
                  const char* code = "AMN-SYN-01") {
        diags.push_back(Diagnostic{code, Severity::Error, msg, span, {}});
    }

    // Fails the current statement: records a diagnostic and throws to the
    // recovery point.
    struct Bail {};
    [[noreturn]] void fail_at(const SourceSpan& span, const std::string& msg) {
        error_at(span, msg);
        throw Bail{};
    }
    [[noreturn]] void fail(const std::string& msg) {
        const Token& t = peek();
        std::string what = msg;
        what += " (found ";
        if (t.kind == Tok::End) {
            what += "end of input";
            error_at(t.span, what + ")", "AMN-SYN-04");
        } else {
            what += t.kind == Tok::String ? "string" : "\"" + t.text + "\"";
            error_at(t.span, what + ")");
        }
        throw Bail{};
    }

    void expect_punct(const char* p, const char* what) {
        if (!match_punct(p)) fail(std::string("expected \"") + p + "\" " + what);
    }

    std::string expect_ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
        return advance().text;
    }

    std::string expect_string(const char* what) {
        if (peek().kind != Tok::String) fail(std::string("expected ") + what);
        return advance().text;
    }

    double expect_number(const char* what) {
        bool neg = false;
        if (is_punct("-") && peek(1).kind == Tok::Number) {
            advance();
            neg = true;
        }
        if (peek().kind != Tok::Number) fail(std::string("expected ") + what);
        auto v = parse_number(advance().text);
        if (!v) fail(std::string("expected ") + what);
        return neg ? -*v : *v;
    }

    int expect_int(const char* what) {
        const Token& t = peek();
        double v = expect_number(what);
        if (v != static_cast<double>(static_cast<long long>(v)))
            error_at(t.span, std::string("expected a whole number, not ") + format_number(v));
        if (v < 0 || v > 1e9) {
            error_at(t.span, std::string("value out of range for ") + what);
            v = v < 0 ? 0 : 1e9;
        }
        return static_cast<int>(v);
    }

    // Skips to the next plausible statement start: a token at the beginning
    // of a later line, a closing brace, or end of input. Brace groups opened
    // while skipping are consumed whole.
    void sync(int start_line) {
        int depth = 0;
        while (!at_end()) {
            const Token& t = peek();
            if (depth == 0) {
                if (t.kind == Tok::Punct && (t.text == "}" || t.text == ";")) return;
                if (t.span.start.line > start_line && t.span.start.col == 1) return;
                if (t.span.start.line > start_line && t.kind == Tok::Ident) return;
            }
            if (t.kind == Tok::Punct && (t.text == "{" || t.text == "[" || t.text == "("))
                ++depth;
            if (t.kind == Tok::Punct && (t.text == "}" || t.text == "]" || t.text == ")"))
                depth = depth > 0 ? depth - 1 : 0;
            advance();
        }
    }

    void record_span(const std::string& id, const SourceSpan& start_span) {
        SourceSpan s = start_span;
        s.end = prev().span.end;
        model.source_spans.emplace(id, s);
    }

    // -- vocabulary helpers --------------------------------------------------

    std::optional<Modality> try_modality() {
        static const std::pair<const char*, ModalityBase> bases[] = {
            {"visual", ModalityBase::Visual},       {"auditory", ModalityBase::Auditory},
            {"olfactory", ModalityBase::Olfactory}, {"gustatory", ModalityBase::Gustatory},
            {"tactile", ModalityBase::Tactile},
        };
        for (const auto& [name, base] : bases)
            if (match_word(name)) return Modality::basic(base);
        if (match_word("generic")) {
            expect_punct("(", "after \"generic\"");
            std::string tag = expect_string("a quoted media tag");
            expect_punct(")", "after the media tag");
            return Modality::generic(std::move(tag));
        }
        return std::nullopt;
    }

    Modality expect_modality() {
        auto m = try_modality();
        if (!m) fail("expected a modality (visual, auditory, olfactory, gustatory, tactile, or generic(\"tag\"))");
        return *m;
    }

    // Specialization arguments are read as written; unknown or missing values
    // stay unset for the validator to judge.
    std::optional<Specialization> try_spec() {
        auto arg_word = [&]() -> std::optional<std::string> {
            if (!match_punct("(")) return std::nullopt;
            std::string word;
            if (peek().kind == Tok::Ident) word = advance().text;
            expect_punct(")", "after the specialization argument");
            return word;
        };
        if (match_word("generic")) {
            Specialization s;
            s.kind = Specialization::Kind::Generic;
            if (match_punct("(")) {
                s.generic_tag = expect_string("a quoted tag");
                expect_punct(")", "after the tag");
            }
            return s;
        }
        if (match_word("reaction")) {
            Specialization s;
            s.kind = Specialization::Kind::Reaction;
            if (auto w = arg_word(); w && !w->empty()) s.reaction = reaction_from(*w);
            return s;
        }
        if (match_word("task")) return Specialization::task();
        if (match_word("candidates")) return Specialization::candidates();
        if (match_word("instruction")) {
            Specialization s;
            s.kind = Specialization::Kind::Instruction;
            if (auto w = arg_word(); w && !w->empty()) {
                InstructionKind k;
                if (*w == "instantiate") k.base = InstructionKind::Base::Instantiate;
                else if (*w == "suspend") k.base = InstructionKind::Base::Suspend;
                else if (*w == "abort") k.base = InstructionKind::Base::Abort;
                else { k.base = InstructionKind::Base::Custom; k.custom = *w; }
                s.instruction = std::move(k);
            }
            return s;
        }
        if (match_word("notification")) {
            Specialization s;
            s.kind = Specialization::Kind::Notification;
            if (auto w = arg_word(); w && !w->empty()) s.notification = notification_from(*w);
            return s;
        }
        if (match_word("metric")) return Specialization::metric();
        return std::nullopt;
    }

    Specialization expect_spec() {
        auto s = try_spec();
        if (!s) fail("expected an event object kind (generic, reaction, task, candidates, instruction, notification, or metric)");
        return *s;
    }

    // objspec := spec "/" IDENT ["@" modality]. The quant word is validated
    // later so unknown indicators produce a catalogued finding, not a parse
    // error.
    EventObjectSpec parse_objspec() {
        EventObjectSpec obj;
        obj.spec = expect_spec();
        expect_punct("/", "after the object kind");
        std::string q = expect_ident("a scope indicator (single, selection, or all)");
        obj.quant = quant_from(q);
        if (!obj.quant) obj.quant_word = q; // kept for the validator and printer
        if (match_punct("@")) obj.media = expect_modality();
        return obj;
    }

    // -- expressions ---------------------------------------------------------

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr e = parse_and();
        while (is_punct("||")) {
            advance();
            e = Expr::binary(Expr::Op::Or, std::move(e), parse_and());
        }
        return e;
    }

    Expr parse_and() {
        Expr e = parse_cmp();
        while (is_punct("&&")) {
            advance();
            e = Expr::binary(Expr::Op::And, std::move(e), parse_cmp());
        }
        return e;
    }

    Expr parse_cmp() {
        Expr e = parse_add();
        static const std::pair<const char*, Expr::Op> ops[] = {
            {"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<=", Expr::Op::Le},
            {">=", Expr::Op::Ge}, {"<", Expr::Op::Lt},  {">", Expr::Op::Gt},
        };
        for (const auto& [p, op] : ops)
            if (is_punct(p)) {
                advance();
                return Expr::binary(op, std::move(e), parse_add());
            }
        return e;
    }

    Expr parse_add() {
        Expr e = parse_mul();
        while (true) {
            if (is_punct("+")) {
                advance();
                e = Expr::binary(Expr::Op::Add, std::move(e), parse_mul());
            } else if (is_punct("-")) {
                advance();
                e = Expr::binary(Expr::Op::Sub, std::move(e), parse_mul());
            } else {
                return e;
            }
        }
    }

    Expr parse_mul() {
        Expr e = parse_unary();
        while (true) {
            if (is_punct("*")) {
                advance();
                e = Expr::binary(Expr::Op::Mul, std::move(e), parse_unary());
            } else if (is_punct("/")) {
                advance();
                e = Expr::binary(Expr::Op::Div, std::move(e), parse_unary());
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (match_punct("!")) return Expr::unary(Expr::Op::Not, parse_unary());
        if (match_punct("-")) return Expr::unary(Expr::Op::Neg, parse_unary());
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            advance();
            auto v = parse_number(t.text);
            if (!v) fail("malformed number");
            return Expr::lit(Value(*v));
        }
        if (t.kind == Tok::String) {
            advance();
            return Expr::lit(Value(t.text));
        }
        if (match_punct("(")) {
            Expr e = parse_expr();
            expect_punct(")", "to close the expression");
            return e;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "true") { advance(); return Expr::lit(Value(true)); }
            if (t.text == "false") { advance(); return Expr::lit(Value(false)); }
            if ((t.text == "selected" || t.text == "object") && is_punct(".", 1)) {
                Expr::Scope scope = t.text == "selected" ? Expr::Scope::Selected
                                                         : Expr::Scope::Object;
                advance();
                advance();
                return Expr::var(scope, expect_ident("a payload field name"));
            }
            advance();
            return Expr::var(Expr::Scope::State, t.text);
        }
        fail("expected an expression");
    }

    Value parse_literal() {
        const Token& t = peek();
        if (t.kind == Tok::String) {
            advance();
            return Value(t.text);
        }
        if (t.kind == Tok::Number || (is_punct("-") && peek(1).kind == Tok::Number))
            return Value(expect_number("a literal value"));
        if (match_word("true")) return Value(true);
        if (match_word("false")) return Value(false);
        fail("expected a literal (number, string, true, or false)");
    }

    // -- behavior ------------------------------------------------------------

    EventPattern parse_pattern() {
        EventPattern p;
        p.spec = expect_spec();
        if (match_punct("/")) {
            std::string q = expect_ident("a scope indicator");
            p.quant = quant_from(q);
            if (!p.quant) p.quant_word = q; // kept for the validator and printer
        }
        if (match_word("via")) p.media = expect_modality();
        if (match_word("from")) p.sender = parse_dotted_path();
        return p;
    }

    std::string parse_dotted_path() {
        std::string path = expect_ident("an agent name");
        while (is_punct(".") && peek(1).kind == Tok::Ident) {
            advance();
            path += "." + advance().text;
        }
        return path;
    }

    Actions parse_actions() {
        Actions out;
        out.push_back(parse_action());
        while (match_punct(",")) out.push_back(parse_action());
        return out;
    }

    Action parse_action() {
        if (match_word("emit")) {
            std::string act = expect_ident("an actuator name");
            EventObjectSpec obj = parse_objspec();
            std::vector<std::pair<std::string, Expr>> payload;
            if (match_word("with")) {
                expect_punct("{", "to open the payload");
                if (!is_punct("}")) {
                    do {
                        std::string key = expect_ident("a payload field name");
                        expect_punct("=", "after the payload field name");
                        payload.emplace_back(std::move(key), parse_expr());
                    } while (match_punct(","));
                }
                expect_punct("}", "to close the payload");
            }
            return Action::emit(std::move(act), std::move(obj), std::move(payload));
        }
        if (match_word("set")) {
            std::string name = expect_ident("a state name");
            expect_punct("=", "after the state name");
            return Action::set_state(std::move(name), parse_expr());
        }
        if (match_word("select")) {
            if (match_word("utility")) return Action::select(SelectStrategy::UtilityArgmax);
            if (match_word("first")) return Action::select(SelectStrategy::First);
            if (match_word("rule"))
                return Action::select(SelectStrategy::RuleNamed, expect_ident("a rule name"));
            fail("expected a selection strategy (utility, first, or rule <name>)");
        }
        if (match_word("window")) {
            int d = expect_int("a window length in ticks");
            expect_punct("{", "to open the expiry actions");
            Actions body = parse_actions();
            expect_punct("}", "to close the expiry actions");
            return Action::window(d, std::move(body));
        }
        if (match_word("commit")) return Action::commit();
        if (match_word("abort")) return Action::abort_pending();
        fail("expected an action (emit, set, select, window, commit, or abort)");
    }

    // -- agent bodies ----------------------------------------------------------

    void set_nature_field(AgentDef& agent, const char* field, auto& slot, auto value,
                          const SourceSpan& span) {
        if (slot.has_value()) {
            agent.duplicate_decls.push_back(field);
            // Keep the first declaration; the validator reports the repeat.
            (void)span;
            return;
        }
        slot = std::move(value);
    }

    void parse_clause(AgentDef& agent, const std::string& spanpath) {
        const Token& t = peek();
        SourceSpan start = t.span;

        auto next_is_ident = [&] { return peek(1).kind == Tok::Ident; };
        auto next_is_string = [&] { return peek(1).kind == Tok::String; };

        if ((is_word("sensor") || is_word("actuator")) && next_is_ident()) {
            InterfaceDir dir = t.text == "sensor" ? InterfaceDir::Sensor : InterfaceDir::Actuator;
            advance();
            Interface iface;
            iface.dir = dir;
            iface.name = expect_ident("an interface name");
            expect_punct(":", "after the interface name");
            iface.modality = expect_modality();
            record_span(id_iface(spanpath, dir, iface.name), start);
            (dir == InterfaceDir::Sensor ? agent.sensors : agent.actuators).push_back(std::move(iface));
            return;
        }
        if (is_word("social") && next_is_ident()) {
            advance();
            SourceSpan wspan = peek().span;
            std::string w = expect_ident("a social self-concept");
            auto v = social_from(w);
            if (!v) fail_at(wspan, "unknown social self-concept \"" + w +
                                       "\" (expected self_interested, helpful, or cooperative)");
            set_nature_field(agent, "social", agent.nature.social, *v, start);
            return;
        }
        if (is_word("ethics") && next_is_ident()) {
            advance();
            SourceSpan wspan = peek().span;
            std::string w = expect_ident("an ethical concept");
            auto v = ethical_from(w);
            if (!v) fail_at(wspan, "unknown ethical concept \"" + w +
                                       "\" (expected non_ethical, implicit, explicit, or full)");
            set_nature_field(agent, "ethics", agent.nature.ethical, *v, start);
            return;
        }
        if (is_word("type") && next_is_ident()) {
            advance();
            SourceSpan wspan = peek().span;
            std::string w = expect_ident("an autonomy type");
            auto v = autonomy_type_from(w);
            if (!v) fail_at(wspan, "unknown autonomy type \"" + w + "\"");
            set_nature_field(agent, "type", agent.nature.autonomy_type, *v, start);
            return;
        }
        if (is_word("archetype") && next_is_ident()) {
            advance();
            SourceSpan wspan = peek().span;
            std::string w = expect_ident("a processing archetype");
            auto v = archetype_from(w);
            if (!v) fail_at(wspan, "unknown processing archetype \"" + w +
                                       "\" (expected reflex, internal_state, goal_based, or utility_based)");
            set_nature_field(agent, "archetype", agent.nature.archetype, *v, start);
            return;
        }
        if (is_word("functional") && next_is_string()) {
            advance();
            std::string tag = expect_string("a quoted functional type");
            set_nature_field(agent, "functional", agent.nature.functional_type, tag, start);
            return;
        }
        if (is_word("goal") && next_is_ident()) {
            advance();
            Goal g;
            g.name = expect_ident("a goal name");
            g.priority = expect_int("goal priority");
            expect_punct(":", "after the goal priority");
            g.target = parse_expr();
            record_span(id_goal(spanpath, g.name), start);
            agent.behavior.goals.push_back(std::move(g));
            return;
        }
        if (is_word("utility") && next_is_ident()) {
            advance();
            UtilityFunction u;
            do {
                UtilityTerm term;
                term.metric = expect_ident("a metric name");
                expect_punct("*", "after the metric name");
                term.weight = expect_number("a term weight");
                u.terms.push_back(std::move(term));
            } while (match_punct(","));
            if (agent.behavior.utility) {
                agent.duplicate_decls.push_back("utility");
            } else {
                agent.behavior.utility = std::move(u);
                record_span(id_utility(spanpath), start);
            }
            return;
        }
        if (is_word("rule") && next_is_ident()) {
            advance();
            Rule r;
            r.name = expect_ident("a rule name");
            expect_punct(":", "after the rule name");
            if (!match_word("on")) fail("expected \"on\" to introduce the trigger");
            r.trigger = parse_pattern();
            if (match_word("if")) r.guard = parse_expr();
            if (match_word("delegate")) {
                RandomDelegation d;
                d.probability = expect_number("a delegation percentage") / 100.0;
                expect_punct("%", "after the delegation percentage");
                d.actuator = expect_ident("an actuator name");
                r.delegation = std::move(d);
            }
            if (!match_word("then")) fail("expected \"then\" before the actions");
            r.actions = parse_actions();
            record_span(id_rule(spanpath, r.name), start);
            agent.behavior.rules.push_back(std::move(r));
            return;
        }
        if (is_word("state") && next_is_ident()) {
            advance();
            std::string name = expect_ident("a state name");
            expect_punct("=", "after the state name");
            Value v = parse_literal();
            if (agent.behavior.states.count(name)) {
                agent.duplicate_decls.push_back("state:" + name);
            } else {
                record_span(id_state(spanpath, name), start);
                agent.behavior.states.emplace(std::move(name), std::move(v));
            }
            return;
        }
        if ((is_word("agent") && next_is_ident()) ||
            (is_word("calling") && is_word("agent", 1))) {
            agent.children.push_back(parse_agent(spanpath));
            return;
        }
        fail("expected a clause (interface, nature, behavior, or child agent)");
    }

    AgentDef parse_agent(const std::string& parent_spanpath) {
        SourceSpan start = peek().span;
        AgentDef agent;
        if (match_word("calling")) agent.kind = AgentKind::Calling;
        if (!match_word("agent")) fail("expected \"agent\"");
        agent.name = expect_ident("an agent name");
        std::string spanpath = parent_spanpath.empty() ? agent.name
                               : parent_spanpath.back() == ':'
                                   ? parent_spanpath + agent.name
                                   : parent_spanpath + "." + agent.name;

        if (match_punct("[")) {
            std::uint32_t min = static_cast<std::uint32_t>(expect_int("a minimum instance count"));
            expect_punct("..", "in the cardinality range");
            std::optional<std::uint32_t> max;
            if (match_punct("*")) {
                max = std::nullopt;
            } else {
                max = static_cast<std::uint32_t>(expect_int("a maximum instance count"));
            }
            expect_punct("]", "to close the cardinality range");
            agent.instancing = Instancing::multi(min, max);
        }

        if (match_punct(";")) {
            // Bodyless declaration: a reference to a global definition.
            if (agent.kind == AgentKind::Calling)
                error_at(start, "a global reference cannot be marked calling");
            if (agent.instancing != Instancing::single())
                error_at(start, "a global reference cannot declare instance counts");
            agent.kind = AgentKind::GlobalRef;
            agent.instancing = Instancing::single();
            record_span(id_agent(spanpath), start);
            return agent;
        }

        expect_punct("{", "to open the agent body");
        while (!is_punct("}") && !at_end()) {
            std::size_t before = pos;
            try {
                parse_clause(agent, spanpath);
            } catch (Bail&) {
                sync(toks[before].span.start.line);
                if (pos == before) advance(); // guarantee progress
            }
            match_punct(";");
        }
        expect_punct("}", "to close the agent body");
        record_span(id_agent(spanpath), start);
        return agent;
    }

    void parse_connection() {
        SourceSpan start = peek().span;
        auto parse_endpoint = [&]() {
            std::string path = parse_dotted_path();
            std::size_t dot = path.rfind('.');
            if (dot == std::string::npos)
                fail("a connection endpoint needs an agent path and an interface name");
            Endpoint e;
            e.path = path.substr(0, dot);
            e.name = path.substr(dot + 1);
            return e;
        };

        Connection c;
        c.from = parse_endpoint();
        if (match_punct("->")) {
            c.style = ConnectionStyle::Continuous;
        } else if (match_punct("-->")) {
            c.style = ConnectionStyle::Discontinuous;
        } else {
            fail("expected \"->\" or \"-->\" between the endpoints");
        }
        c.to = parse_endpoint();

        if (match_punct("{")) {
            if (!is_punct("}")) {
                do {
                    std::string name = expect_ident("a channel parameter name");
                    expect_punct("=", "after the parameter name");
                    double v = expect_number("a percentage") / 100.0;
                    expect_punct("%", "after the parameter value");
                    if (name == "attention") c.params.attention = v;
                    else if (name == "reliability") c.params.reliability = v;
                    else if (name == "conformity") c.params.conformity = v;
                    else if (name == "security") c.params.security = v;
                    else fail("unknown channel parameter \"" + name +
                              "\" (expected attention, reliability, conformity, or security)");
                } while (match_punct(","));
            }
            expect_punct("}", "to close the channel parameters");
        }

        std::vector<SourceSpan> obj_spans;
        if (match_word("carries")) {
            do {
                SourceSpan ospan = peek().span;
                c.carries.push_back(parse_objspec());
                ospan.end = prev().span.end;
                obj_spans.push_back(ospan);
            } while (match_punct(","));
        }

        // Spans are committed only once the whole statement parsed, so a
        // failed connection cannot leave entries behind under an index a
        // later connection will occupy.
        std::size_t conn_index = model.connections.size();
        for (std::size_t i = 0; i < obj_spans.size(); ++i)
            model.source_spans.emplace(id_carried(conn_index, i), obj_spans[i]);
        record_span(id_connection(conn_index), start);
        model.connections.push_back(std::move(c));
    }

    void parse_top() {
        while (!at_end()) {
            std::size_t before = pos;
            try {
                if (is_word("global")) {
                    SourceSpan start = peek().span;
                    advance();
                    if (!is_word("agent") && !is_word("calling"))
                        fail("expected an agent definition after \"global\"");
                    AgentDef def = parse_agent("global:");
                    if (def.kind == AgentKind::GlobalRef)
                        error_at(start, "a global definition needs a body");
                    if (model.globals.count(def.name)) {
                        // The map cannot hold both definitions, so the name
                        // clash is reported here rather than by the validator.
                        error_at(start, "duplicate name \"" + def.name + "\": a global with this name already exists",
                                 "AMN-GEN-01");
                    } else {
                        std::string name = def.name;
                        model.globals.emplace(std::move(name), std::move(def));
                    }
                } else if ((is_word("agent") && peek(1).kind == Tok::Ident) ||
                           (is_word("calling") && is_word("agent", 1))) {
                    // Duplicate root names are preserved; the validator
                    // reports them.
                    model.roots.push_back(parse_agent(""));
                } else if (peek().kind == Tok::Ident) {
                    parse_connection();
                } else if (is_punct("}") || is_punct(";")) {
                    error_at(peek().span, "unexpected \"" + peek().text + "\"");
                    advance();
                } else {
                    fail("expected an agent definition or a connection");
                }
            } catch (Bail&) {
                sync(toks[before].span.start.line);
                if (pos == before && !at_end()) advance();
                while (!at_end() && (is_punct("}") || is_punct(";"))) advance();
            }
        }
    }
};

} // namespace

ParseResult parse(const std::string& text, const std::string& filename) {
    auto lexed = dsl_detail::lex(text, filename);
    Parser p(lexed.tokens);
    p.diags = std::move(lexed.diagnostics);
    p.parse_top();

    ParseResult out;
    out.model = std::move(p.model);
    out.diagnostics = std::move(p.diags);
    sort_diagnostics(out.diagnostics);
    return out;
}

FmtResult fmt(const std::string& text, const std::string& filename) {
    FmtResult out;
    ParseResult parsed = parse(text, filename);
    out.diagnostics = parsed.diagnostics;
    if (has_errors(parsed.diagnostics)) return out;
    out.ok = true;
    out.text = print(parsed.model);
    return out;
}

} // namespace amn
