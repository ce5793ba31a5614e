#include "model_gen.hpp"

#include <initializer_list>
#include <random>
#include <sstream>
#include <vector>

namespace amn_test {

namespace {

struct Gen {
    std::mt19937_64 rng;
    std::ostringstream out;
    int names = 0;

    // Interfaces declared so far, as (agent path, name) pairs, so connections
    // can point at things that exist.
    std::vector<std::pair<std::string, std::string>> actuators;
    std::vector<std::pair<std::string, std::string>> sensors;
    std::vector<std::string> globals;

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
    bool chance(int pct) { return pick(100) < pct; }
    std::string fresh(const char* prefix) { return prefix + std::to_string(names++); }

    const char* one(std::initializer_list<const char*> xs) {
        return *(xs.begin() + pick(static_cast<int>(xs.size())));
    }

    std::string indent(int d) { return std::string(static_cast<std::size_t>(d) * 2, ' '); }
};

// ---------------------------------------------------------------------------
// Grammar-wide generator

struct FullGen : Gen {
    using Gen::Gen;

    std::string modality() {
        if (chance(30)) return std::string("generic(\"tag") + std::to_string(pick(3)) + "\")";
        return one({"visual", "auditory", "olfactory", "gustatory", "tactile"});
    }

    std::string spec(bool with_args) {
        switch (pick(7)) {
            case 0:
                return with_args || chance(70)
                           ? std::string("generic(\"kind") + std::to_string(pick(3)) + "\")"
                           : "generic";
            case 1:
                return with_args || chance(70)
                           ? std::string("reaction(") + one({"acceptance", "refusal", "veto"}) + ")"
                           : "reaction";
            case 2: return "task";
            case 3: return "candidates";
            case 4:
                return with_args || chance(70)
                           ? std::string("instruction(") +
                                 one({"instantiate", "suspend", "abort", "pause", "resume"}) + ")"
                           : "instruction";
            case 5:
                return with_args || chance(70)
                           ? std::string("notification(") +
                                 one({"discretion", "on_request", "always"}) + ")"
                           : "notification";
            default: return "metric";
        }
    }

    std::string quant() { return one({"single", "selection", "all"}); }

    std::string objspec() {
        std::string s = spec(true) + " / " + quant();
        if (chance(15)) s += " @ " + modality();
        return s;
    }

    std::string number() {
        if (chance(30)) return std::to_string(pick(30)) + "." + std::to_string(pick(10));
        return std::to_string(pick(30));
    }

    std::string primary() {
        switch (pick(6)) {
            case 0: return number();
            case 1: return std::string("\"w") + std::to_string(pick(5)) + "\"";
            case 2: return one({"true", "false"});
            case 3: return std::string("selected.f") + std::to_string(pick(3));
            case 4: return std::string("object.f") + std::to_string(pick(3));
            default: return std::string("v") + std::to_string(pick(4));
        }
    }

    // Fully parenthesized, so generated text never depends on precedence; the
    // canonical printer is what decides the minimal form.
    std::string expr(int depth) {
        if (depth <= 0 || chance(35)) return primary();
        if (chance(20)) return std::string("(") + one({"!", "-"}) + expr(depth - 1) + ")";
        const char* op = one({"||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/"});
        return "(" + expr(depth - 1) + " " + op + " " + expr(depth - 1) + ")";
    }

    std::string actuator_word() {
        if (!actuators.empty() && chance(80))
            return actuators[static_cast<std::size_t>(pick(static_cast<int>(actuators.size())))]
                .second;
        return fresh("ax");
    }

    void actions(int d, int depth) {
        int n = 1 + pick(2);
        for (int i = 0; i < n; ++i) {
            if (i) out << ",\n" << indent(d);
            switch (pick(6)) {
                case 0: {
                    out << "emit " << actuator_word() << " " << objspec();
                    if (chance(40)) {
                        out << " with { k0 = " << expr(2);
                        if (chance(40)) out << ", k1 = " << expr(1);
                        out << " }";
                    }
                    break;
                }
                case 1: out << "set v" << pick(4) << " = " << expr(2); break;
                case 2:
                    if (chance(50)) out << "select " << one({"utility", "first"});
                    else out << "select rule rr" << pick(4);
                    break;
                case 3:
                    if (depth > 0) {
                        out << "window " << (1 + pick(20)) << " {\n" << indent(d + 1);
                        actions(d + 1, depth - 1);
                        out << "\n" << indent(d) << "}";
                    } else {
                        out << "commit";
                    }
                    break;
                case 4: out << "commit"; break;
                default: out << "abort"; break;
            }
        }
    }

    void agent(const std::string& parent, int d, int depth) {
        std::string name = fresh("Ag");
        std::string path = parent.empty() ? name : parent + "." + name;
        out << indent(d);
        bool called = chance(10);
        if (called) out << "calling ";
        out << "agent " << name;
        if (!called && chance(20)) {
            int lo = 1 + pick(2);
            out << " [" << lo << " .. ";
            if (chance(40)) out << "*";
            else out << lo + pick(3);
            out << "]";
        }
        out << " {\n";

        int ifaces = 1 + pick(3);
        for (int i = 0; i < ifaces; ++i) {
            bool sensor = chance(50);
            std::string iname = fresh(sensor ? "sn" : "ac");
            out << indent(d + 1) << (sensor ? "sensor " : "actuator ") << iname << " : "
                << modality() << ";\n";
            (sensor ? sensors : actuators).emplace_back(path, iname);
        }
        if (chance(40))
            out << indent(d + 1) << "social "
                << one({"self_interested", "helpful", "cooperative"}) << ";\n";
        if (chance(30))
            out << indent(d + 1) << "ethics "
                << one({"non_ethical", "implicit", "explicit", "full"}) << ";\n";
        if (chance(30))
            out << indent(d + 1) << "type "
                << one({"interpretation", "know_how", "plan", "goal", "reasoning", "monitoring",
                        "skill", "resource", "condition"})
                << ";\n";
        if (chance(30))
            out << indent(d + 1) << "archetype "
                << one({"reflex", "internal_state", "goal_based", "utility_based"}) << ";\n";
        if (chance(25)) out << indent(d + 1) << "functional \"role" << pick(4) << "\";\n";

        int states = pick(3);
        for (int i = 0; i < states; ++i) {
            out << indent(d + 1) << "state v" << i << " = ";
            switch (pick(4)) {
                case 0: out << pick(50); break;
                case 1: out << "-" << 1 + pick(50); break;
                case 2: out << one({"true", "false"}); break;
                default: out << "\"s" << pick(5) << "\""; break;
            }
            out << ";\n";
        }
        int goals = pick(3);
        for (int i = 0; i < goals; ++i)
            out << indent(d + 1) << "goal " << fresh("gl") << " " << i + 1 << " : " << expr(2)
                << ";\n";
        if (chance(20)) {
            out << indent(d + 1) << "utility m0 * " << number();
            if (chance(50)) out << ", m1 * -" << number();
            out << ";\n";
        }

        int rules = pick(3);
        for (int i = 0; i < rules; ++i) {
            out << indent(d + 1) << "rule " << fresh("rl") << " : on " << spec(false);
            if (chance(50)) out << " / " << (chance(85) ? quant() : "bulk");
            if (chance(25)) out << " via " << modality();
            if (chance(25)) out << " from Ag" << pick(names + 1);
            if (chance(40)) out << " if " << expr(2);
            if (chance(15)) out << " delegate " << 1 + pick(99) << "% " << actuator_word();
            out << " then ";
            actions(d + 2, 1);
            out << ";\n";
        }

        if (!called && depth > 0) {
            int kids = pick(3);
            for (int i = 0; i < kids; ++i) {
                if (!globals.empty() && chance(25))
                    out << indent(d + 1) << "agent "
                        << globals[static_cast<std::size_t>(
                               pick(static_cast<int>(globals.size())))]
                        << ";\n";
                else
                    agent(path, d + 1, depth - 1);
            }
        }
        out << indent(d) << "}\n";
    }

    std::string endpoint(const std::vector<std::pair<std::string, std::string>>& pool) {
        if (!pool.empty() && chance(85)) {
            const auto& [p, n] = pool[static_cast<std::size_t>(pick(static_cast<int>(pool.size())))];
            return p + "." + n;
        }
        return std::string("Zed") + std::to_string(pick(3)) + ".port";
    }

    std::string build() {
        int ngl = chance(30) ? 1 : 0;
        for (int i = 0; i < ngl; ++i) {
            std::string g = fresh("Gl");
            globals.push_back(g);
            out << "global agent " << g << " {\n";
            out << indent(1) << "sensor gs : " << modality() << ";\n";
            if (chance(50)) out << indent(1) << "actuator ga : " << modality() << ";\n";
            out << "}\n\n";
        }
        int roots = 1 + pick(3);
        for (int i = 0; i < roots; ++i) {
            agent("", 0, 2);
            out << "\n";
        }
        int conns = pick(4);
        for (int i = 0; i < conns; ++i) {
            out << endpoint(actuators) << (chance(20) ? " --> " : " -> ") << endpoint(sensors);
            if (chance(60)) {
                out << " {";
                const char* sep = " ";
                if (chance(80)) {
                    out << sep << "attention = " << 1 + pick(100) << "%";
                    sep = ", ";
                }
                if (chance(60)) {
                    out << sep << "reliability = " << 1 + pick(100) << "%";
                    sep = ", ";
                }
                if (chance(30)) {
                    out << sep << "conformity = " << 1 + pick(100) << "%";
                    sep = ", ";
                }
                if (chance(20)) out << sep << "security = " << 1 + pick(100) << "%";
                out << " }";
            }
            if (chance(70)) {
                out << " carries " << objspec();
                if (chance(30)) out << ", " << objspec();
            }
            out << "\n";
        }
        return out.str();
    }
};

// ---------------------------------------------------------------------------
// Runnable generator

struct RunnableGen : Gen {
    using Gen::Gen;

    int agents = 0;
    std::vector<int> state_count; // per agent

    std::string aname(int i) { return "Ag" + std::to_string(i); }

    const char* message_spec() {
        return one({"task", "reaction(acceptance)", "reaction(refusal)"});
    }

    std::string state_expr(int agent) {
        std::string v = "s" + std::to_string(pick(state_count[static_cast<std::size_t>(agent)]));
        switch (pick(3)) {
            case 0: return "(" + v + " + 1)";
            case 1: return "(" + v + " + " + std::to_string(pick(4)) + ")";
            default: return std::to_string(pick(6));
        }
    }

    // One or two plain actions, then possibly a window or a commit.
    void actions(int agent, int d) {
        bool has_states = state_count[static_cast<std::size_t>(agent)] > 0;
        int n = 1 + pick(2);
        for (int i = 0; i < n; ++i) {
            if (i) out << ",\n" << indent(d);
            if (has_states && chance(40)) {
                out << "set s" << pick(state_count[static_cast<std::size_t>(agent)]) << " = "
                    << state_expr(agent);
            } else {
                out << "emit out_q " << message_spec() << " / " << (chance(75) ? "single" : "all");
                if (has_states && chance(30)) out << " with { v = " << state_expr(agent) << " }";
            }
        }
        if (chance(25)) {
            out << ",\n" << indent(d) << "window " << 1 + pick(2) << " {\n"
                << indent(d + 1) << "emit out_q " << message_spec() << " / single,\n"
                << indent(d + 1) << "commit\n"
                << indent(d) << "}";
        } else if (chance(15)) {
            out << ",\n" << indent(d) << (chance(50) ? "commit" : "abort");
        }
    }

    std::string build() {
        agents = 2 + pick(2);
        for (int i = 0; i < agents; ++i) state_count.push_back(pick(3));

        for (int i = 0; i < agents; ++i) {
            out << "agent " << aname(i) << " {\n";
            out << indent(1) << "sensor in_q : generic(\"m\");\n";
            out << indent(1) << "actuator out_q : generic(\"m\");\n";
            for (int s = 0; s < state_count[static_cast<std::size_t>(i)]; ++s)
                out << indent(1) << "state s" << s << " = " << pick(3) << ";\n";

            int rules = 1 + pick(2);
            for (int r = 0; r < rules; ++r) {
                out << indent(1) << "rule r" << r << " : on ";
                if (i == 0 && r == 0) {
                    out << "instruction(instantiate)";
                } else {
                    out << message_spec();
                    if (chance(40)) out << " / " << (chance(60) ? "single" : "all");
                }
                if (state_count[static_cast<std::size_t>(i)] > 0 && chance(40))
                    out << " if s" << pick(state_count[static_cast<std::size_t>(i)])
                        << (chance(50) ? " < " : " >= ") << pick(5);
                out << " then ";
                actions(i, 2);
                out << ";\n";
            }
            out << "}\n\n";
        }

        for (int i = 0; i < agents; ++i) {
            int to = (i + 1) % agents;
            out << aname(i) << ".out_q " << (chance(15) ? "--> " : "-> ") << aname(to)
                << ".in_q { attention = " << one({"25", "50", "100"})
                << "%, reliability = " << one({"100", "90", "40"}) << "% }"
                << " carries task / single, reaction(acceptance) / single, "
                   "reaction(refusal) / single\n";
        }
        if (agents > 2 && chance(30))
            out << aname(0) << ".out_q -> " << aname(agents - 1)
                << ".in_q { attention = 50%, reliability = 100% }"
                << " carries task / single, reaction(acceptance) / single\n";
        return out.str();
    }
};

} // namespace

std::string random_model_text(std::uint64_t seed) { return FullGen(seed).build(); }

std::string random_runnable_text(std::uint64_t seed) { return RunnableGen(seed).build(); }

} // namespace amn_test
