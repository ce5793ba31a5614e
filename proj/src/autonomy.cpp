#include <algorithm>
#include <map>
#include <set>

#include "amn/autonomy.hpp"

namespace amn {
namespace {

// ---------------------------------------------------------------------------
// Subtree walking that reads through global references

void walk_deref(const Model& m, const AgentDef& a, const std::string& path,
                const std::function<void(const std::string&, const AgentDef&)>& fn,
                int depth = 0) {
    if (depth > 64) return; // reference cycles are a validator finding
    const AgentDef* def = &a;
    if (def->kind == AgentKind::GlobalRef) {
        auto it = m.globals.find(def->name);
        if (it == m.globals.end()) return;
        def = &it->second;
    }
    fn(path, *def);
    for (const AgentDef& c : def->children)
        walk_deref(m, c, path + "." + c.name, fn, depth + 1);
}

// Calls fn for every agent under `root_path` (the agent itself included).
void walk_subtree(const Model& m, const std::string& root_path,
                  const std::function<void(const std::string&, const AgentDef&)>& fn) {
    auto r = resolve(m, root_path);
    if (!ok(r)) return;
    walk_deref(m, value(r), root_path, fn);
}

bool carries_kind(const Connection& c, Specialization::Kind kind) {
    for (const EventObjectSpec& o : c.carries)
        if (o.spec.kind == kind) return true;
    return false;
}

bool carries_reaction(const Connection& c, ReactionKind k) {
    for (const EventObjectSpec& o : c.carries)
        if (o.spec.kind == Specialization::Kind::Reaction && o.spec.reaction == k) return true;
    return false;
}

bool rule_has_action(const Rule& r, Action::Kind kind) {
    bool found = false;
    walk_actions(r.actions, [&](const Action& a) { found = found || a.kind == kind; });
    return found;
}

bool trigger_is(const EventPattern& p, Specialization::Kind kind) {
    return p.spec.kind == kind;
}

} // namespace

// ---------------------------------------------------------------------------
// Feature extraction

OpResult<InteractionProfile> extract_features(const Model& m, const std::string& human_path,
                                              const std::string& machine_path) {
    {
        auto h = resolve(m, human_path);
        if (!ok(h)) return error(h);
        auto mm = resolve(m, machine_path);
        if (!ok(mm)) return error(mm);
    }
    if (human_path == machine_path)
        return StructureError{StructureError::Kind::NoRelationship,
                              "\"" + human_path + "\" names both sides"};

    // When one subtree contains the other, the deeper root claims its agents.
    bool h_inside_m = path_within(human_path, machine_path);
    bool m_inside_h = path_within(machine_path, human_path);
    auto in_human = [&](const std::string& p) {
        return path_within(p, human_path) && !(m_inside_h && path_within(p, machine_path));
    };
    auto in_machine = [&](const std::string& p) {
        return path_within(p, machine_path) && !(h_inside_m && path_within(p, human_path));
    };

    // Side-classified channels. T = any agent outside both subtrees.
    std::vector<const Connection*> h2m, m2h, m2t, h2t;
    bool machine_touched = false, human_touched = false;
    for (const Connection& c : m.connections) {
        const std::string& f = c.from.path;
        const std::string& t = c.to.path;
        bool fh = in_human(f), th = in_human(t);
        bool fm = in_machine(f), tm = in_machine(t);
        machine_touched = machine_touched || fm || tm;
        human_touched = human_touched || fh || th;
        if (fh && tm) h2m.push_back(&c);
        else if (fm && th) m2h.push_back(&c);
        else if (fm && !tm && !th) m2t.push_back(&c);
        else if (fh && !th && !tm) h2t.push_back(&c);
    }

    // Behavior of each side.
    // resolve() hands back copies, so the rules are copied out rather than
    // held by pointer.
    std::vector<Rule> machine_rules;
    walk_subtree(m, machine_path, [&](const std::string& p, const AgentDef& a) {
        if (!in_machine(p)) return;
        for (const Rule& r : a.behavior.rules) machine_rules.push_back(r);
    });
    bool human_has_rules = false;
    walk_subtree(m, human_path, [&](const std::string& p, const AgentDef& a) {
        human_has_rules = human_has_rules || (in_human(p) && !a.behavior.rules.empty());
    });

    bool rd = false;
    for (const Rule& r : machine_rules) rd = rd || r.delegation.has_value();

    bool machine_active = !machine_rules.empty() || machine_touched;
    bool human_active = human_has_rules || human_touched;
    auto shares_ancestor = [&] {
        auto hs = split_path(human_path);
        auto ms = split_path(machine_path);
        return !hs.empty() && !ms.empty() && hs.front() == ms.front() &&
               human_path != machine_path;
    };

    // No direct channel between the sides: the machine either works alone or
    // is not involved at all.
    if (h2m.empty() && m2h.empty()) {
        if (machine_active) {
            InteractionProfile p;
            p.decision_authority = DecisionAuthority::Machine;
            p.executor = Executor::Machine;
            p.random_delegation = rd;
            return p;
        }
        if (human_active || shares_ancestor()) {
            return InteractionProfile{}; // defaults: human authority, human executor
        }
        return StructureError{StructureError::Kind::NoRelationship,
                              "\"" + human_path + "\" and \"" + machine_path +
                                  "\" share no channel, no ancestor, and neither acts"};
    }

    InteractionProfile p;

    // Decision authority: who settles which option is taken.
    bool m_sel = false;
    for (const Rule& r : machine_rules)
        m_sel = m_sel || rule_has_action(r, Action::Kind::SelectCandidate);
    bool human_sends_instructions = false;
    for (const Connection* c : h2m)
        human_sends_instructions =
            human_sends_instructions || carries_kind(*c, Specialization::Kind::Instruction);
    bool commit_on_instruction = false;
    for (const Rule& r : machine_rules)
        commit_on_instruction = commit_on_instruction ||
                                (trigger_is(r.trigger, Specialization::Kind::Instruction) &&
                                 rule_has_action(r, Action::Kind::Commit));
    bool gated = human_sends_instructions && commit_on_instruction;
    p.decision_authority = !m_sel             ? DecisionAuthority::Human
                           : gated            ? DecisionAuthority::Shared
                                              : DecisionAuthority::Machine;

    // Veto power, strongest wins: sign-off before acting, then a bounded
    // window, then an unbounded veto channel.
    bool veto_channel = false, acceptance_channel = false;
    for (const Connection* c : h2m) {
        veto_channel = veto_channel || carries_reaction(*c, ReactionKind::Veto);
        acceptance_channel = acceptance_channel || carries_reaction(*c, ReactionKind::Acceptance);
    }
    bool window_rule = false, commit_on_acceptance = false;
    for (const Rule& r : machine_rules) {
        window_rule = window_rule || rule_has_action(r, Action::Kind::StartVetoWindow);
        commit_on_acceptance = commit_on_acceptance ||
                               (trigger_is(r.trigger, Specialization::Kind::Reaction) &&
                                (!r.trigger.spec.reaction ||
                                 r.trigger.spec.reaction == ReactionKind::Acceptance) &&
                                rule_has_action(r, Action::Kind::Commit));
    }
    if (acceptance_channel && commit_on_acceptance) p.veto = VetoPower::ApprovalRequired;
    else if (veto_channel && window_rule) p.veto = VetoPower::TimeLimited;
    else if (veto_channel) p.veto = VetoPower::Unlimited;

    // Candidate flow: who puts the options on the table, and how many.
    bool cand_m2h_single = false, cand_m2h_selection = false, cand_m2h_all = false;
    bool cand_h2m = false;
    for (const Connection* c : m2h)
        for (const EventObjectSpec& o : c->carries) {
            if (o.spec.kind != Specialization::Kind::Candidates) continue;
            cand_m2h_single = cand_m2h_single || o.quant == Quant::Single;
            cand_m2h_selection = cand_m2h_selection || o.quant == Quant::Selection;
            cand_m2h_all = cand_m2h_all || o.quant == Quant::All;
        }
    for (const Connection* c : h2m)
        cand_h2m = cand_h2m || carries_kind(*c, Specialization::Kind::Candidates);
    bool cand_m2h = cand_m2h_single || cand_m2h_selection || cand_m2h_all;
    if (cand_m2h && cand_h2m) p.candidate_flow = CandidateFlow::JointDefinition;
    else if (cand_h2m) p.candidate_flow = CandidateFlow::HumanSupplies;
    else if (cand_m2h_all) p.candidate_flow = CandidateFlow::MachineOffersAll;
    else if (cand_m2h_selection) p.candidate_flow = CandidateFlow::MachineOffersSelection;
    else if (cand_m2h_single) p.candidate_flow = CandidateFlow::MachineOffersSingle;

    // Notification: the strongest mode the machine commits to.
    for (const Connection* c : m2h)
        for (const EventObjectSpec& o : c->carries) {
            if (o.spec.kind != Specialization::Kind::Notification || !o.spec.notification)
                continue;
            NotificationLevel lvl = NotificationLevel::None;
            switch (*o.spec.notification) {
                case NotificationMode::OwnDiscretion: lvl = NotificationLevel::Discretion; break;
                case NotificationMode::OnRequest: lvl = NotificationLevel::OnRequest; break;
                case NotificationMode::Always: lvl = NotificationLevel::Always; break;
            }
            if (static_cast<int>(lvl) > static_cast<int>(p.notification)) p.notification = lvl;
        }

    // Executor: who carries the work to outside parties. A side "executes"
    // when it sends task objects to agents that belong to neither side.
    bool m_exec = false, h_exec = false;
    for (const Connection* c : m2t) m_exec = m_exec || carries_kind(*c, Specialization::Kind::Task);
    for (const Connection* c : h2t) h_exec = h_exec || carries_kind(*c, Specialization::Kind::Task);
    if (m_exec && h_exec) p.executor = Executor::Mixed;
    else if (m_exec) p.executor = Executor::Machine;
    else if (h_exec) p.executor = Executor::Human;
    else p.executor = machine_rules.empty() ? Executor::Human : Executor::Machine;

    // Task transfer between the sides.
    bool h2m_work = false, m2h_work = false;
    for (const Connection* c : h2m)
        h2m_work = h2m_work || carries_kind(*c, Specialization::Kind::Task) ||
                   carries_kind(*c, Specialization::Kind::Instruction);
    for (const Connection* c : m2h) m2h_work = m2h_work || carries_kind(*c, Specialization::Kind::Task);
    if (h2m_work)
        p.task_transfer = p.executor == Executor::Mixed ? TaskTransfer::HandoverMidTask
                                                        : TaskTransfer::HumanToMachine;
    else if (m2h_work)
        p.task_transfer = TaskTransfer::MachineToHuman;

    // Monitoring: which share of the machine's reading points the human sees.
    std::set<std::string> metric_sources, metric_seen;
    for (const Connection& c : m.connections) {
        if (!in_machine(c.from.path) || !carries_kind(c, Specialization::Kind::Metric)) continue;
        std::string key = c.from.path + "\x01" + c.from.name;
        metric_sources.insert(key);
        if (in_human(c.to.path)) metric_seen.insert(key);
    }
    if (!metric_seen.empty())
        p.monitoring = metric_seen.size() == metric_sources.size() ? MonitoringScope::Full
                                                                   : MonitoringScope::Partial;

    p.random_delegation = rd;
    return p;
}

// ---------------------------------------------------------------------------
// Level table

bool LevelRow::matches(const InteractionProfile& p) const { return mismatches(p) == 0; }

int LevelRow::mismatches(const InteractionProfile& p) const {
    int n = 0;
    n += decision_authority && *decision_authority != p.decision_authority;
    n += veto && *veto != p.veto;
    n += candidate_flow && *candidate_flow != p.candidate_flow;
    n += notification && *notification != p.notification;
    n += task_transfer && *task_transfer != p.task_transfer;
    n += monitoring && *monitoring != p.monitoring;
    n += executor && *executor != p.executor;
    n += random_delegation && *random_delegation != p.random_delegation;
    return n;
}

const std::vector<LevelRow>& level_table() {
    static const std::vector<LevelRow> rows = [] {
        std::vector<LevelRow> t(20);
        for (int i = 0; i < 20; ++i) t[static_cast<std::size_t>(i)].level = i + 1;
        auto& r = t;
        using DA = DecisionAuthority;
        using VP = VetoPower;
        using CF = CandidateFlow;
        using NL = NotificationLevel;
        using TT = TaskTransfer;
        using MS = MonitoringScope;
        using EX = Executor;

        r[0] = {1, DA::Machine, VP::None, CF::None, NL::None, TT::None, MS::None, EX::Machine,
                false,
                "the machine senses, decides, and acts entirely on its own; the human plays no part"};
        r[1] = {2, DA::Machine, {}, {}, {}, {}, MS::Partial, EX::Machine, false,
                "the machine works alone while the human watches some of its readings"};
        r[2] = {3, DA::Machine, {}, {}, {}, {}, MS::Full, EX::Machine, false,
                "the machine works alone while the human watches all of its readings"};
        r[3] = {4, DA::Machine, {}, {}, {}, {}, {}, EX::Machine, true,
                "the machine works alone but hands a random share of its cases over"};
        r[4] = {5, DA::Machine, VP::Unlimited, {}, {}, {}, {}, EX::Machine, false,
                "the machine decides and acts; the human may call a decision off at any time"};
        r[5] = {6, DA::Machine, VP::TimeLimited, {}, {}, {}, {}, {}, false,
                "the machine decides and acts; the human can call a decision off within a set window"};
        r[6] = {7, DA::Machine, VP::ApprovalRequired, {}, {}, {}, {}, {}, false,
                "the machine decides but waits for the human's sign-off before acting"};
        r[7] = {8, {}, {}, CF::MachineOffersSingle, {}, {}, {}, {}, {},
                "the machine settles on a single option and puts it to the human"};
        r[8] = {9, {}, {}, CF::MachineOffersSelection, {}, {}, {}, {}, {},
                "the machine narrows the options down to a shortlist for the human"};
        r[9] = {10, {}, {}, CF::MachineOffersAll, {}, {}, {}, {}, {},
                "the machine lays out every option it can find for the human"};
        r[10] = {11, DA::Human, {}, CF::JointDefinition, {}, {}, {}, {}, {},
                 "human and machine put the options together; the human decides"};
        r[11] = {12, DA::Machine, {}, CF::HumanSupplies, {}, {}, {}, EX::Machine, {},
                 "the human supplies the options; the machine picks one and acts"};
        r[12] = {13, {}, {}, {}, NL::Discretion, {}, {}, EX::Machine, {},
                 "the machine acts and reports when it sees fit"};
        r[13] = {14, {}, {}, {}, NL::OnRequest, {}, {}, EX::Machine, {},
                 "the machine acts and reports when the human asks"};
        r[14] = {15, {}, {}, {}, NL::Always, {}, {}, EX::Machine, {},
                 "the machine acts and reports every decision it takes"};
        r[15] = {16, DA::Human, {}, {}, {}, TT::HandoverMidTask, {}, {}, {},
                 "the human decides and starts the work, handing it over part-way through"};
        r[16] = {17, DA::Human, {}, {}, {}, TT::HumanToMachine, MS::None, EX::Machine, {},
                 "the human decides and hands the work over; the machine runs it unwatched"};
        r[17] = {18, DA::Human, {}, {}, {}, TT::HumanToMachine, MS::Full, EX::Machine, {},
                 "the human decides and hands the work over, watching everything the machine does"};
        r[18] = {19, DA::Shared, {}, {}, {}, TT::HumanToMachine, {}, EX::Machine, {},
                 "the human hands the work over; the machine runs its own sub-decisions under shared authority"};
        r[19] = {20, DA::Human, VP::None, CF::None, NL::None, TT::None, MS::None, EX::Human,
                 false,
                 "the human senses, decides, and acts entirely alone; the machine plays no part"};
        return t;
    }();
    return rows;
}

LevelResult classify_level(const InteractionProfile& p) {
    LevelResult out;
    for (const LevelRow& row : level_table())
        if (row.matches(p)) out.levels.push_back(row.level);
    if (!out.levels.empty()) return out;

    out.approximate = true;
    int best = 9;
    for (const LevelRow& row : level_table()) best = std::min(best, row.mismatches(p));
    for (const LevelRow& row : level_table())
        if (row.mismatches(p) == best) out.levels.push_back(row.level);
    return out;
}

// ---------------------------------------------------------------------------
// Patterns

namespace {

struct SideShape {
    int individuals = 0;
    int groups = 0;
};

std::string parent_of(const std::string& path) {
    std::size_t dot = path.rfind('.');
    return dot == std::string::npos ? std::string() : path.substr(0, dot);
}

// Union-find over participant indices.
struct DSU {
    std::vector<std::size_t> up;
    explicit DSU(std::size_t n) : up(n) {
        for (std::size_t i = 0; i < n; ++i) up[i] = i;
    }
    std::size_t find(std::size_t i) { return up[i] == i ? i : up[i] = find(up[i]); }
    void join(std::size_t a, std::size_t b) { up[find(a)] = find(b); }
};

SideShape shape_side(const Model& m, const std::vector<std::string>& participants) {
    DSU dsu(participants.size());
    for (std::size_t i = 0; i < participants.size(); ++i)
        for (std::size_t j = i + 1; j < participants.size(); ++j) {
            const std::string& a = participants[i];
            const std::string& b = participants[j];
            std::string pa = parent_of(a), pb = parent_of(b);
            bool coordinated = !pa.empty() && pa == pb;
            if (!coordinated)
                for (const Connection& c : m.connections) {
                    bool ab = path_within(c.from.path, a) && path_within(c.to.path, b);
                    bool ba = path_within(c.from.path, b) && path_within(c.to.path, a);
                    coordinated = coordinated || ab || ba;
                }
            if (coordinated) dsu.join(i, j);
        }
    std::map<std::size_t, int> sizes;
    for (std::size_t i = 0; i < participants.size(); ++i) ++sizes[dsu.find(i)];
    SideShape s;
    for (const auto& [root, n] : sizes) (n == 1 ? s.individuals : s.groups) += 1;
    return s;
}

} // namespace

OpResult<PatternResult> classify_pattern(const Model& m) {
    // Humans: agents tagged functional "human"; everything beneath one
    // belongs to that human.
    std::set<std::string> human_tagged;
    for (const AgentDef& root : m.roots)
        walk_deref(m, root, root.name, [&](const std::string& path, const AgentDef& a) {
            if (a.nature.functional_type == "human") human_tagged.insert(path);
        });
    if (human_tagged.empty())
        return StructureError{StructureError::Kind::NoRelationship,
                              "no agent is tagged functional \"human\""};

    auto human_owner = [&](const std::string& path) -> std::optional<std::string> {
        std::string p = path;
        while (true) {
            if (human_tagged.count(p)) return p;
            std::string up = parent_of(p);
            if (up.empty()) return std::nullopt;
            p = std::move(up);
        }
    };

    bool machine_exists = false;
    for (const AgentDef& root : m.roots)
        walk_deref(m, root, root.name, [&](const std::string& path, const AgentDef&) {
            machine_exists = machine_exists || !human_owner(path);
        });
    if (!machine_exists)
        return StructureError{StructureError::Kind::NoRelationship,
                              "every agent belongs to a human; there is no machine side"};

    // Participants: the agents on each end of a channel that crosses sides.
    std::set<std::string> humans, machines;
    for (const Connection& c : m.connections) {
        auto fh = human_owner(c.from.path);
        auto th = human_owner(c.to.path);
        if (fh && !th) {
            humans.insert(*fh);
            machines.insert(c.to.path);
        } else if (!fh && th) {
            machines.insert(c.from.path);
            humans.insert(*th);
        }
    }
    if (humans.empty())
        return StructureError{StructureError::Kind::NoRelationship,
                              "no channel joins a human to a machine"};

    std::vector<std::string> hp(humans.begin(), humans.end());
    std::vector<std::string> mp(machines.begin(), machines.end());
    SideShape hs = shape_side(m, hp);
    SideShape ms = shape_side(m, mp);

    auto side_text = [](const SideShape& s, const char* what) {
        std::string out;
        if (s.individuals == 1 && s.groups == 0) out = std::string("one ") + what;
        else if (s.individuals == 0 && s.groups == 1) out = std::string("a coordinated ") + what + " group";
        else if (s.groups == 0) out = std::to_string(s.individuals) + " independent " + what + "s";
        else {
            out = std::to_string(s.individuals) + " independent " + what + "(s) and " +
                  std::to_string(s.groups) + " " + what + " group(s)";
        }
        return out;
    };

    PatternResult result;
    result.detail = side_text(hs, "human") + " interacting with " + side_text(ms, "machine");

    auto shape_code = [](const SideShape& s) -> int {
        if (s.individuals == 1 && s.groups == 0) return 0; // one
        if (s.individuals == 0 && s.groups == 1) return 1; // group
        if (s.individuals >= 2 && s.groups == 0) return 2; // many independents
        return 3;                                          // anything else
    };
    int h = shape_code(hs), mm = shape_code(ms);

    if (h == 0 && mm == 0) result.pattern = PatternId::A;
    else if (h == 0 && mm == 2) result.pattern = PatternId::B;
    else if (h == 0 && mm == 1) result.pattern = PatternId::C;
    else if (h == 1 && mm == 0) result.pattern = PatternId::D;
    else if (h == 1 && mm == 2) result.pattern = PatternId::E;
    else if (h == 1 && mm == 1) result.pattern = PatternId::F;
    else if (h == 2 && mm == 0) result.pattern = PatternId::G;
    else if (h == 2 && mm == 1) result.pattern = PatternId::H;
    // else: composite — pattern stays unset.

    return result;
}

// ---------------------------------------------------------------------------
// Names

const char* authority_name(DecisionAuthority v) {
    switch (v) {
        case DecisionAuthority::Machine: return "machine";
        case DecisionAuthority::Human: return "human";
        case DecisionAuthority::Shared: return "shared";
    }
    return "human";
}

const char* veto_name(VetoPower v) {
    switch (v) {
        case VetoPower::None: return "none";
        case VetoPower::Unlimited: return "unlimited";
        case VetoPower::TimeLimited: return "time_limited";
        case VetoPower::ApprovalRequired: return "approval_required";
    }
    return "none";
}

const char* candidate_flow_name(CandidateFlow v) {
    switch (v) {
        case CandidateFlow::None: return "none";
        case CandidateFlow::MachineOffersSingle: return "machine_offers_single";
        case CandidateFlow::MachineOffersSelection: return "machine_offers_selection";
        case CandidateFlow::MachineOffersAll: return "machine_offers_all";
        case CandidateFlow::HumanSupplies: return "human_supplies";
        case CandidateFlow::JointDefinition: return "joint_definition";
    }
    return "none";
}

const char* notification_level_name(NotificationLevel v) {
    switch (v) {
        case NotificationLevel::None: return "none";
        case NotificationLevel::Discretion: return "discretion";
        case NotificationLevel::OnRequest: return "on_request";
        case NotificationLevel::Always: return "always";
    }
    return "none";
}

const char* task_transfer_name(TaskTransfer v) {
    switch (v) {
        case TaskTransfer::None: return "none";
        case TaskTransfer::HumanToMachine: return "human_to_machine";
        case TaskTransfer::MachineToHuman: return "machine_to_human";
        case TaskTransfer::HandoverMidTask: return "handover_mid_task";
    }
    return "none";
}

const char* monitoring_name(MonitoringScope v) {
    switch (v) {
        case MonitoringScope::None: return "none";
        case MonitoringScope::Partial: return "partial";
        case MonitoringScope::Full: return "full";
    }
    return "none";
}

const char* executor_name(Executor v) {
    switch (v) {
        case Executor::Machine: return "machine";
        case Executor::Human: return "human";
        case Executor::Mixed: return "mixed";
    }
    return "human";
}

const char* pattern_name(PatternId p) {
    switch (p) {
        case PatternId::A: return "A";
        case PatternId::B: return "B";
        case PatternId::C: return "C";
        case PatternId::D: return "D";
        case PatternId::E: return "E";
        case PatternId::F: return "F";
        case PatternId::G: return "G";
        case PatternId::H: return "H";
    }
    return "A";
}

} // namespace amn
