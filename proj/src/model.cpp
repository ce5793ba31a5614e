#include "amn/model.hpp"

#include <algorithm>

namespace amn {

// ---------------------------------------------------------------------------
// Modality

Modality Modality::generic(std::string tag_) {
    Modality m;
    m.base = ModalityBase::Generic;
    m.tag = std::move(tag_);
    return m;
}

Modality Modality::basic(ModalityBase base_) {
    Modality m;
    m.base = base_;
    if (base_ == ModalityBase::Generic) m.tag = "";
    return m;
}

std::string Modality::to_text() const {
    switch (base) {
        case ModalityBase::Visual: return "visual";
        case ModalityBase::Auditory: return "auditory";
        case ModalityBase::Olfactory: return "olfactory";
        case ModalityBase::Gustatory: return "gustatory";
        case ModalityBase::Tactile: return "tactile";
        case ModalityBase::Generic:
            return "generic(" + quote_string(tag.value_or("")) + ")";
    }
    return "generic(\"\")";
}

// ---------------------------------------------------------------------------
// Specializations

std::string InstructionKind::to_text() const {
    switch (base) {
        case Base::Instantiate: return "instantiate";
        case Base::Suspend: return "suspend";
        case Base::Abort: return "abort";
        case Base::Custom: return custom.value_or("");
    }
    return "";
}

Specialization Specialization::generic(std::string tag) {
    Specialization s;
    s.kind = Kind::Generic;
    s.generic_tag = std::move(tag);
    return s;
}

Specialization Specialization::reaction_of(ReactionKind k) {
    Specialization s;
    s.kind = Kind::Reaction;
    s.reaction = k;
    return s;
}

Specialization Specialization::task() {
    Specialization s;
    s.kind = Kind::Task;
    return s;
}

Specialization Specialization::candidates() {
    Specialization s;
    s.kind = Kind::Candidates;
    return s;
}

Specialization Specialization::instruction_of(InstructionKind k) {
    Specialization s;
    s.kind = Kind::Instruction;
    s.instruction = std::move(k);
    return s;
}

Specialization Specialization::notification_of(NotificationMode m) {
    Specialization s;
    s.kind = Kind::Notification;
    s.notification = m;
    return s;
}

Specialization Specialization::metric() {
    Specialization s;
    s.kind = Kind::Metric;
    return s;
}

std::string Specialization::to_text() const {
    switch (kind) {
        case Kind::Generic:
            if (generic_tag) return "generic(" + quote_string(*generic_tag) + ")";
            return "generic";
        case Kind::Reaction:
            if (reaction) return std::string("reaction(") + reaction_name(*reaction) + ")";
            return "reaction";
        case Kind::Task: return "task";
        case Kind::Candidates: return "candidates";
        case Kind::Instruction:
            if (instruction) return "instruction(" + instruction->to_text() + ")";
            return "instruction";
        case Kind::Notification:
            if (notification) return std::string("notification(") + notification_name(*notification) + ")";
            return "notification";
        case Kind::Metric: return "metric";
    }
    return "generic";
}

// ---------------------------------------------------------------------------
// Actions

Action Action::emit(std::string actuator, EventObjectSpec object,
                    std::vector<std::pair<std::string, Expr>> payload) {
    Action a;
    a.kind = Kind::Emit;
    a.actuator = std::move(actuator);
    a.object = std::move(object);
    a.payload = std::move(payload);
    return a;
}

Action Action::set_state(std::string state, Expr value) {
    Action a;
    a.kind = Kind::SetState;
    a.state = std::move(state);
    a.value = std::move(value);
    return a;
}

Action Action::select(SelectStrategy strategy, std::string rule) {
    Action a;
    a.kind = Kind::SelectCandidate;
    a.strategy = strategy;
    a.strategy_rule = std::move(rule);
    return a;
}

Action Action::window(int duration, Actions on_expiry) {
    Action a;
    a.kind = Kind::StartVetoWindow;
    a.duration = duration;
    a.on_expiry = std::make_shared<Actions>(std::move(on_expiry));
    return a;
}

Action Action::commit() {
    Action a;
    a.kind = Kind::Commit;
    return a;
}

Action Action::abort_pending() {
    Action a;
    a.kind = Kind::AbortPending;
    return a;
}

bool Action::operator==(const Action& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Emit:
            return actuator == o.actuator && object == o.object && payload == o.payload;
        case Kind::SetState:
            return state == o.state && value == o.value;
        case Kind::SelectCandidate:
            return strategy == o.strategy && strategy_rule == o.strategy_rule;
        case Kind::StartVetoWindow: {
            if (duration != o.duration) return false;
            if (!on_expiry || !o.on_expiry) return on_expiry == o.on_expiry;
            return *on_expiry == *o.on_expiry;
        }
        case Kind::Commit:
        case Kind::AbortPending:
            return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Agents and connections

Instancing Instancing::single() { return Instancing{}; }

Instancing Instancing::multi(std::uint32_t min, std::optional<std::uint32_t> max) {
    Instancing i;
    i.mode = Mode::Multi;
    i.min = min;
    i.max = max;
    return i;
}

std::string Instancing::to_text() const {
    if (mode == Mode::Single) return "";
    std::string out = "[" + std::to_string(min) + "..";
    out += max ? std::to_string(*max) : "*";
    out += "]";
    return out;
}

const Interface* AgentDef::find_interface(InterfaceDir dir, const std::string& iname) const {
    const auto& list = dir == InterfaceDir::Sensor ? sensors : actuators;
    for (const auto& i : list)
        if (i.name == iname) return &i;
    return nullptr;
}

bool ChannelParams::empty() const {
    return !attention && !reliability && !conformity && !security;
}

std::string Endpoint::to_text() const { return path + "." + name; }

std::string Connection::canonical_key() const {
    std::string key = from.path;
    key += '\x01';
    key += from.name;
    key += '\x01';
    key += to.path;
    key += '\x01';
    key += to.name;
    key += style == ConnectionStyle::Continuous ? '\x01' : '\x02';
    return key;
}

// ---------------------------------------------------------------------------
// Model

const SourceSpan* Model::span_of(const std::string& element_id) const {
    auto it = source_spans.find(element_id);
    return it == source_spans.end() ? nullptr : &it->second;
}

bool structurally_equal(const Model& a, const Model& b) {
    if (a.roots != b.roots) return false;
    if (a.globals != b.globals) return false;
    auto sorted = [](const std::vector<Connection>& cs) {
        std::vector<Connection> out = cs;
        std::stable_sort(out.begin(), out.end(), [](const Connection& x, const Connection& y) {
            return x.canonical_key() < y.canonical_key();
        });
        return out;
    };
    return sorted(a.connections) == sorted(b.connections);
}

std::string id_agent(const std::string& spanpath) { return "a:" + spanpath; }

std::string id_iface(const std::string& spanpath, InterfaceDir dir, const std::string& name) {
    return "i:" + spanpath + (dir == InterfaceDir::Sensor ? "/sensor:" : "/actuator:") + name;
}

std::string id_rule(const std::string& spanpath, const std::string& name) {
    return "r:" + spanpath + "/" + name;
}

std::string id_goal(const std::string& spanpath, const std::string& name) {
    return "go:" + spanpath + "/" + name;
}

std::string id_state(const std::string& spanpath, const std::string& name) {
    return "st:" + spanpath + "/" + name;
}

std::string id_utility(const std::string& spanpath) { return "u:" + spanpath; }

std::string id_connection(std::size_t index) { return "c:" + std::to_string(index); }

std::string id_carried(std::size_t conn_index, std::size_t obj_index) {
    return "o:" + std::to_string(conn_index) + "/" + std::to_string(obj_index);
}

// ---------------------------------------------------------------------------
// Vocabulary names

const char* social_name(SocialConcept c) {
    switch (c) {
        case SocialConcept::SelfInterested: return "self_interested";
        case SocialConcept::Helpful: return "helpful";
        case SocialConcept::Cooperative: return "cooperative";
    }
    return "";
}

const char* ethical_name(EthicalConcept c) {
    switch (c) {
        case EthicalConcept::NonEthical: return "non_ethical";
        case EthicalConcept::Implicit: return "implicit";
        case EthicalConcept::Explicit: return "explicit";
        case EthicalConcept::Full: return "full";
    }
    return "";
}

const char* autonomy_type_name(AutonomyType t) {
    switch (t) {
        case AutonomyType::Interpretation: return "interpretation";
        case AutonomyType::KnowHow: return "know_how";
        case AutonomyType::Plan: return "plan";
        case AutonomyType::Goal: return "goal";
        case AutonomyType::Reasoning: return "reasoning";
        case AutonomyType::Monitoring: return "monitoring";
        case AutonomyType::Skill: return "skill";
        case AutonomyType::Resource: return "resource";
        case AutonomyType::Condition: return "condition";
    }
    return "";
}

const char* archetype_name(ProcessingArchetype a) {
    switch (a) {
        case ProcessingArchetype::Reflex: return "reflex";
        case ProcessingArchetype::InternalState: return "internal_state";
        case ProcessingArchetype::GoalBased: return "goal_based";
        case ProcessingArchetype::UtilityBased: return "utility_based";
    }
    return "";
}

const char* quant_name(Quant q) {
    switch (q) {
        case Quant::Single: return "single";
        case Quant::Selection: return "selection";
        case Quant::All: return "all";
    }
    return "";
}

const char* reaction_name(ReactionKind k) {
    switch (k) {
        case ReactionKind::Acceptance: return "acceptance";
        case ReactionKind::Refusal: return "refusal";
        case ReactionKind::Veto: return "veto";
    }
    return "";
}

const char* notification_name(NotificationMode m) {
    switch (m) {
        case NotificationMode::OwnDiscretion: return "discretion";
        case NotificationMode::OnRequest: return "on_request";
        case NotificationMode::Always: return "always";
    }
    return "";
}

namespace {
template <typename T, std::size_t N>
std::optional<T> lookup(const std::pair<const char*, T> (&table)[N], const std::string& s) {
    for (const auto& [name, val] : table)
        if (s == name) return val;
    return std::nullopt;
}
} // namespace

std::optional<SocialConcept> social_from(const std::string& s) {
    static const std::pair<const char*, SocialConcept> t[] = {
        {"self_interested", SocialConcept::SelfInterested},
        {"helpful", SocialConcept::Helpful},
        {"cooperative", SocialConcept::Cooperative},
    };
    return lookup(t, s);
}

std::optional<EthicalConcept> ethical_from(const std::string& s) {
    static const std::pair<const char*, EthicalConcept> t[] = {
        {"non_ethical", EthicalConcept::NonEthical},
        {"implicit", EthicalConcept::Implicit},
        {"explicit", EthicalConcept::Explicit},
        {"full", EthicalConcept::Full},
    };
    return lookup(t, s);
}

std::optional<AutonomyType> autonomy_type_from(const std::string& s) {
    static const std::pair<const char*, AutonomyType> t[] = {
        {"interpretation", AutonomyType::Interpretation},
        {"know_how", AutonomyType::KnowHow},
        {"plan", AutonomyType::Plan},
        {"goal", AutonomyType::Goal},
        {"reasoning", AutonomyType::Reasoning},
        {"monitoring", AutonomyType::Monitoring},
        {"skill", AutonomyType::Skill},
        {"resource", AutonomyType::Resource},
        {"condition", AutonomyType::Condition},
    };
    return lookup(t, s);
}

std::optional<ProcessingArchetype> archetype_from(const std::string& s) {
    static const std::pair<const char*, ProcessingArchetype> t[] = {
        {"reflex", ProcessingArchetype::Reflex},
        {"internal_state", ProcessingArchetype::InternalState},
        {"goal_based", ProcessingArchetype::GoalBased},
        {"utility_based", ProcessingArchetype::UtilityBased},
    };
    return lookup(t, s);
}

std::optional<Quant> quant_from(const std::string& s) {
    static const std::pair<const char*, Quant> t[] = {
        {"single", Quant::Single},
        {"selection", Quant::Selection},
        {"all", Quant::All},
    };
    return lookup(t, s);
}

std::optional<ReactionKind> reaction_from(const std::string& s) {
    static const std::pair<const char*, ReactionKind> t[] = {
        {"acceptance", ReactionKind::Acceptance},
        {"refusal", ReactionKind::Refusal},
        {"veto", ReactionKind::Veto},
    };
    return lookup(t, s);
}

std::optional<NotificationMode> notification_from(const std::string& s) {
    static const std::pair<const char*, NotificationMode> t[] = {
        {"discretion", NotificationMode::OwnDiscretion},
        {"on_request", NotificationMode::OnRequest},
        {"always", NotificationMode::Always},
    };
    return lookup(t, s);
}

} // namespace amn

namespace amn {

void walk_actions(const Actions& actions, const std::function<void(const Action&)>& fn) {
    for (const Action& a : actions) {
        fn(a);
        if (a.kind == Action::Kind::StartVetoWindow && a.on_expiry)
            walk_actions(*a.on_expiry, fn);
    }
}

} // namespace amn
