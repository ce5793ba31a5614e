#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "amn/expr.hpp"
#include "amn/span.hpp"
#include "amn/value.hpp"

namespace amn {

// ---------------------------------------------------------------------------
// Interfaces and media

enum class ModalityBase { Visual, Auditory, Olfactory, Gustatory, Tactile, Generic };

/// Sense channel type. Generic modalities carry a free-form tag such as
/// generic("edi"); the tag is present exactly when base == Generic.
struct Modality {
    ModalityBase base = ModalityBase::Generic;
    std::optional<std::string> tag;

    static Modality generic(std::string tag_);
    static Modality basic(ModalityBase base_);

    bool operator==(const Modality&) const = default;
    std::string to_text() const;
};

enum class InterfaceDir { Sensor, Actuator };

struct Interface {
    InterfaceDir dir = InterfaceDir::Sensor;
    std::string name;
    Modality modality;

    bool operator==(const Interface&) const = default;
};

// ---------------------------------------------------------------------------
// Event objects

enum class ReactionKind { Acceptance, Refusal, Veto };
enum class NotificationMode { OwnDiscretion, OnRequest, Always };
enum class Quant { Single, Selection, All };

/// Instruction kinds: the three lifecycle words plus free-form custom tags.
struct InstructionKind {
    enum class Base { Instantiate, Suspend, Abort, Custom };
    Base base = Base::Custom;
    std::optional<std::string> custom; // present iff base == Custom

    bool operator==(const InstructionKind&) const = default;
    std::string to_text() const;
};

/// What an event object is. Arguments are optional so that files with a
/// missing or unknown argument still load; the validator reports them.
struct Specialization {
    enum class Kind { Generic, Reaction, Task, Candidates, Instruction, Notification, Metric };

    Kind kind = Kind::Generic;
    std::optional<std::string> generic_tag;        // kind == Generic
    std::optional<ReactionKind> reaction;          // kind == Reaction
    std::optional<InstructionKind> instruction;    // kind == Instruction
    std::optional<NotificationMode> notification;  // kind == Notification

    static Specialization generic(std::string tag);
    static Specialization reaction_of(ReactionKind k);
    static Specialization task();
    static Specialization candidates();
    static Specialization instruction_of(InstructionKind k);
    static Specialization notification_of(NotificationMode m);
    static Specialization metric();

    bool operator==(const Specialization&) const = default;
    std::string to_text() const;
};

/// A carried or emitted object: specialization, how much of the option space
/// it covers, and its media type. Media defaults to the emitting actuator's
/// modality; quant is absent only in hand-built (unvalidated) models.
struct EventObjectSpec {
    Specialization spec;
    std::optional<Quant> quant;
    std::optional<std::string> quant_word; // scope word as written when unrecognized
    std::optional<Modality> media;
    std::map<std::string, std::string> payload_schema; // field -> "number"|"string"|"bool"

    bool operator==(const EventObjectSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Nature

enum class SocialConcept { SelfInterested, Helpful, Cooperative };
enum class EthicalConcept { NonEthical, Implicit, Explicit, Full };
enum class AutonomyType {
    Interpretation, KnowHow, Plan, Goal, Reasoning,
    Monitoring, Skill, Resource, Condition,
};
enum class ProcessingArchetype { Reflex, InternalState, GoalBased, UtilityBased };

struct Nature {
    std::optional<SocialConcept> social;
    std::optional<EthicalConcept> ethical;
    std::optional<AutonomyType> autonomy_type;
    std::optional<std::string> functional_type;
    std::optional<ProcessingArchetype> archetype;

    bool operator==(const Nature&) const = default;
};

// ---------------------------------------------------------------------------
// Behavior

struct Goal {
    std::string name;
    int priority = 0; // unique within the agent
    Expr target;

    bool operator==(const Goal&) const = default;
};

struct UtilityTerm {
    std::string metric;
    double weight = 1.0;

    bool operator==(const UtilityTerm&) const = default;
};

struct UtilityFunction {
    std::vector<UtilityTerm> terms; // metric names unique within the function

    bool operator==(const UtilityFunction&) const = default;
};

/// Trigger of a rule. Omitted parts are wildcards: `on reaction` matches any
/// reaction, `on task from A.B` restricts the sender subtree.
struct EventPattern {
    Specialization spec;     // missing args act as wildcards here
    std::optional<Quant> quant;
    std::optional<std::string> quant_word; // scope word as written when unrecognized
    std::optional<Modality> media;
    std::optional<std::string> sender; // path prefix

    bool operator==(const EventPattern&) const = default;
};

enum class SelectStrategy { UtilityArgmax, First, RuleNamed };

struct Action;

/// Ordered action list (rule body or veto-window expiry body).
using Actions = std::vector<Action>;

struct Action {
    enum class Kind { Emit, SetState, SelectCandidate, StartVetoWindow, Commit, AbortPending };

    Kind kind = Kind::Commit;

    // Emit
    std::string actuator;
    EventObjectSpec object;
    std::vector<std::pair<std::string, Expr>> payload; // template, ordered

    // SetState
    std::string state;
    Expr value;

    // SelectCandidate
    SelectStrategy strategy = SelectStrategy::First;
    std::string strategy_rule; // strategy == RuleNamed

    // StartVetoWindow
    int duration = 0; // ticks, >= 1
    std::shared_ptr<const Actions> on_expiry;

    static Action emit(std::string actuator, EventObjectSpec object,
                       std::vector<std::pair<std::string, Expr>> payload = {});
    static Action set_state(std::string state, Expr value);
    static Action select(SelectStrategy strategy, std::string rule = "");
    static Action window(int duration, Actions on_expiry);
    static Action commit();
    static Action abort_pending();

    bool operator==(const Action& o) const;
    bool operator!=(const Action& o) const { return !(*this == o); }
};

/// Optional per-rule delegation: when the rule matches, the triggering object
/// is handed off through `actuator` with the given probability instead of
/// running the rule body.
struct RandomDelegation {
    double probability = 0.0; // (0, 1]
    std::string actuator;

    bool operator==(const RandomDelegation&) const = default;
};

struct Rule {
    std::string name;
    EventPattern trigger;
    std::optional<Expr> guard;
    std::optional<RandomDelegation> delegation;
    Actions actions; // non-empty

    bool operator==(const Rule&) const = default;
};

struct Behavior {
    std::vector<Goal> goals;
    std::optional<UtilityFunction> utility;
    std::vector<Rule> rules;                 // evaluated in this order
    std::map<std::string, Value> states;     // name -> initial value

    bool operator==(const Behavior&) const = default;
};

// ---------------------------------------------------------------------------
// Agents

enum class AgentKind { Standard, Calling, GlobalRef };

/// Cardinality. Single agents are exactly one instance; multi-instance agents
/// carry [min..max] with max absent meaning unbounded ("*").
struct Instancing {
    enum class Mode { Single, Multi };
    Mode mode = Mode::Single;
    std::uint32_t min = 1;
    std::optional<std::uint32_t> max = 1;

    static Instancing single();
    static Instancing multi(std::uint32_t min, std::optional<std::uint32_t> max);

    bool operator==(const Instancing&) const = default;
    std::string to_text() const; // "[2..5]" / "[1..*]"; empty for single
};

struct AgentDef {
    std::string name;
    AgentKind kind = AgentKind::Standard;
    Instancing instancing;
    std::vector<Interface> sensors;
    std::vector<Interface> actuators;
    Nature nature;
    Behavior behavior;
    std::vector<AgentDef> children;

    // Re-declarations the structured fields cannot hold, preserved by the
    // parser for the validator: "social", "ethics", "type", "archetype",
    // "functional" for nature clauses, "utility", "state:<name>" for states.
    std::vector<std::string> duplicate_decls;

    bool operator==(const AgentDef&) const = default;

    const Interface* find_interface(InterfaceDir dir, const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Connections

enum class ConnectionStyle { Continuous, Discontinuous };

/// Per-channel qualities, stored as fractions in [0, 1] and written as
/// percentages in the DSL.
struct ChannelParams {
    std::optional<double> attention;
    std::optional<double> reliability;
    std::optional<double> conformity;
    std::optional<double> security;

    bool operator==(const ChannelParams&) const = default;
    bool empty() const;
};

struct Endpoint {
    std::string path; // dotted absolute agent path
    std::string name; // interface name

    bool operator==(const Endpoint&) const = default;
    auto operator<=>(const Endpoint&) const = default;
    std::string to_text() const; // "path.name"
};

struct Connection {
    Endpoint from; // actuator
    Endpoint to;   // sensor
    ConnectionStyle style = ConnectionStyle::Continuous;
    ChannelParams params;
    std::vector<EventObjectSpec> carries;

    bool operator==(const Connection&) const = default;

    /// Sort key used for canonical printing and deterministic iteration.
    std::string canonical_key() const;
};

// ---------------------------------------------------------------------------
// Model

/// A parsed or constructed agent system. Values are immutable by convention:
/// construction operations in ops.hpp return new models.
struct Model {
    std::vector<AgentDef> roots;             // document order
    std::map<std::string, AgentDef> globals; // name -> definition
    std::vector<Connection> connections;

    /// Element id -> source location, filled by the parser. Not part of
    /// structural equality. Built by the id_* helpers below; agents inside a
    /// global definition use "global:<name>" as the leading path segment.
    std::map<std::string, SourceSpan> source_spans;

    const SourceSpan* span_of(const std::string& element_id) const;
};

/// Structural equality: ignores source spans and treats the connection list
/// as an unordered set (compared in canonical order).
bool structurally_equal(const Model& a, const Model& b);

// Element id builders for the source span index. `spanpath` is the dotted
// agent path; agents inside a global definition use "global:<name>" as the
// leading segment.
std::string id_agent(const std::string& spanpath);
std::string id_iface(const std::string& spanpath, InterfaceDir dir, const std::string& name);
std::string id_rule(const std::string& spanpath, const std::string& name);
std::string id_goal(const std::string& spanpath, const std::string& name);
std::string id_state(const std::string& spanpath, const std::string& name);
std::string id_utility(const std::string& spanpath);
std::string id_connection(std::size_t index);
std::string id_carried(std::size_t conn_index, std::size_t obj_index);

/// Calls `fn` for every action in the list, pre-order, descending into
/// veto-window expiry bodies.
void walk_actions(const Actions& actions, const std::function<void(const Action&)>& fn);

// Text names for the enum vocabularies (used by DSL, render, and JSON output).
const char* social_name(SocialConcept c);
const char* ethical_name(EthicalConcept c);
const char* autonomy_type_name(AutonomyType t);
const char* archetype_name(ProcessingArchetype a);
const char* quant_name(Quant q);
const char* reaction_name(ReactionKind k);
const char* notification_name(NotificationMode m);

std::optional<SocialConcept> social_from(const std::string& s);
std::optional<EthicalConcept> ethical_from(const std::string& s);
std::optional<AutonomyType> autonomy_type_from(const std::string& s);
std::optional<ProcessingArchetype> archetype_from(const std::string& s);
std::optional<Quant> quant_from(const std::string& s);
std::optional<ReactionKind> reaction_from(const std::string& s);
std::optional<NotificationMode> notification_from(const std::string& s);

} // namespace amn
