#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "amn/model.hpp"
#include "amn/span.hpp"

namespace amn {

// ---------------------------------------------------------------------------
// Errors

struct SimError {
    enum class Kind {
        ValidationRequired,  // the model has validation errors
        CardinalityExceeded, // configured instance count outside [min, max]
        MissingConcept,      // conflict resolution without a social self-concept
        TraceModelMismatch,  // trace references agents or channels the model lacks
        BadArgument,         // malformed run or injection argument
    };
    Kind kind = Kind::BadArgument;
    std::string message;
};

template <typename T>
using SimResult = std::variant<T, SimError>;

template <typename T>
bool sim_ok(const SimResult<T>& r) { return std::holds_alternative<T>(r); }

template <typename T>
const T& sim_value(const SimResult<T>& r) { return std::get<T>(r); }

template <typename T>
const SimError& sim_error(const SimResult<T>& r) { return std::get<SimError>(r); }

// ---------------------------------------------------------------------------
// Run configuration

enum class OverflowPolicy { DropNewest, Queue };

struct RunConfig {
    /// Multiplier turning a channel's attention fraction into a per-tick
    /// delivery capacity: max(1, ceil(attention * attention_base)).
    int attention_base = 4;
    /// Deterministic mode: a delivered object is considered iff the channel
    /// has no reliability or reliability >= this threshold.
    double reliability_threshold = 0.5;
    /// When set, reliability gates probabilistically (seeded, reproducible).
    bool stochastic_reliability = false;
    /// Most negative group utility a self-interested choice may impose.
    double detriment_limit = 0.0;
    /// What happens to ready objects beyond a channel's per-tick capacity.
    OverflowPolicy overflow = OverflowPolicy::DropNewest;
    /// Instance count overrides per agent path (within [min, max]).
    std::map<std::string, std::uint32_t> instance_counts;
};

// ---------------------------------------------------------------------------
// Trace

enum class TraceKind {
    Emitted,
    Delivered,
    Dropped,
    RuleFired,
    StateChanged,
    CandidateSelected,
    WindowOpened,
    WindowVetoed,
    WindowCommitted,
    InstructionFollowed,
    InstructionIgnored,
};

const char* trace_kind_name(TraceKind k);

/// Object text used in traces: "task / single", "reaction(veto) / single", ...
std::string object_text(const EventObjectSpec& o);

struct TraceEvent {
    int tick = 0;
    int seq = 0; // run-wide, strictly increasing
    TraceKind kind = TraceKind::Emitted;
    std::string subject; // instance id, or channel token for drops
    std::string object;  // object spec text, rule name, state name, ...
    std::string detail;
};

struct Trace {
    std::vector<TraceEvent> events;
};

/// One JSON object per line, keys in fixed order:
/// tick, seq, kind, subject, object, detail.
std::string to_jsonl(const Trace& t);

// ---------------------------------------------------------------------------
// World state

struct DeliveredObject {
    EventObjectSpec spec;
    std::map<std::string, Value> payload;
    std::string sender;  // emitting instance id ("" for injected/synthetic)
    int channel = -1;    // connection index, -1 for synthetic deliveries
    int delivered_tick = 0;
};

struct AgentInstance {
    std::size_t def_slot = 0; // index into World::defs
    std::string path;
    int index = 0;      // instance number within the definition
    bool lone = true;   // single-instance: id is the bare path
    std::map<std::string, Value> states;
    std::vector<DeliveredObject> inbox;

    // Candidate objects waiting for a selection, with arrival ids.
    std::vector<std::pair<int, DeliveredObject>> candidate_pool;
    std::optional<std::map<std::string, Value>> selected;

    std::string id() const { return lone ? path : path + "#" + std::to_string(index); }
};

struct ChannelState {
    int connection = -1;
    std::optional<long> capacity; // absent: unlimited
    struct InFlight {
        DeliveredObject obj;
        int ready_at = 0;
    };
    std::deque<InFlight> in_flight;
    std::size_t next_receiver = 0; // round-robin over receiver instances
};

struct VetoWindow {
    int id = 0;
    std::string owner; // instance id
    int opened_at = 0;
    int duration = 1;
    std::shared_ptr<const Actions> on_expiry;
    bool vetoed = false;
    bool resolved = false;
};

struct World {
    struct DefSlot {
        std::string path;
        AgentDef def; // reference-free copy (global refs resolved)
    };
    std::vector<DefSlot> defs;
    std::vector<AgentInstance> instances;
    std::vector<Connection> connections; // channel i wraps connections[i]
    std::vector<ChannelState> channels;
    std::vector<VetoWindow> windows;
    int tick = 0;
    std::uint64_t rng_seed = 0;
    std::mt19937_64 rng;
    RunConfig config;
    int next_seq = 0;
    int next_window = 0;
    int next_candidate = 0;

    /// No objects in flight and no unresolved windows.
    bool quiescent() const;
};

// ---------------------------------------------------------------------------
// Injections

/// An external decision applied at the start of a tick. Actions:
///   emit <actuator> <spec>[/<quant>] [key=value ...]   make the agent emit
///   veto                                               veto the agent's open windows
///   approve                                            deliver reaction(acceptance)
///   request                                            deliver instruction(request)
struct InjectedAction {
    int tick = 0;
    std::string agent; // agent path (first instance acts)
    std::string action;
    std::vector<std::string> args;
};

struct InjectionParse {
    std::vector<InjectedAction> schedule;
    std::vector<Diagnostic> diagnostics;
};

/// Parses an injection schedule, one action per line:
///   tick=<n> <agent-path> <action> [args]
/// Blank lines and lines starting with # are skipped.
InjectionParse parse_injections(const std::string& text,
                                const std::string& filename = "<injections>");

// ---------------------------------------------------------------------------
// Execution

/// Expands the model into a runnable world: multi-instance agents at their
/// minimum cardinality (or the configured count, up to the maximum), states
/// initialized, tick 0. Fails when the model has validation errors or a
/// configured count is out of range.
SimResult<World> instantiate(const Model& m, std::uint64_t seed, RunConfig config = {});

/// Advances the world one tick. Phases, in fixed order: injected actions;
/// capacity-limited delivery; reliability gating; rule evaluation in document
/// order (first matching rule per object); candidate selection; window
/// countdown and expiry; tick + 1.
std::vector<TraceEvent> step(World& w, const std::vector<InjectedAction>& injected = {});

/// Runs up to max_ticks ticks (stopping early once the world is quiescent and
/// no injections remain) and concatenates the step traces. Equal inputs give
/// byte-identical serialized traces.
SimResult<Trace> run(const Model& m, std::uint64_t seed, int max_ticks,
                     const std::vector<InjectedAction>& injections = {}, RunConfig config = {});

// ---------------------------------------------------------------------------
// Conflict resolution

struct CandidateProposal {
    int id = 0;
    double own_utility = 0.0;
    double group_utility = 0.0;
    std::map<std::string, Value> payload;
};

/// Picks a candidate id under a social self-concept:
///   self_interested: best own utility among group utility >= -detriment_limit
///   helpful:         best group utility among own utility >= 0
///   cooperative:     best group utility, unconditionally
/// Ties break toward the lowest id. When the constrained set is empty the
/// concept's objective is maximized unconstrained and *note explains why.
/// Fails with MissingConcept when the concept is absent, BadArgument when
/// proposals is empty.
SimResult<int> resolve_conflict(std::optional<SocialConcept> self_concept,
                                const std::vector<CandidateProposal>& proposals,
                                double detriment_limit = 0.0, std::string* note = nullptr);

// ---------------------------------------------------------------------------
// Trace checking

struct ConformanceReport {
    struct ChannelConformity {
        int channel = -1;
        std::string channel_text; // "from -> to"
        double declared = 0.0;
        double measured = 0.0;
        int delivered = 0; // instruction objects delivered over the channel
        int followed = 0;  // of those, ones a rule fired on
        bool flagged = false;
    };
    std::vector<ChannelConformity> channels;
    bool always_discipline_ok = true;    // one notification per committed decision
    bool on_request_discipline_ok = true; // notifications never outrun requests
    std::vector<std::string> notes;

    bool ok() const;
};

/// Measures declared-conformity channels against the trace (flagging those
/// off by more than conformity_tol) and re-checks notification discipline.
SimResult<ConformanceReport> check_trace(const Trace& t, const Model& m,
                                         double conformity_tol = 0.15);

} // namespace amn
