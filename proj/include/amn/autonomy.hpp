#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amn/model.hpp"
#include "amn/ops.hpp"

namespace amn {

// ---------------------------------------------------------------------------
// Interaction profile

enum class DecisionAuthority { Machine, Human, Shared };
enum class VetoPower { None, Unlimited, TimeLimited, ApprovalRequired };
enum class CandidateFlow {
    None,
    MachineOffersSingle,
    MachineOffersSelection,
    MachineOffersAll,
    HumanSupplies,
    JointDefinition,
};
enum class NotificationLevel { None, Discretion, OnRequest, Always };
enum class TaskTransfer { None, HumanToMachine, MachineToHuman, HandoverMidTask };
enum class MonitoringScope { None, Partial, Full };
enum class Executor { Machine, Human, Mixed };

/// How a given human and machine share one piece of work, read off the model
/// structure. A pure function of (model, human path, machine path).
struct InteractionProfile {
    DecisionAuthority decision_authority = DecisionAuthority::Human;
    VetoPower veto = VetoPower::None;
    CandidateFlow candidate_flow = CandidateFlow::None;
    NotificationLevel notification = NotificationLevel::None;
    TaskTransfer task_transfer = TaskTransfer::None;
    MonitoringScope monitoring = MonitoringScope::None;
    Executor executor = Executor::Human;
    bool random_delegation = false;

    bool operator==(const InteractionProfile&) const = default;
};

/// Reads the interaction profile for the agents at `human_path` and
/// `machine_path`.
///
/// With no direct channel between the two subtrees: an active machine (rules,
/// or channels to anyone) profiles as working alone (machine authority and
/// execution, everything else absent); an inert machine with an active human
/// or a shared ancestor profiles as uninvolved (human authority and
/// execution). NoRelationship is returned only when neither side has rules or
/// channels and the paths share no ancestor.
OpResult<InteractionProfile> extract_features(const Model& m, const std::string& human_path,
                                              const std::string& machine_path);

// ---------------------------------------------------------------------------
// Autonomy levels

/// One row of the level table: the fields a profile must show to sit at this
/// level. Unset fields are unconstrained.
struct LevelRow {
    int level = 0;
    std::optional<DecisionAuthority> decision_authority;
    std::optional<VetoPower> veto;
    std::optional<CandidateFlow> candidate_flow;
    std::optional<NotificationLevel> notification;
    std::optional<TaskTransfer> task_transfer;
    std::optional<MonitoringScope> monitoring;
    std::optional<Executor> executor;
    std::optional<bool> random_delegation;
    std::string summary; // one-line description of the arrangement

    bool matches(const InteractionProfile& p) const;
    int mismatches(const InteractionProfile& p) const; // pinned fields that differ
};

/// The 20 rows, in level order.
const std::vector<LevelRow>& level_table();

struct LevelResult {
    std::vector<int> levels;  // ascending, never empty
    bool approximate = false; // true when no row matched exactly
};

/// Levels whose row predicates the profile satisfies. Several levels often
/// match — the levels describe arrangements, not a ranking. When nothing
/// matches exactly, the rows with the fewest differing fields are returned
/// and flagged approximate.
LevelResult classify_level(const InteractionProfile& p);

// ---------------------------------------------------------------------------
// Interaction patterns

enum class PatternId { A, B, C, D, E, F, G, H };

struct PatternResult {
    std::optional<PatternId> pattern; // unset: the arrangement is a composite
    std::string detail;               // how each side was counted
};

/// Shapes the model's human-machine arrangement into one of eight patterns
/// by counting, per side, whether the interacting agents form one
/// individual, one coordinated group, or several independents. Arrangements
/// outside the eight are reported as composite (pattern unset). Fails with
/// NoRelationship when the model has no human-tagged agent, no machine
/// agent, or no channel crossing between the sides.
OpResult<PatternResult> classify_pattern(const Model& m);

// ---------------------------------------------------------------------------
// Scaffolds

/// Builds a minimal two-agent (plus work sink) model that classifies at the
/// requested level (1..20). The returned model validates cleanly and
/// `classify_level(extract_features(...))` contains `level`. Out-of-range
/// levels are clamped into 1..20.
Model scaffold_level(int level, const std::string& human_name = "Operator",
                     const std::string& machine_name = "Worker");

// ---------------------------------------------------------------------------
// Text names (JSON and CLI output)

const char* authority_name(DecisionAuthority v);
const char* veto_name(VetoPower v);
const char* candidate_flow_name(CandidateFlow v);
const char* notification_level_name(NotificationLevel v);
const char* task_transfer_name(TaskTransfer v);
const char* monitoring_name(MonitoringScope v);
const char* executor_name(Executor v);
const char* pattern_name(PatternId p);

} // namespace amn
