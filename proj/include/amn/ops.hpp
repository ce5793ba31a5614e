#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "amn/model.hpp"

namespace amn {

/// Failure from a model construction or lookup operation.
struct StructureError {
    enum class Kind {
        ParentIsCalling,
        DuplicateName,
        CycleWouldForm,
        IncompatibleModality,
        WrongDirection,
        UnresolvedEndpoint,
        ParamOutOfRange,
        NotFound,
        AmbiguousGlobal,
        NoRelationship,
    };
    Kind kind;
    std::string message;
};

template <typename T>
using OpResult = std::variant<T, StructureError>;

template <typename T>
bool ok(const OpResult<T>& r) { return std::holds_alternative<T>(r); }

template <typename T>
const T& value(const OpResult<T>& r) { return std::get<T>(r); }

template <typename T>
const StructureError& error(const OpResult<T>& r) { return std::get<StructureError>(r); }

/// True when two modalities may be wired together: identical base senses, and
/// for generic modalities an identical (case-sensitive) tag.
bool compatible(const Modality& a, const Modality& b);

/// Splits "A.B.C" into segments. Empty string gives an empty path (the root
/// scope).
std::vector<std::string> split_path(const std::string& path);

/// Looks up the agent definition at a dotted path, searching roots first and
/// global definitions second, and following global references. Fails with
/// NotFound or, when a name matches several distinct definitions,
/// AmbiguousGlobal.
OpResult<AgentDef> resolve(const Model& m, const std::string& path);

/// Adds `child` under `parent_path` ("" for a new root). Fails when the
/// parent cannot be found, is a calling agent, already has a child of that
/// name, or when the insertion would close a global-reference containment
/// cycle.
OpResult<Model> compose(const Model& m, const std::string& parent_path, AgentDef child);

/// Inverse of compose: removes the agent at `path` (and its subtree) together
/// with any connections whose endpoints lie inside it.
OpResult<Model> remove(const Model& m, const std::string& path);

/// Adds a connection from an actuator to a sensor. Fails when an endpoint is
/// missing (UnresolvedEndpoint), the interface directions are wrong
/// (WrongDirection), the modalities differ (IncompatibleModality), or a
/// channel parameter falls outside [0, 1] (ParamOutOfRange).
OpResult<Model> connect(const Model& m, Endpoint from, Endpoint to,
                        ConnectionStyle style = ConnectionStyle::Continuous,
                        ChannelParams params = {},
                        std::vector<EventObjectSpec> carries = {});

/// Registers a global definition under its name.
OpResult<Model> add_global(const Model& m, AgentDef def);

/// Concatenates two models (roots, globals, connections, spans). Name clashes
/// are preserved for the validator to report.
Model merge(const Model& a, const Model& b);

/// Depth-first walk over every agent definition in roots (pre-order),
/// passing the absolute dotted path. Global definitions are not visited.
void walk_agents(const Model& m,
                 const std::function<void(const std::string& path, const AgentDef&)>& fn);

/// First path whose agent carries `name`, searching in document order.
std::optional<std::string> find_agent_path(const Model& m, const std::string& name);

/// True when `path` equals `prefix` or starts with `prefix` + ".".
bool path_within(const std::string& path, const std::string& prefix);

} // namespace amn
