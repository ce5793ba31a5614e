#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amn/model.hpp"
#include "amn/span.hpp"

namespace amn {

enum class BadgeStyle { ShortCodes, Words };

struct RenderOptions {
    bool show_params = true;    // channel parameters as edge labels
    bool show_behavior = false; // rule and state names inside node labels
    /// When set (>= 1), agents deeper than this many levels collapse into
    /// their nearest visible ancestor; 1 keeps only the root agents.
    std::optional<int> collapse_below_depth;
    BadgeStyle badge_style = BadgeStyle::ShortCodes;
};

struct RenderResult {
    bool ok = false;
    std::string text;                     // DOT source when ok
    std::vector<Diagnostic> diagnostics;  // validation errors when refused
};

/// Renders the model as a DOT digraph: one node per agent, containment as
/// nested clusters, connections as directed actuator→sensor edges (dashed
/// when discontinuous), nature rendered as bracketed text badges. Global
/// references expand in place with a bold border; calling agents are dashed.
/// Byte-deterministic. Refuses models with validation errors.
RenderResult to_dot(const Model& m, const RenderOptions& opts = {});

/// A standalone DOT graph listing every badge code with its meaning.
std::string legend(const RenderOptions& opts = {});

} // namespace amn
