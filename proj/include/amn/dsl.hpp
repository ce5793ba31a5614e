#pragma once

#include <string>
#include <vector>

#include "amn/model.hpp"
#include "amn/span.hpp"

namespace amn {

struct ParseResult {
    Model model;
    std::vector<Diagnostic> diagnostics; // sorted; may contain errors
};

/// Parses DSL text into a model. Always returns a model: statements that fail
/// to parse are skipped after reporting a diagnostic, so several independent
/// errors surface in one pass. Every loaded element records its source span.
ParseResult parse(const std::string& text, const std::string& filename = "<input>");

/// Canonical text form. Deterministic: two structurally equal models print
/// byte-identically. Clause order inside an agent is interfaces, nature,
/// behavior, children; connections print last, in canonical sort order.
std::string print(const Model& m);

/// parse + print. On parse errors returns the diagnostics and no text.
struct FmtResult {
    bool ok = false;
    std::string text;
    std::vector<Diagnostic> diagnostics;
};
FmtResult fmt(const std::string& text, const std::string& filename = "<input>");

} // namespace amn
