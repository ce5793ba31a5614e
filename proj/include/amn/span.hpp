#pragma once

#include <string>
#include <vector>

namespace amn {

struct SourcePos {
    int line = 1; // 1-based
    int col = 1;  // 1-based, in bytes

    bool operator==(const SourcePos&) const = default;
    auto operator<=>(const SourcePos&) const = default;
};

struct SourceSpan {
    std::string file;
    SourcePos start;
    SourcePos end;

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Warning, Error };

/// One finding, from either the parser or the validator. `code` is a stable
/// machine-readable identifier such as "AMN-SYN-01" or "AMN-DR2-01".
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
    std::vector<SourceSpan> related; // other locations involved in the finding

    bool operator==(const Diagnostic&) const = default;
};

/// Orders by (file, span start, span end, code, message).
bool diagnostic_order(const Diagnostic& a, const Diagnostic& b);

/// Stable-sorts diagnostics into canonical reporting order.
void sort_diagnostics(std::vector<Diagnostic>& diags);

bool has_errors(const std::vector<Diagnostic>& diags);

/// "file:line:col: severity CODE message" (one line, no trailing newline).
std::string format_diagnostic(const Diagnostic& d);

const char* severity_name(Severity s);

} // namespace amn
