#include "amn/span.hpp"

#include <algorithm>
#include <tuple>

namespace amn {

bool diagnostic_order(const Diagnostic& a, const Diagnostic& b) {
    auto key = [](const Diagnostic& d) {
        return std::tie(d.span.file, d.span.start, d.span.end, d.code, d.message);
    };
    return key(a) < key(b);
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), diagnostic_order);
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

const char* severity_name(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string out;
    out += d.span.file.empty() ? "<model>" : d.span.file;
    out += ':';
    out += std::to_string(d.span.start.line);
    out += ':';
    out += std::to_string(d.span.start.col);
    out += ": ";
    out += severity_name(d.severity);
    out += ' ';
    out += d.code;
    out += ' ';
    out += d.message;
    return out;
}

} // namespace amn
