#pragma once

#include <string>

namespace amn_test {

struct DotStats {
    int nodes = 0;
    int edges = 0;
    int subgraphs = 0;
};

/// Structural well-formedness check of DOT text: a digraph header, balanced
/// braces and attribute brackets, terminated strings with valid escapes, and
/// statements of known shape. Fills `stats` with node / edge / subgraph
/// counts when given. Returns false and explains in `why` on the first
/// malformed construct.
bool check_dot(const std::string& text, DotStats* stats = nullptr, std::string* why = nullptr);

} // namespace amn_test
