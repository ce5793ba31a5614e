#pragma once

#include <cstdint>
#include <string>

namespace amn_test {

/// Deterministic pseudo-random model text that ranges over the whole grammar:
/// nesting, globals and references, cardinalities, every nature clause and
/// object kind, goals, utilities, rules with guards, delegation, windows,
/// selection, payloads, and both channel arrows. Always parses cleanly;
/// validation findings are allowed and expected.
std::string random_model_text(std::uint64_t seed);

/// Deterministic small model (at most three agents, two rules each) that
/// parses cleanly, validates with no errors, and stays inside the action
/// subset the reference interpreter in reference_sim.hpp implements:
/// set / emit / window / commit / abort, guards over numeric states, and
/// channels with explicit attention and reliability.
std::string random_runnable_text(std::uint64_t seed);

} // namespace amn_test
