#pragma once

#include <cstdint>
#include <string>

#include "amn/model.hpp"

namespace amn_test {

/// Plain, independent re-implementation of the engine's documented execution
/// semantics, kept deliberately naive: flat agent list, per-channel queues,
/// startup seeding, one-tick latency, capacity and reliability gating,
/// first-match rules with batch quantifiers, set / emit / window / commit /
/// abort actions, and the early stop on quiescence. Returns the serialized
/// trace so runs can be compared against the real engine byte for byte.
/// Covers the subset produced by random_runnable_text (no injections,
/// single-instance agents, no selection, no delegation).
std::string reference_trace_jsonl(const amn::Model& m, std::uint64_t seed, int max_ticks);

} // namespace amn_test
