#pragma once

#include <vector>

#include "amn/model.hpp"
#include "amn/span.hpp"

namespace amn {

/// Checks a model against the structural rules and returns every finding,
/// sorted into canonical reporting order. Never throws on any loadable
/// model: all problems become diagnostics. Pure and deterministic.
///
/// An empty result means the model conforms. Warnings (advisory findings)
/// may be present in a result that contains no errors; such a model is
/// still considered conforming for simulation and rendering.
std::vector<Diagnostic> validate(const Model& m);

} // namespace amn
