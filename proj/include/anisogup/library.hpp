#pragma once

#include <vector>

#include "anisogup/model.hpp"

namespace anisogup {

// Builtin models, each defined by its own DSL source so the grammar covers
// the whole library and round-trips it.
std::vector<ModelSpec> library();

const ModelSpec* find_model(const std::string& name);

}  // namespace anisogup
