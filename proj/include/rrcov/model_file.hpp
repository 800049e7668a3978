#pragma once

#include <filesystem>
#include <string>

#include "rrcov/model.hpp"

namespace rrcov {

/// Parses and validates a YAML model description. Structural problems throw
/// ParseError and constraint violations throw ValidationError; both carry the
/// offending line where one exists.
///
///   components:                # mutually independent primitives
///     - {name: U1, kind: exponential, mean: 1}
///     - {name: G, kind: gamma, shape: 2, scale: 1}
///     - {name: V, kind: uniform, lo: 0, hi: 1}
///     - {name: K, kind: deterministic, value: 3}
///   time: {constant: 0, terms: {U1: 1}}
///   rewards:
///     - {name: X, constant: 0, terms: {U1: 2, V: -1}}
///   delay: ordinary            # or same-as-cycle, or {components, time, rewards}
///   lattice: false
///   notes: ["free text shown on diagnostics"]
///
/// Numbers may be written as fractions ("1/2").
ModelSpec parse_model(const std::string& text);

ModelSpec load_model(const std::filesystem::path& path);

/// Canonical YAML for a model; parse_model(to_yaml(m)) reproduces m.
std::string to_yaml(const ModelSpec& spec);

}  // namespace rrcov
