#pragma once

#include <string>
#include <vector>

#include "treelab/experiments.hpp"

namespace treelab::app {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"dos", "bands", "continuity", "cauchy", "radial_contrast", "fluctuation"};
    return names;
}

// Validates a JSON config document and applies defaults. Unknown keys and
// wrong types raise SchemaError naming the field path; out-of-range values
// raise RangeError.
ExperimentConfig parse_config(const std::string& document);

// FNV-1a (64 bit, hex) of the document re-serialized with sorted keys, so
// key order and whitespace do not change it. SchemaError on invalid JSON.
std::string config_digest(const std::string& document);

}  // namespace treelab::app
