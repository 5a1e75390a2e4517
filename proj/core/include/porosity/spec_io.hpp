#pragma once

#include <string>

#include "porosity/setkit.hpp"

namespace porosity {

struct SpecOptions {
    // Forces log-domain construction when set to log_domain.
    ScalarMode mode = ScalarMode::exact;
    std::size_t budget = kDefaultBudget;
};

// Each parser accepts a JSON object, or the shorthand "kind[:arg[:arg]]"
// (for example "geometric:1/2", "power:1", "supergeometric", "evens").
SetHandle parse_set(const std::string& text, const SpecOptions& opts = {});
ScalingFunction parse_scaling(const std::string& text, ScalarMode mode = ScalarMode::exact);
IntegerSet parse_integer_set(const std::string& text);

// Like parse_set, but text naming an existing file is read first.
SetHandle load_set(const std::string& path_or_text, const SpecOptions& opts = {});
std::string read_spec_text(const std::string& path_or_text);

}  // namespace porosity
