#pragma once

#include <string>

#include "abn/model.hpp"

namespace abn {

// Network file (".abn"): JSON with top-level keys `variables` and `nodes`,
// plus an optional `description`. See docs/formats.md.
Network parse_network(const std::string& text);
std::string serialize_network(const Network& net);

// Case file (".csv"): header row of variable names, one case per row,
// "?" marks a missing value.
CaseSet parse_cases(const std::string& text, const Network& net);
std::string serialize_cases(const CaseSet& cases, const Network& net);

}  // namespace abn
