#pragma once

#include <string>

#include "hychoice/modelspec.hpp"

namespace hychoice {

// Plain-text model description; see README for the section reference.
// parse_spec(serialize_spec(s)) reproduces s exactly.
ModelSpec parse_spec(const std::string& text);
ModelSpec load_spec(const std::string& path);
std::string serialize_spec(const ModelSpec& spec);
void save_spec(const ModelSpec& spec, const std::string& path);

bool specs_equal(const ModelSpec& a, const ModelSpec& b);

}  // namespace hychoice
