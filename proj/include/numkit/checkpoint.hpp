#pragma once
// Text checkpoint format for Mlp parameters. Values are written with enough
// digits to round-trip doubles exactly, so a loaded net computes bit-identical
// outputs.

#include <string>

#include "numkit/mlp.hpp"

namespace numkit {

void checkpoint_save(const Mlp& net, const std::string& path);
Mlp checkpoint_load(const std::string& path);  // throws on malformed files

}  // namespace numkit
