#pragma once

#include <string>

namespace diffudict {

// Shortest round-trippable decimal form (printf %.17g, C locale). All CSV
// artifacts go through this so reruns are byte-identical.
std::string fmt_g17(double value);

}  // namespace diffudict
