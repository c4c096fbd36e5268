#pragma once

#include <string>

namespace sslab {

// Shortest round-trippable representation used in every CSV artifact (%.17g).
std::string format_double(double v);

}  // namespace sslab
