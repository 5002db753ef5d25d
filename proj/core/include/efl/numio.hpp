#pragma once

#include <string>

namespace efl {

/// Locale-independent decimal rendering with 17 significant digits, enough
/// to round-trip any double. Used for all CSV bodies so identical inputs
/// produce byte-identical files.
std::string format_full(double v);

}  // namespace efl
