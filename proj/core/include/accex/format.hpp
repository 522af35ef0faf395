#pragma once

#include <string>

namespace accex {

//! Shortest decimal representation that parses back to the same double
//! (std::to_chars). Used for every number the tools emit, so written files
//! round-trip bit-exactly and reruns are byte-identical.
std::string format_double(double value);

//! Strict full-string double parse; throws std::runtime_error with `what`
//! in the message on failure (also rejects NaN and infinities).
double parse_double(const std::string& text, const std::string& what);

}  // namespace accex
