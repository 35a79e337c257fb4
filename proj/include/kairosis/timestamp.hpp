#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace kairosis {

/// Calendar instant, UTC, whole-second resolution.
using Instant = std::chrono::sys_seconds;

/// Parses an ISO-8601 instant. Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]`
/// with an optional `Z` or `+HH:MM`/`-HH:MM` offset (a space may replace `T`).
/// Offsets are folded into UTC; fractional seconds are truncated. A missing
/// offset is read as UTC. Throws Error(ParseError) on anything else.
Instant parse_instant(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_instant(Instant t);

}  // namespace kairosis
