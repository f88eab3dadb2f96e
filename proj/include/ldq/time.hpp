#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ldq {

// Whole seconds since 1970-01-01T00:00:00Z.
using UnixSeconds = std::int64_t;

// Accepts YYYY-MM-DDThh:mm:ss[.fraction](Z|+00:00|-00:00). Fractions are
// truncated to whole seconds. Returns nullopt for anything else.
std::optional<UnixSeconds> parse_utc(std::string_view text);

// Throwing variant (MalformedTimestamp).
UnixSeconds parse_utc_or_throw(std::string_view text);

// Canonical form: YYYY-MM-DDThh:mm:ssZ.
std::string format_utc(UnixSeconds seconds);

// Reference clock: LDQ_NOW when set, otherwise the system clock.
UnixSeconds reference_now();

}  // namespace ldq
