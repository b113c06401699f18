#pragma once

#include "routeraudit/http.h"

#include <optional>
#include <string>
#include <string_view>

namespace routeraudit {

// YYYY-MM-DDTHH:MM:SSZ
std::string format_rfc3339(Clock::time_point when);
std::optional<Clock::time_point> parse_rfc3339(std::string_view text);

}  // namespace routeraudit
