#include "routeraudit/timeutil.h"

#include <ctime>
#include <iomanip>
#include <sstream>

namespace routeraudit {

std::string format_rfc3339(Clock::time_point when) {
    std::time_t seconds = Clock::to_time_t(when);
    std::tm tm{};
    gmtime_r(&seconds, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::optional<Clock::time_point> parse_rfc3339(std::string_view text) {
    std::tm tm{};
    std::istringstream in{std::string(text)};
    in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
    if (in.fail()) return std::nullopt;
    char zone = 0;
    in >> zone;
    if (zone != 'Z' || in.peek() != std::char_traits<char>::eof()) return std::nullopt;
    return Clock::from_time_t(timegm(&tm));
}

}  // namespace routeraudit
