#include "ldq/time.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "ldq/errors.hpp"

namespace ldq {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<UnixSeconds> parse_utc(std::string_view s) {
  int year, month, day, hour, minute, second;
  if (s.size() < 20) return std::nullopt;
  if (!read_int(s, 0, 4, year) || s[4] != '-' || !read_int(s, 5, 2, month) ||
      s[7] != '-' || !read_int(s, 8, 2, day) || s[10] != 'T' ||
      !read_int(s, 11, 2, hour) || s[13] != ':' ||
      !read_int(s, 14, 2, minute) || s[16] != ':' ||
      !read_int(s, 17, 2, second))
    return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  std::string_view zone = s.substr(pos);
  if (zone != "Z" && zone != "+00:00" && zone != "-00:00") return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{
                         static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<UnixSeconds>(days_since_epoch) * 86400 + hour * 3600 +
         minute * 60 + second;
}

UnixSeconds parse_utc_or_throw(std::string_view text) {
  auto parsed = parse_utc(text);
  if (!parsed) throw MalformedTimestamp(std::string(text));
  return *parsed;
}

std::string format_utc(UnixSeconds seconds) {
  using namespace std::chrono;
  UnixSeconds days = seconds / 86400;
  UnixSeconds rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buffer;
}

UnixSeconds reference_now() {
  if (const char* pinned = std::getenv("LDQ_NOW"); pinned && *pinned)
    return parse_utc_or_throw(pinned);
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch())
      .count();
}

}  // namespace ldq
