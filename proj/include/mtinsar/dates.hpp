#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "mtinsar/errors.hpp"

namespace mtinsar {

/// Calendar dates are carried as days since 1970-01-01 (can be negative).
using SerialDay = long;

inline SerialDay parse_date(const std::string& s) {
  int y = 0, m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  if (std::sscanf(s.c_str(), "%4d%c%2d%c%2d", &y, &dash1, &m, &dash2, &d) != 5 ||
      dash1 != '-' || dash2 != '-')
    throw Error(ErrorCode::InvalidArgument, "bad date '" + s + "', want YYYY-MM-DD");
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok())
    throw Error(ErrorCode::InvalidArgument, "invalid calendar date '" + s + "'");
  return std::chrono::sys_days(ymd).time_since_epoch().count();
}

inline std::string format_date(SerialDay day) {
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

/// Time difference in decimal years (Julian year of 365.25 days).
inline double years_between(SerialDay from, SerialDay to) {
  return static_cast<double>(to - from) / 365.25;
}

}  // namespace mtinsar
