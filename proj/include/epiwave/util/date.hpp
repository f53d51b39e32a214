#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "epiwave/util/csv.hpp"

namespace epiwave {

/// Calendar day, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int64_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
    return Date(std::chrono::sys_days(ymd).time_since_epoch().count());
  }

  /// "YYYY-MM-DD".
  static Date parse_iso(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
      throw csv::ParseError("bad ISO date '" + std::string(s) + "'");
    }
    return from_parts(s.substr(0, 4), s.substr(5, 2), s.substr(8, 2), s);
  }

  /// "YYYYMMDD", the mobility table's date column.
  static Date parse_compact(std::string_view s) {
    if (s.size() != 8) throw csv::ParseError("bad compact date '" + std::string(s) + "'");
    return from_parts(s.substr(0, 4), s.substr(4, 2), s.substr(6, 2), s);
  }

  std::int64_t days() const noexcept { return days_; }

  std::string iso() const {
    const auto ymd = parts();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }
  std::string compact() const {
    const auto ymd = parts();
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d%02u%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  Date operator+(std::int64_t d) const noexcept { return Date(days_ + d); }
  std::int64_t operator-(Date o) const noexcept { return days_ - o.days_; }
  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::year_month_day parts() const {
    return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
  }
  static Date from_parts(std::string_view y, std::string_view m, std::string_view d,
                         std::string_view whole) {
    try {
      return from_ymd(static_cast<int>(csv::parse_int(y, "year")),
                      static_cast<unsigned>(csv::parse_int(m, "month")),
                      static_cast<unsigned>(csv::parse_int(d, "day")));
    } catch (const std::exception&) {
      throw csv::ParseError("bad date '" + std::string(whole) + "'");
    }
  }

  std::int64_t days_ = 0;
};

/// Local wall clock for a fixed UTC offset.
struct LocalClock {
  std::int64_t utc_offset_seconds = 9 * 3600;

  std::int64_t local_seconds(std::int64_t unix_time) const noexcept {
    return unix_time + utc_offset_seconds;
  }
  Date local_date(std::int64_t unix_time) const noexcept {
    const std::int64_t s = local_seconds(unix_time);
    return Date(s >= 0 ? s / 86400 : (s - 86399) / 86400);
  }
  /// Seconds since local midnight.
  std::int64_t seconds_of_day(std::int64_t unix_time) const noexcept {
    return local_seconds(unix_time) - local_date(unix_time).days() * 86400;
  }
  /// Unix time of local midnight starting `d`.
  std::int64_t midnight(Date d) const noexcept { return d.days() * 86400 - utc_offset_seconds; }

  /// "YYYY-MM-DD HH:MM:SS" in local time.
  std::string timestamp(std::int64_t unix_time) const {
    const std::int64_t sod = seconds_of_day(unix_time);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s %02lld:%02lld:%02lld", local_date(unix_time).iso().c_str(),
                  static_cast<long long>(sod / 3600), static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60));
    return buf;
  }
  std::int64_t parse_timestamp(std::string_view s) const {
    if (s.size() != 19 || s[10] != ' ' || s[13] != ':' || s[16] != ':') {
      throw csv::ParseError("bad timestamp '" + std::string(s) + "'");
    }
    const Date d = Date::parse_iso(s.substr(0, 10));
    const auto h = csv::parse_int(s.substr(11, 2), "hour");
    const auto m = csv::parse_int(s.substr(14, 2), "minute");
    const auto sec = csv::parse_int(s.substr(17, 2), "second");
    if (h > 23 || m > 59 || sec > 60) throw csv::ParseError("bad timestamp '" + std::string(s) + "'");
    return midnight(d) + h * 3600 + m * 60 + sec;
  }
};

}  // namespace epiwave
