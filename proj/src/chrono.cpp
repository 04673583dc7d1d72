// Copyright 2026 The dspolicy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dspolicy/chrono.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <limits>

namespace dspolicy {
namespace {

bool read_digits(std::string_view s, size_t pos, size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + n; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_datetime(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h, mi, sec;
  if (!read_digits(s, 0, 4, y) || s.size() < 19 || s[4] != '-' || !read_digits(s, 5, 2, mo) ||
      s[7] != '-' || !read_digits(s, 8, 2, d) || s[10] != 'T' || !read_digits(s, 11, 2, h) ||
      s[13] != ':' || !read_digits(s, 14, 2, mi) || s[16] != ':' || !read_digits(s, 17, 2, sec)) {
    return std::nullopt;
  }
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      int oh, om;
      if (!read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
          !read_digits(s, pos + 4, 2, om) || oh > 14 || om > 59) {
        return std::nullopt;
      }
      offset_minutes = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
      pos += 6;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  Timestamp t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
  return t - minutes{offset_minutes};
}

std::string format_datetime(Timestamp t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Seconds> parse_duration(std::string_view s) {
  if (s.size() < 2 || s[0] != 'P') return std::nullopt;
  std::int64_t total = 0;
  bool in_time = false;
  bool any = false;
  size_t pos = 1;
  while (pos < s.size()) {
    if (s[pos] == 'T') {
      if (in_time) return std::nullopt;
      in_time = true;
      ++pos;
      continue;
    }
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start || pos >= s.size()) return std::nullopt;
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + pos, n);
    if (ec != std::errc{}) return std::nullopt;
    std::int64_t unit = 0;
    switch (s[pos]) {
      case 'Y': unit = in_time ? 0 : 365 * 86400; break;
      case 'M': unit = in_time ? 60 : 30 * 86400; break;
      case 'W': unit = in_time ? 0 : 7 * 86400; break;
      case 'D': unit = in_time ? 0 : 86400; break;
      case 'H': unit = 3600; break;
      case 'S': unit = 1; break;
      default: return std::nullopt;
    }
    if (unit == 0) return std::nullopt;
    if (n > std::numeric_limits<std::int64_t>::max() / unit) return std::nullopt;
    total += n * unit;
    any = true;
    ++pos;
  }
  if (!any) return std::nullopt;
  return Seconds{total};
}

std::string format_duration(Seconds d) { return "PT" + std::to_string(d.count()) + "S"; }

std::optional<Decimal> Decimal::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool negative = false;
  size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    ++pos;
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool digits = false;
  for (; pos < s.size() && s[pos] != '.'; ++pos) {
    if (!std::isdigit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
    if (whole > std::numeric_limits<std::int64_t>::max() / (10 * kScale)) return std::nullopt;
    whole = whole * 10 + (s[pos] - '0');
    digits = true;
  }
  if (pos < s.size()) {
    ++pos;
    for (; pos < s.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(s[pos]))) return std::nullopt;
      digits = true;
      if (frac_digits < 6) {
        frac = frac * 10 + (s[pos] - '0');
        ++frac_digits;
      }
    }
  }
  if (!digits) return std::nullopt;
  for (; frac_digits < 6; ++frac_digits) frac *= 10;
  std::int64_t units = whole * kScale + frac;
  return Decimal(negative ? -units : units);
}

std::string Decimal::to_string() const {
  std::int64_t abs = units_ < 0 ? -units_ : units_;
  std::string out = (units_ < 0 ? "-" : "") + std::to_string(abs / kScale);
  std::int64_t frac = abs % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

}  // namespace dspolicy
