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

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dspolicy {

/// Logical point in time at second resolution (UTC).
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses an xsd:dateTime lexical form: YYYY-MM-DDThh:mm:ss[.fff][Z|(+|-)hh:mm].
/// A missing zone designator is read as UTC. Fractional seconds are truncated.
std::optional<Timestamp> parse_datetime(std::string_view text);

/// Formats as YYYY-MM-DDThh:mm:ssZ.
std::string format_datetime(Timestamp t);

/// Parses an ISO 8601 duration (PnYnMnWnDTnHnMnS). Years count 365 days and
/// months 30 days. H and S designators are also accepted before 'T' ("P30S").
std::optional<Seconds> parse_duration(std::string_view text);

/// Formats as PT<n>S.
std::string format_duration(Seconds d);

/// Fixed-point decimal with six fractional digits.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Decimal() = default;
  static constexpr Decimal from_units(std::int64_t units) { return Decimal(units); }
  static constexpr Decimal from_integer(std::int64_t v) { return Decimal(v * kScale); }
  static std::optional<Decimal> parse(std::string_view text);

  constexpr std::int64_t units() const { return units_; }
  std::string to_string() const;

  constexpr Decimal operator+(Decimal o) const { return Decimal(units_ + o.units_); }
  constexpr Decimal operator-(Decimal o) const { return Decimal(units_ - o.units_); }
  constexpr Decimal operator*(std::int64_t k) const { return Decimal(units_ * k); }
  constexpr auto operator<=>(const Decimal&) const = default;

 private:
  constexpr explicit Decimal(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

}  // namespace dspolicy
