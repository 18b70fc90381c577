// Basic vocabulary shared by every ixpscope module: AS numbers, country
// codes, calendar dates and the error types the CLI maps to exit codes.
#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ixpscope {

using Asn = std::uint32_t;

/// Parses an asplain AS number in [1, 2^32-1]. Rejects asdot, signs and
/// surrounding garbage.
std::optional<Asn> parse_asn(std::string_view text);

/// ISO 3166-1 alpha-2 code. "ZZ" is the registries' placeholder for
/// "unknown" and is kept as data but never treated as a real country.
class CountryCode {
 public:
  constexpr CountryCode() = default;

  static std::optional<CountryCode> parse(std::string_view text);
  static CountryCode placeholder() { return *parse("ZZ"); }

  std::string str() const { return std::string(code_.data(), code_.size()); }
  bool is_placeholder() const { return code_[0] == 'Z' && code_[1] == 'Z'; }
  bool empty() const { return code_[0] == '\0'; }

  auto operator<=>(const CountryCode&) const = default;

 private:
  std::array<char, 2> code_{};
};

/// Parses a country, throwing std::invalid_argument when the text is not
/// a two-letter uppercase code.
CountryCode country(std::string_view text);

using Date = std::chrono::sys_days;

/// YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
Date date_from_string(std::string_view text);
std::string format_date(Date d);

/// Inclusive calendar-day span.
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return d >= first && d <= last; }
  bool empty() const { return last < first; }
  std::size_t days() const {
    return empty() ? 0 : static_cast<std::size_t>((last - first).count()) + 1;
  }
  std::vector<Date> dates() const;

  bool operator==(const DateRange&) const = default;
};

/// Input data is unusable (missing baseline, unreadable file, bad schema).
/// The CLI maps this to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Small string helpers used by the line-oriented readers.
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string join_asns(const std::vector<Asn>& asns, char sep = ' ');

}  // namespace ixpscope
