#include "ixpscope/core.hpp"

#include <charconv>
#include <cstdio>
#include <limits>

namespace ixpscope {

std::optional<Asn> parse_asn(std::string_view text) {
  if (text.empty() || text.size() > 10) return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  if (value == 0 || value > std::numeric_limits<Asn>::max()) return std::nullopt;
  return static_cast<Asn>(value);
}

std::optional<CountryCode> CountryCode::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  for (char c : text) {
    if (c < 'A' || c > 'Z') return std::nullopt;
  }
  CountryCode cc;
  cc.code_ = {text[0], text[1]};
  return cc;
}

CountryCode country(std::string_view text) {
  auto cc = CountryCode::parse(text);
  if (!cc) throw std::invalid_argument("invalid country code '" + std::string(text) + "'");
  return *cc;
}

namespace {

template <typename T>
bool parse_fixed(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  if (!parse_fixed(text.substr(0, 4), y) || !parse_fixed(text.substr(5, 2), m) ||
      !parse_fixed(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd};
}

Date date_from_string(std::string_view text) {
  auto d = parse_date(text);
  if (!d) throw std::invalid_argument("invalid date '" + std::string(text) + "' (want YYYY-MM-DD)");
  return *d;
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::vector<Date> DateRange::dates() const {
  std::vector<Date> out;
  out.reserve(days());
  for (Date d = first; d <= last; d += std::chrono::days{1}) out.push_back(d);
  return out;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join_asns(const std::vector<Asn>& asns, char sep) {
  std::string out;
  for (std::size_t i = 0; i < asns.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(asns[i]);
  }
  return out;
}

}  // namespace ixpscope
