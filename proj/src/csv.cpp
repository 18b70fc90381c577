#include "ixpscope/csv.hpp"

namespace ixpscope::csv {

bool split_line(std::string_view line, std::vector<std::string>& fields) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::size_t n = 0;
  auto next_field = [&]() -> std::string& {
    if (n == fields.size()) fields.emplace_back();
    auto& f = fields[n++];
    f.clear();
    return f;
  };

  // Fast path: no quoting anywhere on the line.
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      auto pos = line.find(',', start);
      auto& f = next_field();
      if (pos == std::string_view::npos) {
        f.assign(line.substr(start));
        break;
      }
      f.assign(line.substr(start, pos - start));
      start = pos + 1;
    }
    fields.resize(n);
    return true;
  }

  std::size_t i = 0;
  while (true) {
    auto& f = next_field();
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            f.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        f.push_back(line[i++]);
      }
      if (!closed) return false;
      if (i < line.size() && line[i] != ',') return false;
    } else {
      while (i < line.size() && line[i] != ',') f.push_back(line[i++]);
    }
    if (i >= line.size()) break;
    ++i;  // comma
  }
  fields.resize(n);
  return true;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace ixpscope::csv
