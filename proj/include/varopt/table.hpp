#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace varopt {

enum class OutputFormat { table, tsv };

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// Aligned text (`## title`, padded columns) or TSV (`# title`, tab-separated).
inline void render(std::ostream& os, const Table& t, OutputFormat format) {
  if (format == OutputFormat::tsv) {
    os << "# " << t.title << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "\t" : "") << cells[i];
      os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return;
  }
  std::vector<std::size_t> width(t.header.size(), 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    if (cells.size() > width.size()) width.resize(cells.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  };
  measure(t.header);
  for (const auto& r : t.rows) measure(r);
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      s += cells[i];
      if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    os << s << '\n';
  };
  os << "## " << t.title << '\n';
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline void render(std::ostream& os, const std::vector<Table>& tables, OutputFormat format) {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) os << '\n';
    render(os, tables[i], format);
  }
}

}  // namespace varopt
