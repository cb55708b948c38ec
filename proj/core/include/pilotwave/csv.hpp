#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pilotwave {

/// Column-oriented table; the first column is the time axis.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[c][row]

  std::size_t rows() const noexcept { return values.empty() ? 0 : values.front().size(); }
  void add(std::string name, std::vector<double> column);
};

/// Header "t, a, b" then one row per sample with 17 significant digits. Throws IoError.
void emit_csv(const Table& table, const std::filesystem::path& path);
std::string format_csv(const Table& table);

Table parse_csv(const std::filesystem::path& path);
Table parse_csv_text(const std::string& text);

struct PlotStyle {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_y = false;
};

/// Line plot of every non-time column against the first column.
void emit_svg(const Table& table, const std::filesystem::path& path, const PlotStyle& style = {});
std::string format_svg(const Table& table, const PlotStyle& style = {});

}  // namespace pilotwave
