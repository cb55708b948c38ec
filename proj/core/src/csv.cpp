#include "pilotwave/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pilotwave/error.hpp"

namespace pilotwave {

void Table::add(std::string name, std::vector<double> column) {
  require(values.empty() || column.size() == rows(), ErrorKind::InvalidArgument,
          "column '" + name + "' length differs from the table");
  columns.push_back(std::move(name));
  values.push_back(std::move(column));
}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::string format_csv(const Table& table) {
  require(!table.columns.empty(), ErrorKind::InvalidArgument, "table has no columns");
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ", ";
    out += table.columns[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.values.size(); ++c) {
      if (c) out += ", ";
      out += number(table.values[c][r]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const Table& table, const std::filesystem::path& path) { write_file(path, format_csv(table)); }

Table parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) fail(ErrorKind::IoError, "empty CSV");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      t.columns.push_back(trim(cell));
      t.values.emplace_back();
    }
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= t.values.size()) fail(ErrorKind::IoError, "CSV row has more cells than the header");
      const std::string s = trim(cell);
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail(ErrorKind::IoError, "bad CSV number: " + s);
      t.values[c++].push_back(v);
    }
    if (c != t.values.size()) fail(ErrorKind::IoError, "CSV row has fewer cells than the header");
  }
  return t;
}

Table parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str());
}

std::string format_svg(const Table& table, const PlotStyle& style) {
  require(table.values.size() >= 2, ErrorKind::InvalidArgument, "plot needs a time column and one series");
  constexpr double width = 720, height = 450, left = 70, right = 20, top = 40, bottom = 50;
  const auto& xs = table.values[0];
  auto ty = [&](double v) { return style.log_y ? (v > 0.0 ? std::log10(v) : std::nan("")) : v; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (double x : xs) x0 = std::min(x0, x), x1 = std::max(x1, x);
  for (std::size_t c = 1; c < table.values.size(); ++c)
    for (double v : table.values[c]) {
      const double y = ty(v);
      if (!std::isfinite(y)) continue;
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;

  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << style.title
    << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
    << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.3g", xv);
    s << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << lab
      << "</text>\n";
    std::snprintf(lab, sizeof lab, "%.3g", style.log_y ? std::pow(10.0, yv) : yv);
    s << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << lab << "</text>\n";
  }
  s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
    << style.x_label << "</text>\n";
  s << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" transform=\"rotate(-90 16 "
    << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">" << style.y_label << "</text>\n";

  for (std::size_t c = 1; c < table.values.size(); ++c) {
    const char* color = palette[(c - 1) % 10];
    s << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << color << "\" points=\"";
    for (std::size_t r = 0; r < xs.size(); ++r) {
      const double y = ty(table.values[c][r]);
      if (!std::isfinite(y)) continue;
      s << px(xs[r]) << ',' << py(y) << ' ';
    }
    s << "\"/>\n";
    if (table.values.size() <= 11) {
      const double ly = top + 14.0 * static_cast<double>(c);
      s << "<text x=\"" << width - right - 8 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << color
        << "\">" << table.columns[c] << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

void emit_svg(const Table& table, const std::filesystem::path& path, const PlotStyle& style) {
  write_file(path, format_svg(table, style));
}

}  // namespace pilotwave
