#include "spinfactor/experiments/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spinfactor::experiments {

namespace {

constexpr const char* kSchemaVersion = "1";
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_number(std::size_t v) { return std::to_string(v); }

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width mismatch");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const std::vector<std::pair<std::string, std::string>>& metadata) const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  for (const auto& [k, v] : metadata) out += "# " + k + "=" + v + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> csv_metadata(const ExperimentConfig& config) {
  return {{"command", config.command},
          {"config_hash", config_hash(config)},
          {"schema_version", kSchemaVersion},
          {"master_seed", std::to_string(config.master_seed)}};
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series,
                          bool log_y) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [log_y](double y) { return log_y ? std::log10(std::max(y, 1e-4)) : y; };
  for (const auto& s : series) {
    for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.y) y0 = std::min(y0, ty(y)), y1 = std::max(y1, ty(y));
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape_xml(title) << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
     << escape_xml(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double ylab = log_y ? std::pow(10.0, yv) : yv;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
       << format_number(std::round(xv * 1000) / 1000) << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << H - B - (yv - y0) / (y1 - y0) * (H - T - B) + 4
       << "\" text-anchor=\"end\">" << format_number(std::round(ylab * 1000) / 1000)
       << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      os << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << color
       << "\">" << escape_xml(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_category_map(const std::string& title, const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const std::vector<std::vector<int>>& category,
                             const std::vector<std::vector<double>>& strength,
                             const std::vector<std::string>& category_names) {
  constexpr double cell = 18, L = 60, T = 40;
  const double W = L + cell * static_cast<double>(xs.size()) + 120;
  const double H = T + cell * static_cast<double>(ys.size()) + 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape_xml(title) << "</text>\n";
  // Row 0 of `category` is the lowest y value; draw it at the bottom.
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const int c = category[iy][ix];
      os << "<rect x=\"" << L + cell * static_cast<double>(ix) << "\" y=\""
         << T + cell * static_cast<double>(ys.size() - 1 - iy) << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << kPalette[c % std::size(kPalette)]
         << "\" fill-opacity=\"" << format_number(std::clamp(strength[iy][ix], 0.0, 1.0))
         << "\"/>\n";
    }
  }
  os << "<text x=\"" << L + cell * static_cast<double>(xs.size()) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">b1 (" << format_number(xs.front()) << " .. "
     << format_number(xs.back()) << ")</text>\n";
  os << "<text x=\"14\" y=\"" << T + cell * static_cast<double>(ys.size()) / 2
     << "\" transform=\"rotate(-90 14 " << T + cell * static_cast<double>(ys.size()) / 2
     << ")\" text-anchor=\"middle\">b2 (" << format_number(ys.front()) << " .. "
     << format_number(ys.back()) << ")</text>\n";
  for (std::size_t c = 0; c < category_names.size(); ++c) {
    const double x = L + cell * static_cast<double>(xs.size()) + 16;
    const double y = T + 18.0 * static_cast<double>(c);
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[c % std::size(kPalette)] << "\"/>\n"
       << "<text x=\"" << x + 18 << "\" y=\"" << y + 10 << "\">" << escape_xml(category_names[c])
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace spinfactor::experiments
