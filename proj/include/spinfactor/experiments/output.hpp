#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinfactor/experiments/config.hpp"

namespace spinfactor::experiments {

/// Shortest round-trip decimal representation.
std::string format_number(double v);
std::string format_number(std::size_t v);

/// CSV table with a header row and a trailing `# key=value` metadata block.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string render(const std::vector<std::pair<std::string, std::string>>& metadata) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Metadata recorded at the end of every CSV.
std::vector<std::pair<std::string, std::string>> csv_metadata(const ExperimentConfig& config);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line plot.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<Series>& series,
                          bool log_y = false);

/// Self-contained SVG heatmap of `cells[row][col]` with one categorical
/// color per cell and opacity given by `strength` in [0, 1].
std::string svg_category_map(const std::string& title, const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const std::vector<std::vector<int>>& category,
                             const std::vector<std::vector<double>>& strength,
                             const std::vector<std::string>& category_names);

}  // namespace spinfactor::experiments
