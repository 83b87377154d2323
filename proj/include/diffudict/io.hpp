#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace diffudict {

enum class MatrixFormat { DenseCsv, CoordinateTriplet };

// Dense CSV: one row per line, comma separated, rectangular. Coordinate
// triplets: header "rows cols", then "i j value" lines; unspecified entries
// are zero, later duplicates win. Both report parse errors with their line
// number.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path, MatrixFormat format);

enum class ColumnNorm { L1, L2 };

// Rescales every column to unit norm; zero columns pass through untouched.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& x, ColumnNorm norm);

// CSV writer used by every artifact: header row once, then fmt_g17 cells,
// LF newlines, no trailing separators. Reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::size_t width_;
  std::ofstream stream_;
};

// Minimal self-contained SVG line/scatter plot, enough to eyeball traces.
class SvgPlot {
 public:
  SvgPlot(double width, double height, const std::string& title);
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color);
  void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::string& color);
  void save(const std::filesystem::path& path);

 private:
  struct Series {
    std::vector<double> xs, ys;
    std::string color;
    bool line = true;
  };
  void bounds(double& x_lo, double& x_hi, double& y_lo, double& y_hi) const;
  double width_, height_;
  std::string title_;
  std::vector<Series> series_;
};

}  // namespace diffudict
