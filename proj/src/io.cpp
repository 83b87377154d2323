#include "diffudict/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "diffudict/errors.hpp"
#include "diffudict/numfmt.hpp"

namespace diffudict {

namespace {

double parse_cell(const std::string& token, int line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("");
    if (!std::isfinite(value)) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ParseError("load_matrix: line " + std::to_string(line_no) + ": bad value '" + token +
                     "'");
  }
}

Eigen::MatrixXd load_dense_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string token;
    while (std::getline(cells, token, ',')) row.push_back(parse_cell(token, line_no));
    if (line.back() == ',')
      throw ParseError("load_matrix: line " + std::to_string(line_no) + ": trailing comma");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("load_matrix: line " + std::to_string(line_no) +
                       ": ragged row (expected " + std::to_string(rows.front().size()) +
                       " cells)");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("load_matrix: empty file");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

Eigen::MatrixXd load_triplets(std::istream& in) {
  std::string line;
  int line_no = 0;
  long rows = -1, cols = -1;
  Eigen::MatrixXd out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream cells(line);
    if (rows < 0) {
      if (!(cells >> rows >> cols) || rows < 1 || cols < 1)
        throw ParseError("load_matrix: line " + std::to_string(line_no) +
                         ": expected header 'rows cols'");
      std::string rest;
      if (cells >> rest)
        throw ParseError("load_matrix: line " + std::to_string(line_no) + ": trailing tokens");
      out = Eigen::MatrixXd::Zero(rows, cols);
      continue;
    }
    long i = 0, j = 0;
    std::string token;
    if (!(cells >> i >> j >> token))
      throw ParseError("load_matrix: line " + std::to_string(line_no) +
                       ": expected 'i j value'");
    std::string rest;
    if (cells >> rest)
      throw ParseError("load_matrix: line " + std::to_string(line_no) + ": trailing tokens");
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ParseError("load_matrix: line " + std::to_string(line_no) + ": index out of range");
    out(i, j) = parse_cell(token, line_no);
  }
  if (rows < 0) throw ParseError("load_matrix: empty file");
  return out;
}

}  // namespace

Eigen::MatrixXd load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_matrix: cannot open " + path.string());
  return format == MatrixFormat::DenseCsv ? load_dense_csv(in) : load_triplets(in);
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& x, ColumnNorm norm) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double scale =
        norm == ColumnNorm::L2 ? out.col(j).norm() : out.col(j).lpNorm<1>();
    if (scale > 0.0) out.col(j) /= scale;
  }
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : width_(header.size()), stream_(path) {
  if (!stream_) throw ParseError("csv: cannot open " + path.string());
  if (header.empty()) throw std::invalid_argument("csv: header must be nonempty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) stream_ << ",";
    stream_ << header[i];
  }
  stream_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt_g17(v));
  raw_row(cells);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::invalid_argument("csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) stream_ << ",";
    stream_ << cells[i];
  }
  stream_ << "\n";
}

SvgPlot::SvgPlot(double width, double height, const std::string& title)
    : width_(width), height_(height), title_(title) {}

void SvgPlot::polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& color) {
  if (xs.size() != ys.size()) throw std::invalid_argument("svg: x/y length mismatch");
  series_.push_back(Series{xs, ys, color, true});
}

void SvgPlot::scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::string& color) {
  if (xs.size() != ys.size()) throw std::invalid_argument("svg: x/y length mismatch");
  series_.push_back(Series{xs, ys, color, false});
}

void SvgPlot::bounds(double& x_lo, double& x_hi, double& y_lo, double& y_hi) const {
  x_lo = y_lo = std::numeric_limits<double>::infinity();
  x_hi = y_hi = -std::numeric_limits<double>::infinity();
  for (const Series& s : series_) {
    for (double v : s.xs) {
      x_lo = std::min(x_lo, v);
      x_hi = std::max(x_hi, v);
    }
    for (double v : s.ys) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!(x_lo < x_hi)) x_hi = x_lo + 1.0;
  if (!(y_lo < y_hi)) y_hi = y_lo + 1.0;
}

void SvgPlot::save(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("svg: cannot open " + path.string());
  double x_lo, x_hi, y_lo, y_hi;
  bounds(x_lo, x_hi, y_lo, y_hi);
  const double margin = 45.0;
  const double plot_w = width_ - 2 * margin;
  const double plot_h = height_ - 2 * margin;
  const auto map_x = [&](double v) { return margin + (v - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto map_y = [&](double v) {
    return height_ - margin - (v - y_lo) / (y_hi - y_lo) * plot_h;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
      << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width_ << "\" height=\"" << height_
      << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title_ << "</text>\n";
  out << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "  <text x=\"" << margin << "\" y=\"" << height_ - margin + 18
      << "\" font-size=\"11\">" << fmt_g17(x_lo) << "</text>\n";
  out << "  <text x=\"" << margin + plot_w << "\" y=\"" << height_ - margin + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g17(x_hi) << "</text>\n";
  out << "  <text x=\"" << margin - 6 << "\" y=\"" << height_ - margin
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g17(y_lo) << "</text>\n";
  out << "  <text x=\"" << margin - 6 << "\" y=\"" << margin + 10
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_g17(y_hi) << "</text>\n";

  for (const Series& s : series_) {
    if (s.line) {
      out << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (i > 0) out << " ";
        out << map_x(s.xs[i]) << "," << map_y(s.ys[i]);
      }
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.xs.size(); ++i)
        out << "  <circle cx=\"" << map_x(s.xs[i]) << "\" cy=\"" << map_y(s.ys[i])
            << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace diffudict
