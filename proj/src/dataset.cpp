#include "sslda/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sslda {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t col) {
  double value = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(value)) {
    throw InputError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                     ": not a finite number: '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

LabeledDataset read_labeled_csv(std::istream& in, const CsvOptions& options) {
  LabeledDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  long label_col = -1;
  bool have_layout = false;
  std::vector<std::vector<double>> rows;

  const auto set_layout = [&](std::size_t cols) {
    width = cols;
    if (options.label_last) label_col = static_cast<long>(cols) - 1;
    have_layout = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_layout) {
      set_layout(cells.size());
      if (options.header) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
          if (!options.label_last && cells[j] == "label") label_col = static_cast<long>(j);
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
          if (static_cast<long>(j) != label_col) data.column_names.emplace_back(cells[j]);
        }
        continue;
      }
    }
    if (cells.size() != width) {
      throw InputError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = parse_cell(cells[j], line_no, j + 1);
      if (static_cast<long>(j) == label_col) {
        if (v != 1.0 && v != 2.0) {
          throw InputError("CSV line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                           ": label must be 1 or 2, got '" + std::string(cells[j]) + "'");
        }
        data.labels.push_back(static_cast<int>(v));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }

  const std::size_t p = width - (label_col >= 0 ? 1 : 0);
  if (rows.empty() || p == 0) throw InputError("CSV contains no feature data");
  data.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(p));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) data.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return data;
}

LabeledDataset read_labeled_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read CSV file " + path.string());
  return read_labeled_csv(in, options);
}

Matrix class_rows(const LabeledDataset& data, int label) {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] == label) idx.push_back(static_cast<Index>(i));
  }
  Matrix out(static_cast<Index>(idx.size()), data.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = data.features.row(idx[i]);
  return out;
}

void write_labeled_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& class1,
                       const Eigen::Ref<const Matrix>& class2) {
  if (class1.cols() != class2.cols()) throw InputError("write_labeled_csv: column mismatch");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write CSV file " + path.string());
  for (Index j = 0; j < class1.cols(); ++j) out << 'x' << (j + 1) << ',';
  out << "label\n";
  out << std::setprecision(17);
  const auto emit = [&](const Eigen::Ref<const Matrix>& rows, int label) {
    for (Index i = 0; i < rows.rows(); ++i) {
      for (Index j = 0; j < rows.cols(); ++j) out << rows(i, j) << ',';
      out << label << '\n';
    }
  };
  emit(class1, 1);
  emit(class2, 2);
}

}  // namespace sslda
