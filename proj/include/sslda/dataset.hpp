#pragma once

// Plain numeric CSV ingestion for labeled two-class data: comma separated,
// '.' decimal point, optional header row. The label column is the one named
// "label" (with a header) or the last column when `label_last` is set.

#include "sslda/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sslda {

struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;  // empty when the file carries no label column
  std::vector<std::string> column_names;

  bool has_labels() const { return !labels.empty(); }
  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
};

struct CsvOptions {
  bool header = true;
  bool label_last = false;
};

// Throws InputError naming the 1-based line and column of the first bad cell.
LabeledDataset read_labeled_csv(std::istream& in, const CsvOptions& options = {});
LabeledDataset read_labeled_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Rows of one class, in file order.
Matrix class_rows(const LabeledDataset& data, int label);

// Writes features plus a trailing "label" column (header included).
void write_labeled_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& class1,
                       const Eigen::Ref<const Matrix>& class2);

}  // namespace sslda
