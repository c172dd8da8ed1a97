#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace svkit {

// Dense numeric table with integer class labels. Categorical CSV columns are
// encoded by first appearance so loads are order-deterministic.
struct Table {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> x;  // row major
  std::vector<int> y;

  int n_rows() const { return static_cast<int>(x.size()); }
  int n_features() const { return static_cast<int>(feature_names.size()); }
  int n_classes() const;

  Table take(const std::vector<int>& row_indices) const;
  Table slice(int begin, int end) const;
  void append_row(const std::vector<double>& row, int label);
};

struct SplitTable {
  Table train;
  Table test;
};

// CSV with a header row; label_column selects the class column by name
// (empty = last column). Numeric cells parsed as doubles, everything else
// label-encoded by first appearance. Throws std::runtime_error on missing
// file, ragged rows or an unknown label column.
Table load_table(const std::string& csv_path, const std::string& label_column = "");

// Seeded shuffle then prefix split; train_fraction in (0,1).
SplitTable split(const Table& t, double train_fraction, std::uint64_t seed);

// Gaussian class blobs; name is "blobs2" or "blobs4" (class count). Features
// scaled into [0,1]. Deterministic per seed.
Table make_blobs(const std::string& name, int rows, int n_features, std::uint64_t seed);

std::vector<double> feature_means(const Table& t);

}  // namespace svkit
