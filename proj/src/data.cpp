#include "svkit/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "svkit/rng.hpp"

namespace svkit {

int Table::n_classes() const {
  int c = 0;
  for (int label : y) c = std::max(c, label + 1);
  return c;
}

Table Table::take(const std::vector<int>& row_indices) const {
  Table out;
  out.feature_names = feature_names;
  out.x.reserve(row_indices.size());
  out.y.reserve(row_indices.size());
  for (int i : row_indices) {
    if (i < 0 || i >= n_rows()) throw std::out_of_range("table: row index out of range");
    out.x.push_back(x[static_cast<std::size_t>(i)]);
    out.y.push_back(y[static_cast<std::size_t>(i)]);
  }
  return out;
}

Table Table::slice(int begin, int end) const {
  if (begin < 0 || end < begin || end > n_rows())
    throw std::out_of_range("table: bad slice");
  Table out;
  out.feature_names = feature_names;
  out.x.assign(x.begin() + begin, x.begin() + end);
  out.y.assign(y.begin() + begin, y.begin() + end);
  return out;
}

void Table::append_row(const std::vector<double>& row, int label) {
  if (static_cast<int>(row.size()) != n_features())
    throw std::invalid_argument("table: row width mismatch");
  x.push_back(row);
  y.push_back(label);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    cells.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

Table load_table(const std::string& csv_path, const std::string& label_column) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("load_table: cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_table: empty file " + csv_path);
  const auto header = split_csv_line(line);
  if (header.empty()) throw std::runtime_error("load_table: empty header in " + csv_path);

  int label_idx = static_cast<int>(header.size()) - 1;
  if (!label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), label_column);
    if (it == header.end())
      throw std::runtime_error("load_table: no column '" + label_column + "' in " + csv_path);
    label_idx = static_cast<int>(it - header.begin());
  }

  Table t;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (i != label_idx) t.feature_names.push_back(header[static_cast<std::size_t>(i)]);

  // first-appearance codes, one dictionary per non-numeric column
  std::vector<std::map<std::string, double>> codes(header.size());
  std::map<std::string, int> label_codes;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("load_table: ragged row at line " + std::to_string(line_no) +
                               " in " + csv_path);
    std::vector<double> row;
    row.reserve(header.size() - 1);
    int label = 0;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
      const std::string& cell = cells[static_cast<std::size_t>(i)];
      if (i == label_idx) {
        double num = 0.0;
        if (parse_double(cell, num) && num == std::floor(num)) {
          label = static_cast<int>(num);
        } else {
          auto [it, inserted] = label_codes.emplace(cell, static_cast<int>(label_codes.size()));
          label = it->second;
          (void)inserted;
        }
        continue;
      }
      double v = 0.0;
      if (!parse_double(cell, v)) {
        auto& dict = codes[static_cast<std::size_t>(i)];
        auto [it, inserted] = dict.emplace(cell, static_cast<double>(dict.size()));
        v = it->second;
        (void)inserted;
      }
      row.push_back(v);
    }
    if (label < 0) throw std::runtime_error("load_table: negative class label at line " +
                                            std::to_string(line_no));
    t.x.push_back(std::move(row));
    t.y.push_back(label);
  }
  if (t.n_rows() == 0) throw std::runtime_error("load_table: no data rows in " + csv_path);
  return t;
}

SplitTable split(const Table& t, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  std::vector<int> idx(static_cast<std::size_t>(t.n_rows()));
  for (int i = 0; i < t.n_rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(hash_combine(seed, 0x5117));
  rng.shuffle(idx);
  const int n_train = std::clamp(static_cast<int>(std::floor(train_fraction * t.n_rows())),
                                 1, t.n_rows() - 1);
  SplitTable out;
  out.train = t.take({idx.begin(), idx.begin() + n_train});
  out.test = t.take({idx.begin() + n_train, idx.end()});
  return out;
}

Table make_blobs(const std::string& name, int rows, int n_features, std::uint64_t seed) {
  int n_classes = 0;
  if (name == "blobs2") {
    n_classes = 2;
  } else if (name == "blobs4") {
    n_classes = 4;
  } else {
    throw std::invalid_argument("make_blobs: unknown generator '" + name + "'");
  }
  if (rows < n_classes || n_features < 1)
    throw std::invalid_argument("make_blobs: bad shape");

  Rng rng(hash_combine(seed, 0xb10b5));
  // class centers spread over [0,1]^d, tight-ish spheres around them
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    std::vector<double> ctr(static_cast<std::size_t>(n_features));
    for (auto& v : ctr) v = 0.15 + 0.7 * rng.uniform();
    centers.push_back(std::move(ctr));
  }
  Table t;
  t.feature_names.reserve(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) t.feature_names.push_back("f" + std::to_string(f));
  for (int i = 0; i < rows; ++i) {
    const int c = i % n_classes;
    std::vector<double> row(static_cast<std::size_t>(n_features));
    for (int f = 0; f < n_features; ++f) {
      double v = centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] +
                 0.08 * rng.normal();
      row[static_cast<std::size_t>(f)] = std::clamp(v, 0.0, 1.0);
    }
    t.x.push_back(std::move(row));
    t.y.push_back(c);
  }
  return t;
}

std::vector<double> feature_means(const Table& t) {
  if (t.n_rows() == 0) throw std::invalid_argument("feature_means: empty table");
  std::vector<double> m(static_cast<std::size_t>(t.n_features()), 0.0);
  for (const auto& row : t.x)
    for (std::size_t f = 0; f < m.size(); ++f) m[f] += row[f];
  for (auto& v : m) v /= t.n_rows();
  return m;
}

}  // namespace svkit
