#include "emt/datasets.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "emt/error.hpp"
#include "emt/random.hpp"

namespace emt {

void SupervisedDataset::validate() const {
  if (classes < 2) throw InvalidInput("dataset needs at least two classes");
  if (labels.size() != features.size()) throw InvalidInput("dataset row/label count mismatch");
  for (std::size_t r = 0; r < features.size(); ++r) {
    detail::require_same_dim(dim(), features[r].size(), "dataset row");
    if (labels[r] >= classes) throw InvalidInput("dataset label out of range");
  }
}

LabelColumn LabelColumn::parse(const std::string& spec) {
  if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return by_index(std::stoul(spec));
  }
  return by_name(spec);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

SupervisedDataset parse_csv(std::istream& in, const LabelColumn& label, bool has_header,
                            const std::string& source) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> header;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (has_header && header.empty()) {
      header = std::move(fields);
      width = header.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw LoadError(source + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    }
    cells.push_back(std::move(fields));
    line_numbers.push_back(lineno);
  }
  if (cells.empty()) throw LoadError(source + ": no data rows");
  if (header.empty()) {
    for (std::size_t c = 0; c < width; ++c) header.push_back("c" + std::to_string(c));
  }

  std::size_t label_col = width;
  if (!label.index && !label.name) {
    label_col = width - 1;
  } else if (label.index) {
    label_col = *label.index;
  } else if (label.name && has_header) {
    const auto it = std::find(header.begin(), header.end(), *label.name);
    if (it != header.end()) label_col = static_cast<std::size_t>(it - header.begin());
  }
  if (label_col >= width) {
    const std::string what = label.name ? "'" + *label.name + "'"
                             : label.index ? std::to_string(*label.index)
                                           : std::string("<none>");
    throw LoadError(source + ": unknown label column " + what);
  }

  SupervisedDataset ds;
  struct Column {
    std::size_t source;
    bool numeric;
    std::vector<std::string> levels;  // categorical values, first-appearance order
  };
  std::vector<Column> columns;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_col) continue;
    Column col{c, true, {}};
    for (const auto& row : cells) {
      if (!row[c].empty() && !parse_number(row[c])) {
        col.numeric = false;
        break;
      }
    }
    if (!col.numeric) {
      for (const auto& row : cells) {
        if (std::find(col.levels.begin(), col.levels.end(), row[c]) == col.levels.end()) {
          col.levels.push_back(row[c]);
        }
      }
      for (const auto& lv : col.levels) ds.feature_names.push_back(header[c] + "=" + lv);
    } else {
      ds.feature_names.push_back(header[c]);
    }
    columns.push_back(std::move(col));
  }

  std::unordered_map<std::string, std::size_t> class_index;
  ds.features.reserve(cells.size());
  for (const auto& row : cells) {
    std::vector<double> x;
    x.reserve(ds.feature_names.size());
    for (const auto& col : columns) {
      const auto& cell = row[col.source];
      if (col.numeric) {
        if (cell.empty()) {
          ++ds.imputed_cells;
          x.push_back(0.0);
        } else {
          x.push_back(*parse_number(cell));
        }
      } else {
        for (const auto& lv : col.levels) x.push_back(cell == lv ? 1.0 : 0.0);
      }
    }
    const auto& lab = row[label_col];
    auto [it, inserted] = class_index.try_emplace(lab, ds.class_names.size());
    if (inserted) ds.class_names.push_back(lab);
    ds.labels.push_back(it->second);
    ds.features.push_back(std::move(x));
  }
  ds.classes = ds.class_names.size();
  if (ds.classes < 2) throw LoadError(source + ": label column has fewer than two classes");
  return ds;
}

SupervisedDataset load_csv(const std::filesystem::path& path, const LabelColumn& label,
                           bool has_header) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  return parse_csv(in, label, has_header, path.string());
}

void write_csv(std::ostream& out, const SupervisedDataset& ds) {
  const auto old_precision = out.precision(17);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << "label\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.features[r]) out << v << ',';
    const auto& lab = ds.labels[r];
    out << (lab < ds.class_names.size() ? ds.class_names[lab] : std::to_string(lab)) << '\n';
  }
  out.precision(old_precision);
}

ScalingTransform fit_scaling(const SupervisedDataset& ds) {
  if (ds.rows() == 0) throw InvalidInput("fit_scaling on an empty dataset");
  const std::size_t d = ds.dim();
  std::vector<double> lo(ds.features.front().begin(), ds.features.front().end());
  std::vector<double> hi = lo;
  for (const auto& row : ds.features) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], row[i]);
      hi[i] = std::max(hi[i], row[i]);
    }
  }
  ScalingTransform t{lo, std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < d; ++i) {
    if (hi[i] > lo[i]) t.factor[i] = 1.0 / (hi[i] - lo[i]);
  }
  return t;
}

SupervisedDataset apply_scaling(SupervisedDataset ds, const ScalingTransform& t) {
  detail::require_same_dim(ds.dim(), t.factor.size(), "apply_scaling");
  for (auto& row : ds.features) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = (row[i] - t.min[i]) * t.factor[i];
  }
  return ds;
}

SupervisedDataset subsample(const SupervisedDataset& ds, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("subsample size must be at least 1");
  std::vector<std::size_t> idx(ds.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(n, idx.size()));

  SupervisedDataset out;
  out.classes = ds.classes;
  out.feature_names = ds.feature_names;
  out.class_names = ds.class_names;
  out.imputed_cells = ds.imputed_cells;
  out.features.reserve(idx.size());
  out.labels.reserve(idx.size());
  for (std::size_t i : idx) {
    out.features.push_back(ds.features[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

BanditEnv::BanditEnv(SupervisedDataset ds) : ds_(std::move(ds)) { ds_.validate(); }

std::optional<BanditEnv::Round> BanditEnv::step() {
  if (cursor_ >= ds_.rows()) return std::nullopt;
  const std::size_t r = cursor_++;
  return Round{ds_.features[r], ds_.labels[r]};
}

ExplainedVariance top_eigen_explained_variance(const SupervisedDataset& ds) {
  if (ds.rows() < 2) throw InvalidInput("explained variance needs at least two rows");
  const auto n = static_cast<Eigen::Index>(ds.rows());
  const auto d = static_cast<Eigen::Index>(ds.dim());
  if (d == 0) return {0.0, true};
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = ds.features[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) return {0.0, true};
  return {lambda.maxCoeff() / total, false};
}

}  // namespace emt
