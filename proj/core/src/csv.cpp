#include "infoteacher/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "infoteacher/errors.hpp"

namespace infoteacher::data {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw IngestionError(path + ": empty file");
  CsvTable table;
  table.columns = split_fields(line);
  if (table.columns.empty() || table.columns[0].empty()) {
    throw IngestionError(path + ": missing header row");
  }
  const std::size_t width = table.columns.size();

  std::vector<double> cells;
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw IngestionError(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      double v = 0;
      const auto& f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw IngestionError(path + ":" + std::to_string(lineno) +
                             ": column '" + table.columns[j] +
                             "': not a number: '" + f + "'");
      }
      cells.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw IngestionError(path + ": no data rows");

  table.values.resize(rows, width);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(i, j) = cells[i * width + j];
    }
  }
  return table;
}

Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& target_columns) {
  const CsvTable table = read_csv(path);

  std::vector<int> target_idx;
  for (const auto& name : target_columns) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end()) {
      throw IngestionError(path + ": no column named '" + name + "'");
    }
    target_idx.push_back(static_cast<int>(it - table.columns.begin()));
  }
  if (target_idx.empty()) throw ConfigError("load_csv: no target columns given");

  std::vector<int> feature_idx;
  for (int j = 0; j < table.values.cols(); ++j) {
    if (std::find(target_idx.begin(), target_idx.end(), j) == target_idx.end()) {
      feature_idx.push_back(j);
    }
  }
  if (feature_idx.empty()) {
    throw IngestionError(path + ": all columns are targets; no features left");
  }

  Eigen::MatrixXd xs(table.values.rows(), feature_idx.size());
  Eigen::MatrixXd ys(table.values.rows(), target_idx.size());
  for (std::size_t j = 0; j < feature_idx.size(); ++j) {
    xs.col(j) = table.values.col(feature_idx[j]);
  }
  for (std::size_t j = 0; j < target_idx.size(); ++j) {
    ys.col(j) = table.values.col(target_idx[j]);
  }
  return Dataset(std::move(xs), std::move(ys));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out << ',';
    out << table.columns[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(table.values(i, j));
    }
    out << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::vector<std::string>& feature_names,
                       const std::vector<std::string>& target_names) {
  if (static_cast<int>(feature_names.size()) != ds.p() ||
      static_cast<int>(target_names.size()) != ds.q()) {
    throw ConfigError("write_dataset_csv: column name counts do not match");
  }
  CsvTable table;
  table.columns = feature_names;
  table.columns.insert(table.columns.end(), target_names.begin(),
                       target_names.end());
  table.values.resize(ds.n(), ds.p() + ds.q());
  table.values.leftCols(ds.p()) = ds.xs();
  table.values.rightCols(ds.q()) = ds.ys();
  write_csv(path, table);
}

}  // namespace infoteacher::data
