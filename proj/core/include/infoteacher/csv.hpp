#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "infoteacher/dataset.hpp"

namespace infoteacher::data {

/// A parsed numeric CSV: one header row, comma-separated, dot decimals.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // n rows x columns.size()
};

/// Strict reader; throws IngestionError naming the offending row/column.
CsvTable read_csv(const std::string& path);

/// Splits a CSV into inputs/targets by target column names. The remaining
/// columns become features in file order.
Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& target_columns);

void write_csv(const std::string& path, const CsvTable& table);
void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::vector<std::string>& feature_names,
                       const std::vector<std::string>& target_names);

/// Formats a double so that parsing it back reproduces the value exactly.
std::string format_double(double v);

}  // namespace infoteacher::data
