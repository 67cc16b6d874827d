#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infoteacher/csv.hpp"

namespace infoteacher::data {

/// Column layout of the UCI combined-cycle power plant table: ambient
/// temperature, exhaust vacuum, ambient pressure, relative humidity and the
/// net electrical output target.
inline const std::vector<std::string> kCcppColumns = {"AT", "V", "AP", "RH",
                                                      "PE"};

/// Synthetic stand-in for the UCI combined-cycle power plant table: same
/// schema (4 features + PE target), realistic ranges and cross-feature
/// correlation, and a noise floor placed so that a well-trained shallow
/// regressor on 2 principal components plateaus near RMSE 6. Intended for
/// tests and offline runs; the real UCI CSV drops in unchanged.
CsvTable make_ccpp_surrogate(int n = 9568, std::uint64_t seed = 1);

void write_ccpp_surrogate(const std::string& path, int n = 9568,
                          std::uint64_t seed = 1);

}  // namespace infoteacher::data
