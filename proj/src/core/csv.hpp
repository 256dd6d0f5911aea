#pragma once

#include <string>
#include <string_view>

#include "market.hpp"
#include "pricing.hpp"

namespace spotsim::csvio {

/// RFC-4180 quoting: fields containing commas, quotes or newlines are wrapped
/// in double quotes with inner quotes doubled.
std::string field(std::string_view raw);

/// Full-precision number formatting so repeated runs are byte-identical.
std::string number(double x);

/// Header row of time points, then one row per path.
void write_matrix_csv(const std::string& path, const market::TimeGrid& grid,
                      std::size_t n_paths, const std::vector<double>& matrix);

void write_report_csv(const std::string& path, const pricing::ValuationReport& report);

}  // namespace spotsim::csvio
