#pragma once

#include <string>

#include "peakforge/grid.hpp"
#include "peakforge/reduction.hpp"

namespace peakforge {

// Raw field file: [u32 dims][f64 L][u32 M][f64 s][f64 eps][M^dims f64 payload],
// little-endian, row-major.
void write_field_binary(const std::string& path, const Field& f, double s, double eps);
Field read_field_binary(const std::string& path, double* s_out = nullptr, double* eps_out = nullptr);

// Solution record: JSON diagnostics next to the raw field binary.
void write_solution(const std::string& json_path, const std::string& field_path,
                    const Solution& sol, double eps, const std::string& config_hash);

// 17-significant-digit, locale-free formatting for CSV cells.
std::string csv_number(double v);

}  // namespace peakforge
