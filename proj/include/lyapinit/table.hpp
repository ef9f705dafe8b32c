#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lyapinit/quad.hpp"

namespace lyapinit {

/// One lookup-table row at width d for slopes (1, alpha).
struct TableRow {
  int d = 0;
  double I_alpha = 0.0;
  double I_one = 0.0;
  double lambda_he = 0.0;    // ln(sigma_he) + I_alpha
  double lambda_orth = 0.0;  // I_alpha - I_one, orthogonal with eta = 1
  double sigma_he = 0.0;
  double sigma_crit = 0.0;   // exp(-I_alpha)
  double eta_crit = 0.0;     // exp(I_one - I_alpha)
};

enum class TableFormat { csv, md, json };

TableFormat parse_table_format(std::string_view name);

namespace table {

/// 1-10, 16, 20, 30, 32, 40, 50, 60, 64, 70, 80, 90, 100, 128, 200, 256,
/// 300, 400, 500, 512, 600, 700, 800, 900, 1000, 1024.
const std::vector<int>& default_dims();

TableRow row(int d, double alpha, const quad::QuadSettings& settings = {});
std::vector<TableRow> rows(double alpha, const std::vector<int>& dims, const quad::QuadSettings& settings = {});

/// Rounds to 7 decimals and drops trailing zeros, keeping one: 2.262791, 10.0.
std::string format_fixed7(double value);

/// csv and md use format_fixed7; json carries 17 significant digits.
std::string render(const std::vector<TableRow>& rows, double alpha, TableFormat format);

}  // namespace table
}  // namespace lyapinit
