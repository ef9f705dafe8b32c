#include "lyapinit/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "lyapinit/analytic.hpp"
#include "lyapinit/ensembles.hpp"
#include "lyapinit/errors.hpp"

namespace lyapinit {

TableFormat parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "md") return TableFormat::md;
  if (name == "json") return TableFormat::json;
  throw UsageError("unknown table format '" + std::string(name) + "' (expected csv, md or json)");
}

namespace table {

namespace {

constexpr const char* kColumns[] = {"d",         "I_alpha",  "I_one",     "lambda_he",
                                    "lambda_orth", "sigma_he", "sigma_crit", "eta_crit"};

std::vector<double> values(const TableRow& r) {
  return {r.I_alpha, r.I_one, r.lambda_he, r.lambda_orth, r.sigma_he, r.sigma_crit, r.eta_crit};
}

}  // namespace

const std::vector<int>& default_dims() {
  static const std::vector<int> dims = {1,   2,   3,   4,   5,   6,   7,   8,   9,   10,  16,  20,
                                        30,  32,  40,  50,  60,  64,  70,  80,  90,  100, 128, 200,
                                        256, 300, 400, 500, 512, 600, 700, 800, 900, 1000, 1024};
  return dims;
}

TableRow row(int d, double alpha, const quad::QuadSettings& settings) {
  TableRow r;
  r.d = d;
  r.I_alpha = quad::integral_I(d, alpha, settings);
  r.I_one = quad::integral_I(d, 1.0, settings);
  r.sigma_he = analytic::sigma_he(d, alpha);
  r.lambda_he = std::log(r.sigma_he) + r.I_alpha;
  r.lambda_orth = r.I_alpha - r.I_one;
  r.sigma_crit = std::exp(-r.I_alpha);
  r.eta_crit = std::exp(r.I_one - r.I_alpha);
  return r;
}

std::vector<TableRow> rows(double alpha, const std::vector<int>& dims, const quad::QuadSettings& settings) {
  if (dims.empty()) throw UsageError("table needs at least one width");
  std::vector<TableRow> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(row(d, alpha, settings));
  return out;
}

std::string format_fixed7(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", value);
  std::string s(buf);
  while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string render(const std::vector<TableRow>& rows, double alpha, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::csv:
      for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
      out << '\n';
      for (const TableRow& r : rows) {
        out << r.d;
        for (double v : values(r)) out << ',' << format_fixed7(v);
        out << '\n';
      }
      break;
    case TableFormat::md:
      out << "alpha = " << format_fixed7(alpha) << "\n\n|";
      for (const char* c : kColumns) out << ' ' << c << " |";
      out << "\n|";
      for (std::size_t i = 0; i < std::size(kColumns); ++i) out << " ---: |";
      out << '\n';
      for (const TableRow& r : rows) {
        out << "| " << r.d << " |";
        for (double v : values(r)) out << ' ' << format_fixed7(v) << " |";
        out << '\n';
      }
      break;
    case TableFormat::json: {
      nlohmann::json doc = {{"alpha", alpha}, {"rows", nlohmann::json::array()}};
      for (const TableRow& r : rows) {
        nlohmann::json j = {{"d", r.d}};
        const auto v = values(r);
        for (std::size_t i = 0; i < v.size(); ++i) j[kColumns[i + 1]] = v[i];
        doc["rows"].push_back(std::move(j));
      }
      out << dump_json17(doc) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace table
}  // namespace lyapinit
