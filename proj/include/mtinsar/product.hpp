#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/inversion.hpp"

namespace mtinsar {

/// Atomic text write: everything goes to <path>.tmp, then a rename.
inline void write_file_atomic(const std::string& path,
                              const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp);
    out << contents;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::IoFailure,
                "rename " + tmp + " -> " + path + ": " + ec.message());
}

/// The 5-column velocity CSV: longitude, latitude, incidence angle, LOS rate
/// (cm/yr), LOS rate STD (cm/yr). No header, fixed precision, '\n' endings.
/// Rates are converted from mm/yr with an exact factor of 0.1.
inline std::string format_csv(const DisplacementProduct& product) {
  if (product.n_ok() == 0)
    throw Error(ErrorCode::EmptyProduct, "refusing to write an empty CSV");
  std::string out;
  out.reserve(product.n_ok() * 64);
  char line[160];
  for (const auto& sol : product.solutions) {
    if (!sol.ok) continue;
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.4f,%.6f,%.6f\n", sol.lon,
                  sol.lat, sol.incidence_deg, sol.rate_mm_yr * 0.1,
                  sol.std_mm_yr * 0.1);
    out += line;
  }
  return out;
}

inline void write_csv(const DisplacementProduct& product,
                      const std::string& path) {
  write_file_atomic(path, format_csv(product));
}

struct CsvRow {
  double lon, lat, incidence_deg, rate_cm_yr, std_cm_yr;
};

inline std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CsvRow r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.lon, &r.lat,
                    &r.incidence_deg, &r.rate_cm_yr, &r.std_cm_yr) != 5)
      throw Error(ErrorCode::IoFailure, "bad CSV row: " + line);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<CsvRow> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open CSV " + path);
  return parse_csv(in);
}

/// Full-precision per-pixel product table (versioned, see docs/formats.md).
inline std::string format_product_table(const DisplacementProduct& product) {
  std::ostringstream out;
  out << "MTPROD 1\n";
  out << "# pixel_id lon lat incidence_deg rate_mm_yr std_mm_yr\n";
  char line[200];
  for (const auto& sol : product.solutions) {
    if (!sol.ok) continue;
    std::snprintf(line, sizeof line, "%d %.9f %.9f %.6f %.9f %.9f\n",
                  sol.pixel_id, sol.lon, sol.lat, sol.incidence_deg,
                  sol.rate_mm_yr, sol.std_mm_yr);
    out << line;
  }
  return out.str();
}

inline void write_product_table(const DisplacementProduct& product,
                                const std::string& path) {
  write_file_atomic(path, format_product_table(product));
}

struct ProductRow {
  int pixel_id;
  double lon, lat, incidence_deg, rate_mm_yr, std_mm_yr;
};

inline std::vector<ProductRow> load_product_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open product " + path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "MTPROD" || version != 1)
    throw Error(ErrorCode::IoFailure, "bad product header in " + path);
  std::string rest;
  std::getline(in, rest);
  std::vector<ProductRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ProductRow r;
    if (std::sscanf(line.c_str(), "%d %lf %lf %lf %lf %lf", &r.pixel_id, &r.lon,
                    &r.lat, &r.incidence_deg, &r.rate_mm_yr, &r.std_mm_yr) != 6)
      throw Error(ErrorCode::IoFailure, "bad product row: " + line);
    rows.push_back(r);
  }
  return rows;
}

/// Time-series export: `pixel_id,epoch,displacement_cm,sigma_cm` per line.
inline std::string format_timeseries_table(const DisplacementProduct& product) {
  std::ostringstream out;
  out << "# pixel_id,epoch,displacement_cm,sigma_cm\n";
  char line[128];
  for (std::size_t p = 0; p < product.solutions.size(); ++p) {
    if (!product.solutions[p].ok) continue;
    for (std::size_t e = 0; e < product.epochs.size(); ++e) {
      std::snprintf(line, sizeof line, "%d,%s,%.9f,%.9f\n",
                    product.solutions[p].pixel_id,
                    format_date(product.epochs[e]).c_str(),
                    product.displacement_cm(static_cast<Eigen::Index>(p),
                                            static_cast<Eigen::Index>(e)),
                    product.sigma_cm(static_cast<Eigen::Index>(p),
                                     static_cast<Eigen::Index>(e)));
      out << line;
    }
  }
  return out.str();
}

inline void write_timeseries_table(const DisplacementProduct& product,
                                   const std::string& path) {
  write_file_atomic(path, format_timeseries_table(product));
}

}  // namespace mtinsar
