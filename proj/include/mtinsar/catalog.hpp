#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtinsar/dates.hpp"
#include "mtinsar/errors.hpp"

namespace mtinsar {

/// One radar acquisition. perp_baseline_m is the signed perpendicular
/// baseline coordinate relative to a common reference orbit, so the pairwise
/// baseline of (i, j) is the difference of the two coordinates.
struct Acquisition {
  int id = 0;
  SerialDay date = 0;
  double perp_baseline_m = 0.0;
};

class AcquisitionCatalog {
 public:
  AcquisitionCatalog() = default;

  explicit AcquisitionCatalog(std::vector<Acquisition> acqs)
      : acqs_(std::move(acqs)) {
    validate();
  }

  std::size_t size() const { return acqs_.size(); }
  bool empty() const { return acqs_.empty(); }
  const Acquisition& operator[](std::size_t i) const { return acqs_[i]; }
  const std::vector<Acquisition>& acquisitions() const { return acqs_; }

  SerialDay date(std::size_t i) const { return acqs_[i].date; }
  double baseline(std::size_t i) const { return acqs_[i].perp_baseline_m; }

 private:
  void validate() const {
    for (std::size_t i = 0; i < acqs_.size(); ++i) {
      if (acqs_[i].id != static_cast<int>(i))
        throw Error(ErrorCode::InvalidArgument,
                    "acquisition ids must be 0..n-1 in order");
      if (i > 0 && acqs_[i].date <= acqs_[i - 1].date)
        throw Error(ErrorCode::InvalidArgument,
                    "acquisition dates must be strictly increasing");
    }
  }

  std::vector<Acquisition> acqs_;
};

// Catalog file: one row per acquisition, `id,date,perp_baseline_m` with
// ISO dates. Blank lines and lines starting with '#' are ignored.

inline AcquisitionCatalog parse_catalog(std::istream& in) {
  std::vector<Acquisition> acqs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string id_s, date_s, base_s;
    if (!std::getline(ss, id_s, ',') || !std::getline(ss, date_s, ',') ||
        !std::getline(ss, base_s))
      throw Error(ErrorCode::InvalidArgument,
                  "catalog line " + std::to_string(lineno) +
                      ": want id,date,perp_baseline_m");
    Acquisition a;
    a.id = std::stoi(id_s);
    a.date = parse_date(date_s);
    a.perp_baseline_m = std::stod(base_s);
    acqs.push_back(a);
  }
  return AcquisitionCatalog(std::move(acqs));
}

inline AcquisitionCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open catalog " + path);
  return parse_catalog(in);
}

inline void write_catalog(const AcquisitionCatalog& cat, std::ostream& out) {
  out << "# id,date,perp_baseline_m\n";
  char buf[64];
  for (const auto& a : cat.acquisitions()) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.3f", a.id,
                  format_date(a.date).c_str(), a.perp_baseline_m);
    out << buf << '\n';
  }
}

inline void save_catalog(const AcquisitionCatalog& cat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write catalog " + path);
  write_catalog(cat, out);
}

}  // namespace mtinsar
