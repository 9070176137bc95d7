#pragma once

// Text formats: CSV batches, the covariance-matrix CSV, JSON reports.

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mixstable/batch.hpp"
#include "mixstable/error.hpp"
#include "mixstable/limit_lab.hpp"
#include "mixstable/registry.hpp"
#include "mixstable/spd.hpp"
#include "mixstable/tests.hpp"

namespace mixstable::io {

using Json = nlohmann::ordered_json;
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// %.17g: round-trips every double.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string num12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
}

inline Json metadata_json(const Metadata& meta) {
  Json j = Json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

inline void write_csv(std::ostream& os, const SampleBatch& b, const Metadata& meta) {
  write_metadata(os, meta);
  for (std::size_t j = 0; j < b.dim(); ++j) os << (j ? "," : "") << (b.dim() == 1 ? "x" : "x" + std::to_string(j));
  os << '\n';
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto r = b.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << num(r[j]);
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const SampleBatch& b, const Metadata& meta) {
  Json j;
  j["meta"] = metadata_json(meta);
  j["dim"] = b.dim();
  Json rows = Json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto r = b.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["data"] = std::move(rows);
  os << j.dump() << '\n';
}

namespace detail {

inline std::vector<double> parse_numbers(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw ConfigError(where + ": cannot parse '" + cell + "' as a number");
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw ConfigError(where + ": cannot parse '" + cell + "' as a number");
  }
  return out;
}

inline bool skippable(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

}  // namespace detail

/// Reads a batch written by write_csv: '#' lines and a non-numeric header are skipped.
inline SampleBatch read_csv(std::istream& is, const std::string& where = "input") {
  std::vector<double> data;
  std::size_t dim = 0;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::skippable(line)) continue;
    if (first) {
      first = false;
      const auto p = line.find_first_not_of(" \t+-.0123456789");
      if (p != std::string::npos && line[p] != ',' && line[p] != 'e' && line[p] != 'E') continue;
    }
    const auto row = detail::parse_numbers(line, where);
    if (dim == 0) dim = row.size();
    if (row.size() != dim) throw ShapeError(where + ": ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  if (dim == 0) throw EmptyBatchError(where + ": no data rows");
  return SampleBatch(std::move(data), dim);
}

inline SampleBatch read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  return read_csv(f, path);
}

/// Covariance matrix as rows of comma-separated numbers.
inline SpdMatrix read_sigma_csv(std::istream& is, const std::string& where = "sigma") {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line))
    if (!detail::skippable(line)) rows.push_back(detail::parse_numbers(line, where));
  if (rows.empty()) throw ConfigError(where + ": empty matrix");
  return make_spd(rows);
}

inline SpdMatrix read_sigma_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  return read_sigma_csv(f, path);
}

inline Json to_json(const std::map<std::string, double>& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

inline Json to_json(const TestReport& r) {
  Json j;
  j["id"] = r.id;
  j["method"] = r.method;
  j["statistic"] = r.statistic;
  j["p_value"] = r.p_value;
  if (r.permutation_p_value) j["permutation_p_value"] = *r.permutation_p_value;
  if (r.adjusted_p_value) j["adjusted_p_value"] = *r.adjusted_p_value;
  j["n_a"] = r.n_a;
  j["n_b"] = r.n_b;
  j["seed"] = r.seed;
  j["level"] = r.level;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["params"] = to_json(r.params);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

/// Registry export row: {id, statement, params, verdict, p_value, n, seed}.
inline Json registry_entry(const TestReport& r) {
  Json j;
  j["id"] = r.id;
  j["statement"] = find_case(r.id).statement;
  j["params"] = to_json(r.params);
  j["verdict"] = r.pass ? "pass" : "fail";
  j["p_value"] = r.p_value;
  if (r.adjusted_p_value) j["adjusted_p_value"] = *r.adjusted_p_value;
  j["n"] = r.n_a;
  j["seed"] = r.seed;
  return j;
}

inline Json to_json(const ConvergenceReport& r) {
  Json j;
  j["name"] = r.name;
  j["target"] = r.target;
  Json pts = Json::array();
  for (const auto& p : r.points)
    pts.push_back({{"n", p.n},
                   {"energy_distance", p.energy_distance},
                   {"distance_se", p.distance_se},
                   {"p_value", p.p_value},
                   {"permutation_p_value", p.permutation_p_value},
                   {"ks_index_distance", p.ks_index_distance},
                   {"ks_index_p_value", p.ks_index_p_value},
                   {"literal_fraction", p.literal_fraction}});
  j["points"] = std::move(pts);
  j["top_not_rejected"] = r.top_not_rejected;
  j["nonincreasing"] = r.nonincreasing;
  j["verdict"] = r.pass ? "pass" : "fail";
  if (r.partial) j["partial"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline void write_csv(std::ostream& os, const ConvergenceReport& r, const Metadata& meta) {
  write_metadata(os, meta);
  os << "n,energy_distance,p_value,ks_index_distance,distance_se,permutation_p_value,literal_fraction,ks_index_p_value\n";
  for (const auto& p : r.points)
    os << p.n << ',' << num(p.energy_distance) << ',' << num(p.p_value) << ',' << num(p.ks_index_distance) << ','
       << num(p.distance_se) << ',' << num(p.permutation_p_value) << ',' << num(p.literal_fraction) << ','
       << num(p.ks_index_p_value) << '\n';
}

}  // namespace mixstable::io
