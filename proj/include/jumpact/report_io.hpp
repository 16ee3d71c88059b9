#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "jumpact/common.hpp"
#include "jumpact/statistics.hpp"

namespace jumpact {

// Stable CSV contract for test reports. Field names and order are part of the
// command-line interface; numbers carry 17 significant digits so round trips
// are lossless.
inline std::string test_report_csv_header() {
  return "test,statistic,null_limit,variance,variance_raw,z_score,critical_value,reject,"
         "degenerate,n_increments_used,level,noise_limit,truncation_cutoff_first,"
         "truncation_cutoff_last,n_days,message";
}

inline std::string to_csv_row(const TestReport& r) {
  std::ostringstream os;
  const double first = r.truncation_cutoffs.empty() ? 0.0 : r.truncation_cutoffs.front();
  const double last = r.truncation_cutoffs.empty() ? 0.0 : r.truncation_cutoffs.back();
  std::string msg = r.message;
  for (char& c : msg) {
    if (c == ',' || c == '\n') c = ';';
  }
  os << r.test << ',' << format_g17(r.statistic) << ',' << format_g17(r.null_limit) << ','
     << format_g17(r.variance) << ',' << format_g17(r.variance_raw) << ','
     << format_g17(r.z_score) << ',' << format_g17(r.critical_value) << ','
     << (r.reject ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ',' << r.n_increments_used << ','
     << format_g17(r.level) << ',' << format_g17(r.noise_limit) << ',' << format_g17(first) << ','
     << format_g17(last) << ',' << r.truncation_cutoffs.size() << ',' << msg;
  return os.str();
}

inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["test"] = r.test;
  j["statistic"] = r.statistic;
  j["null_limit"] = r.null_limit;
  j["variance"] = r.variance;
  j["variance_raw"] = r.variance_raw;
  j["z_score"] = r.z_score;
  j["critical_value"] = r.critical_value;
  j["reject"] = r.reject;
  j["degenerate"] = r.degenerate;
  j["n_increments_used"] = r.n_increments_used;
  j["level"] = r.level;
  j["noise_limit"] = r.noise_limit;
  j["truncation_cutoffs"] = r.truncation_cutoffs;
  j["message"] = r.message;
  return j;
}

}  // namespace jumpact
