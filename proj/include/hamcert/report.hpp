// Copyright 2026 The hamcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hamcert/error.hpp"

#ifndef HAMCERT_VERSION
#define HAMCERT_VERSION "0.0.0"
#endif

namespace hamcert {

using Json = nlohmann::ordered_json;

/*******************************************************************************
 * Parallel trials
 ******************************************************************************/

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/**
 * Evaluates fn(0..count-1) on `jobs` workers and returns the results in
 * index order. Workers pull indices from a shared counter and write only
 * their own slots, so results never depend on scheduling. The first
 * exception thrown by any call is rethrown after all workers stop.
 */
template <class T>
std::vector<T> parallel_map(std::uint64_t count, unsigned jobs,
                            const std::function<T(std::uint64_t)>& fn) {
  std::vector<T> out(count);
  if (jobs == 0) jobs = default_jobs();
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(count, 1)));
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/*******************************************************************************
 * Statistics
 ******************************************************************************/

struct Interval {
  double low;
  double high;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("loglog_slope: need two or more matching points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/*******************************************************************************
 * Reports
 ******************************************************************************/

/// One declared acceptance check: value `op` threshold, op one of >=, <=, ==.
struct Check {
  std::string name;
  double value = 0.0;
  std::string op = ">=";
  double threshold = 0.0;
  bool passed = false;

  static Check make(std::string name, double value, std::string op, double threshold) {
    bool ok = false;
    if (op == ">=") ok = value >= threshold;
    else if (op == "<=") ok = value <= threshold;
    else if (op == "==") ok = value == threshold;
    else throw InvalidArgument("check: unknown comparison '" + op + "'");
    return {std::move(name), value, std::move(op), threshold, ok};
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Report {
  std::string battery;
  Json config;  // the exact configuration that produced the report
  Json inputs = Json::object();  // resolved Hamiltonians and derived parameters
  std::vector<std::string> columns;
  std::vector<Json> records;
  Json aggregates = Json::object();
  std::vector<Check> checks;
  std::string version = HAMCERT_VERSION;
  std::string timestamp = utc_timestamp();
  double wall_clock_seconds = 0.0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  /// Per-trial records only, serialized; stable across reruns of a config.
  std::string records_text() const {
    Json arr = Json::array();
    for (const auto& r : records) arr.push_back(r);
    return arr.dump();
  }

  Json to_json() const {
    Json j;
    j["tool"] = "hamcert";
    j["version"] = version;
    j["timestamp"] = timestamp;
    j["battery"] = battery;
    j["config"] = config;
    j["inputs"] = inputs;
    j["columns"] = columns;
    j["records"] = Json::array();
    for (const auto& r : records) j["records"].push_back(r);
    j["aggregates"] = aggregates;
    j["checks"] = Json::array();
    for (const auto& c : checks) {
      j["checks"].push_back({{"name", c.name},
                             {"value", c.value},
                             {"op", c.op},
                             {"threshold", c.threshold},
                             {"passed", c.passed}});
    }
    j["passed"] = passed();
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }
};

/*******************************************************************************
 * CSV
 ******************************************************************************/

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_field(const Json& v) {
  switch (v.type()) {
    case Json::value_t::null: return "";
    case Json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case Json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
    case Json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
    case Json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
      std::string s = buf;
      // Keep floats distinguishable from integers on the way back in.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case Json::value_t::string: return csv_quote(v.get<std::string>());
    default: return csv_quote(v.dump());
  }
}

inline Json csv_value(const std::string& s) {
  if (s.empty()) return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  const bool numeric_start =
      std::isdigit(static_cast<unsigned char>(s[0])) ||
      ((s[0] == '-' || s[0] == '+') && s.size() > 1);
  if (numeric_start) {
    try {
      std::size_t used = 0;
      if (s.find_first_of(".eEn") == std::string::npos) {
        if (s[0] == '-') {
          const long long v = std::stoll(s, &used);
          if (used == s.size()) return static_cast<std::int64_t>(v);
        } else {
          const unsigned long long v = std::stoull(s, &used);
          if (used == s.size()) return static_cast<std::uint64_t>(v);
        }
      } else {
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
      }
    } catch (const std::exception&) {
    }
  }
  return s;
}

}  // namespace detail

/**
 * Writes the report's records as CSV: one header line with the column
 * names, then one row per record. Floats use 17 significant digits so a
 * parsed value equals the original double; null fields are empty.
 */
inline void emit_csv(const Report& r, std::ostream& os) {
  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    os << (c ? "," : "") << detail::csv_quote(r.columns[c]);
  }
  os << '\n';
  for (const auto& rec : r.records) {
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      const auto it = rec.find(r.columns[c]);
      os << (c ? "," : "") << (it == rec.end() ? std::string() : detail::csv_field(*it));
    }
    os << '\n';
  }
}

inline std::string emit_csv(const Report& r) {
  std::ostringstream os;
  emit_csv(r, os);
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 reader: quoted fields may hold commas, quotes and newlines.
inline CsvTable parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      lines.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError("csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    lines.push_back(std::move(row));
  }
  if (lines.empty()) throw ParseError("csv: missing header");
  CsvTable t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) {
      throw ParseError("csv: row " + std::to_string(i) + " has " +
                       std::to_string(lines[i].size()) + " fields, header has " +
                       std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

inline CsvTable parse_csv(const std::string& text) {
  std::istringstream is(text);
  return parse_csv(is);
}

/// Rebuilds typed records from a parsed table (nulls, bools, integers,
/// floats, strings).
inline std::vector<Json> records_from_csv(const CsvTable& t) {
  std::vector<Json> out;
  for (const auto& row : t.rows) {
    Json rec = Json::object();
    for (std::size_t c = 0; c < t.header.size(); ++c) rec[t.header[c]] = detail::csv_value(row[c]);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace hamcert
