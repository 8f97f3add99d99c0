#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ccdyn {

/// One line-delimited metrics record. Fields serialize in a fixed order so
/// identical runs produce byte-identical output.
struct MetricsRecord {
  std::string type;  // "commit", "query", "summary"
  int32_t trial = 0;
  int64_t update_index = 0;
  std::optional<int64_t> cost;
  std::optional<int64_t> opt_cost;
  std::optional<double> ratio;
  int64_t violation_size = 0;
  int64_t epoch = 0;
  int64_t steps_used = 0;
  std::vector<std::pair<std::string, double>> extra;  // summary payload

  std::string to_json() const;
};

/// Collects records in order; text output is schema-versioned JSONL.
class MetricsSink {
 public:
  void put(const MetricsRecord& r) { records_.push_back(r); }
  const std::vector<MetricsRecord>& records() const { return records_; }
  void append(const MetricsSink& other) {
    records_.insert(records_.end(), other.records_.begin(), other.records_.end());
  }
  std::string serialize() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<MetricsRecord> records_;
};

}  // namespace ccdyn
