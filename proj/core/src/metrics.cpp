#include "ccdyn/metrics.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ccdyn {

namespace {

void append_kv(std::string& s, const char* key, int64_t v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "\"%s\":%" PRId64, key, v);
  s += buf;
}

void append_kv(std::string& s, const char* key, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "\"%s\":%.17g", key, v);
  s += buf;
}

}  // namespace

std::string MetricsRecord::to_json() const {
  std::string s = "{\"type\":\"" + type + "\",";
  append_kv(s, "trial", static_cast<int64_t>(trial));
  s += ',';
  append_kv(s, "update_index", update_index);
  s += ",\"cost\":";
  s += cost ? std::to_string(*cost) : "null";
  if (opt_cost) {
    s += ',';
    append_kv(s, "opt_cost", *opt_cost);
  }
  if (ratio) {
    s += ',';
    append_kv(s, "ratio", *ratio);
  }
  s += ',';
  append_kv(s, "violation_size", violation_size);
  s += ',';
  append_kv(s, "epoch", epoch);
  s += ',';
  append_kv(s, "steps_used", steps_used);
  for (const auto& [k, v] : extra) {
    s += ',';
    append_kv(s, k.c_str(), v);
  }
  s += '}';
  return s;
}

std::string MetricsSink::serialize() const {
  std::string out = "{\"schema\":\"ccdyn-metrics/1\"}\n";
  for (const auto& r : records_) {
    out += r.to_json();
    out += '\n';
  }
  return out;
}

void MetricsSink::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open metrics file " + path);
  f << serialize();
}

}  // namespace ccdyn
