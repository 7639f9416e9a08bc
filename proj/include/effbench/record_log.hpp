#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "effbench/types.hpp"

namespace effbench {

/// {"area": x | null, "delay": ..., "power": ...} at full precision.
nlohmann::json metrics_to_json(const MetricVector& v);
MetricVector metrics_from_json(const nlohmann::json& j);

/// One line of the log. `key` is unique per record; the log never rewrites it.
struct Record {
  std::string stage;
  std::string key;
  std::string config_hash;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static Record from_json(const nlohmann::json& j);
};

/// Append-only JSON-lines store. Opening an existing log loads every complete
/// record; an unterminated or unparsable final line (an interrupted write) is
/// cut off. Damage anywhere else throws Error(Io). Thread-safe.
class RecordLog {
 public:
  RecordLog(const std::filesystem::path& path, std::string config_hash);

  /// Writes and flushes `payload` under `key` unless the key already exists;
  /// returns false when it did. The first record for a key wins.
  bool append(const std::string& stage, const std::string& key, nlohmann::json payload);

  std::optional<nlohmann::json> lookup(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::size_t size() const;
  /// All records in key order.
  std::vector<Record> records() const;

  const std::filesystem::path& path() const { return path_; }

  /// Reads a log without opening it for writing (same truncation tolerance, but
  /// nothing on disk is modified).
  static std::vector<Record> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::string config_hash_;
  mutable std::mutex mu_;
  std::map<std::string, Record> by_key_;
  std::ofstream out_;
};

}  // namespace effbench
