#include "effbench/record_log.hpp"

#include "effbench/error.hpp"
#include "effbench/process.hpp"

namespace effbench {

namespace fs = std::filesystem;
using nlohmann::json;

json metrics_to_json(const MetricVector& v) {
  json j = json::object();
  for (auto m : kAllMetrics) {
    const auto& x = v.get(m);
    j[std::string(to_string(m))] = x ? json(*x) : json(nullptr);
  }
  return j;
}

MetricVector metrics_from_json(const json& j) {
  MetricVector v;
  for (auto m : kAllMetrics) {
    const std::string name(to_string(m));
    if (j.contains(name) && !j[name].is_null()) v.set(m, j[name].get<double>());
  }
  return v;
}

json Record::to_json() const {
  return {{"stage", stage}, {"key", key}, {"config", config_hash}, {"payload", payload}};
}

Record Record::from_json(const json& j) {
  Record r;
  r.stage = j.at("stage").get<std::string>();
  r.key = j.at("key").get<std::string>();
  r.config_hash = j.value("config", "");
  r.payload = j.at("payload");
  return r;
}

namespace {

struct Parsed {
  std::vector<Record> records;
  std::size_t good_bytes = 0;  // prefix made of complete, valid lines
};

Parsed parse_log(const fs::path& path) {
  Parsed p;
  std::error_code ec;
  if (!fs::exists(path, ec)) return p;
  const auto text = read_text_file(path);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto eol = text.find('\n', pos);
    const bool last = eol == std::string::npos || eol + 1 >= text.size();
    const auto line = text.substr(pos, (eol == std::string::npos ? text.size() : eol) - pos);
    std::optional<Record> rec;
    if (eol != std::string::npos) {
      try {
        rec = Record::from_json(json::parse(line));
      } catch (const json::exception&) {
      }
    }
    if (!rec) {
      if (last) break;  // interrupted final write
      throw Error(ErrorKind::Io,
                  path.string() + ":" + std::to_string(line_no) + ": unreadable record",
                  path.string());
    }
    p.records.push_back(std::move(*rec));
    pos = eol + 1;
    p.good_bytes = pos;
  }
  return p;
}

}  // namespace

RecordLog::RecordLog(const fs::path& path, std::string config_hash)
    : path_(path), config_hash_(std::move(config_hash)) {
  auto parsed = parse_log(path_);
  std::error_code ec;
  if (fs::exists(path_, ec) && fs::file_size(path_) != parsed.good_bytes) {
    fs::resize_file(path_, parsed.good_bytes);
  }
  for (auto& r : parsed.records) by_key_.try_emplace(r.key, std::move(r));
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorKind::Io, "cannot open " + path_.string() + " for append");
}

bool RecordLog::append(const std::string& stage, const std::string& key, json payload) {
  std::lock_guard lock(mu_);
  if (by_key_.count(key)) return false;
  Record r{stage, key, config_hash_, std::move(payload)};
  out_ << r.to_json().dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::Io, "write to " + path_.string() + " failed");
  by_key_.emplace(key, std::move(r));
  return true;
}

std::optional<json> RecordLog::lookup(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second.payload;
}

bool RecordLog::contains(const std::string& key) const {
  std::lock_guard lock(mu_);
  return by_key_.count(key) > 0;
}

std::size_t RecordLog::size() const {
  std::lock_guard lock(mu_);
  return by_key_.size();
}

std::vector<Record> RecordLog::records() const {
  std::lock_guard lock(mu_);
  std::vector<Record> out;
  out.reserve(by_key_.size());
  for (const auto& [k, r] : by_key_) out.push_back(r);
  return out;
}

std::vector<Record> RecordLog::read(const fs::path& path) {
  auto parsed = parse_log(path);
  std::map<std::string, Record> by_key;
  for (auto& r : parsed.records) by_key.try_emplace(r.key, std::move(r));
  std::vector<Record> out;
  for (auto& [k, r] : by_key) out.push_back(std::move(r));
  return out;
}

}  // namespace effbench
