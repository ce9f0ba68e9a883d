#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "qsound/error.hpp"

namespace qsound::cli {

std::string tool_version() { return QSOUND_VERSION; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command) {
  set("command", std::move(command));
  set("tool_version", tool_version());
  set("timestamp", utc_timestamp());
}

RunManifest& RunManifest::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

RunManifest& RunManifest::set(std::string key, double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return set(std::move(key), std::string(buf));
}

RunManifest& RunManifest::add_output(const std::filesystem::path& p) {
  return set("output." + std::to_string(n_outputs_++), p.string());
}

RunManifest& RunManifest::add_input(const std::filesystem::path& p) {
  return set("input." + std::to_string(n_inputs_++), p.string());
}

std::string RunManifest::format() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write manifest " + path.string());
  f << format();
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace qsound::cli
