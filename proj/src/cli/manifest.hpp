#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qsound::cli {

/// Human-readable key=value record of one artifact-producing run.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  RunManifest& set(std::string key, std::string value);
  RunManifest& set(std::string key, double value);
  RunManifest& add_output(const std::filesystem::path& p);
  RunManifest& add_input(const std::filesystem::path& p);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string format() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::size_t n_inputs_ = 0;
  std::size_t n_outputs_ = 0;
};

std::string tool_version();
std::string utc_timestamp();

}  // namespace qsound::cli
