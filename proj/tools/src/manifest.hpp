#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace subkb::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string option;  // e.g. "--vectors"
  std::string path;    // as given on the command line
  std::string sha256;
};

/// Record of one CLI run, written as `<output>.manifest.json`.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // subcommand and its arguments
  std::string cwd;
  std::map<std::string, std::string> parameters;
  std::optional<std::uint64_t> seed;
  std::vector<InputDigest> inputs;
  std::vector<std::string> outputs;
  int threads = 1;
  std::string timestamp;  // UTC, ISO 8601
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);
std::string utc_timestamp();

void save_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace subkb::cli
