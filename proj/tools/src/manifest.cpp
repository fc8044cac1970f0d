#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

#include "json.hpp"

#include "subkb/errors.hpp"

namespace subkb::cli {

namespace {

constexpr const char* kModule = "cli";
using Json = nlohmann::ordered_json;

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(kModule, "cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError(kModule, "sha256 unavailable");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError(kModule, "failed reading '" + path.string() + "'");
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  Json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["cwd"] = m.cwd;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  Json inputs = Json::array();
  for (const auto& in : m.inputs) {
    inputs.push_back({{"option", in.option}, {"path", in.path}, {"sha256", in.sha256}});
  }
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  j["threads"] = m.threads;
  j["timestamp"] = m.timestamp;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(kModule, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(kModule, "failed writing '" + path.string() + "'");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(kModule, "cannot open '" + path.string() + "' for reading");
  RunManifest m;
  try {
    const Json j = Json::parse(in);
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.cwd = j.at("cwd").get<std::string>();
    m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("inputs")) {
      m.inputs.push_back({e.at("option").get<std::string>(), e.at("path").get<std::string>(),
                          e.at("sha256").get<std::string>()});
    }
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.threads = j.at("threads").get<int>();
    m.timestamp = j.at("timestamp").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(kModule, "bad manifest '" + path.string() + "': " + e.what());
  }
  if (m.argv.empty() || m.argv.front() != m.command) {
    throw FormatError(kModule, "bad manifest '" + path.string() + "': argv does not start with the command");
  }
  return m;
}

}  // namespace subkb::cli
