#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ccnls/cli.hpp"
#include "ccnls/grid.hpp"

namespace ccnls::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &n, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::string hex;
  for (unsigned int i = 0; i < n; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

json RunManifest::to_json() const {
  return {{"subcommand", subcommand}, {"params", params}, {"seed", seed}, {"version", version}, {"hash", hash}};
}

RunManifest make_manifest(const std::string& subcommand, const json& params) {
  RunManifest m;
  m.subcommand = subcommand;
  m.params = params;
  if (params.contains("seed")) m.seed = params.at("seed").get<std::uint64_t>();
  // nlohmann objects iterate in key order, so dump() is canonical
  json body{{"subcommand", m.subcommand}, {"params", m.params}, {"seed", m.seed}, {"version", m.version}};
  m.hash = sha256_hex(body.dump());
  return m;
}

std::filesystem::path run_directory(const RunManifest& m, const std::filesystem::path& root) {
  return root / fmt::format("{}-{}", m.subcommand, m.hash.substr(0, 16));
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(fmt::format("cannot open '{}' for writing", p.string()));
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error(fmt::format("write to '{}' failed", p.string()));
}

}  // namespace

std::filesystem::path emit_report(const Report& report, const RunManifest& m, const std::filesystem::path& root) {
  const auto dir = run_directory(m, root);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
  write_file(dir / "summary.json", report.summary.dump(2) + "\n");
  for (const auto& [name, bytes] : report.files) write_file(dir / name, bytes);
  return dir;
}

json resolve_params(const json& defaults, const json& user) {
  if (!user.is_object()) throw ParameterError("config: top level must be a JSON object");
  json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!defaults.contains(it.key())) throw ParameterError(fmt::format("config: unknown key '{}'", it.key()));
    const json& d = defaults.at(it.key());
    if (d.is_object() && it->is_object())
      out[it.key()] = resolve_params(d, *it);
    else if (d.is_object())
      throw ParameterError(fmt::format("config: '{}' must be an object", it.key()));
    else
      out[it.key()] = *it;
  }
  return out;
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ParameterError(fmt::format("--set expects key=value, got '{}'", assignment));
  const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ParameterError(fmt::format("--set: malformed key '{}'", key));
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace ccnls::cli
