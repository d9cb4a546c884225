#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace ccnls::cli {

inline constexpr const char* kVersion = "1.0.0";

struct RunManifest {
  std::string subcommand;
  nlohmann::json params;  // fully resolved, defaults included
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string hash;       // sha256 of the canonical dump of the four fields above

  nlohmann::json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
RunManifest make_manifest(const std::string& subcommand, const nlohmann::json& params);

// What a subcommand hands back.  Files are written verbatim next to manifest.json and
// summary.json; `line` is the one-line console summary.
struct Report {
  nlohmann::json summary = nlohmann::json::object();
  std::map<std::string, std::string> files;
  std::string line;
  bool band_ok = true;
  std::string band_note;
};

// Writes <root>/<hash prefix>/{manifest.json, summary.json, files...} and returns the
// directory.  Rewriting the same report gives the same bytes.
std::filesystem::path emit_report(const Report& report, const RunManifest& m, const std::filesystem::path& root);
std::filesystem::path run_directory(const RunManifest& m, const std::filesystem::path& root);

// Deep-merges `user` into `defaults`; keys absent from the defaults are rejected.
nlohmann::json resolve_params(const nlohmann::json& defaults, const nlohmann::json& user);
// "a.b.c=value": value parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

struct Context {
  bool dry_run = false;
  bool check = false;  // --assert
  std::filesystem::path dir;  // run directory (created before run unless dry)
};

struct Command {
  std::string name;
  std::string help;
  nlohmann::json defaults;
  std::function<Report(const nlohmann::json&, const Context&)> run;
};

const std::vector<Command>& commands();

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccnls::cli
