#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ccnls/cli.hpp"
#include "ccnls/parallel.hpp"
#include "ccnls/solver.hpp"

namespace ccnls::cli {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0, kExitParam = 2, kExitUnstable = 3, kExitBand = 4;

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError(fmt::format("cannot read config '{}'", path));
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParameterError(fmt::format("config '{}': {}", path, e.what()));
  }
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ccnls: truncated Colin-Colin system simulator and estimate laboratory", "ccnls"};
  app.require_subcommand(1);
  std::string config, out_dir = "out";
  std::vector<std::string> sets;
  bool check = false, dry_run = false;
  int jobs = 1;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--set", sets, "override key=value (dotted keys, JSON values)");
    sub->add_option("--out", out_dir, "output root directory")->capture_default_str();
    sub->add_flag("--assert", check, "exit 4 when the result leaves its acceptance band");
    sub->add_flag("--dry-run", dry_run, "validate parameters only");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto& c : commands()) known = known || c.name == argv[1];
    if (!known) {
      err << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
      return kExitParam;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitParam;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands())
    if (app.got_subcommand(c.name)) cmd = &c;

  try {
    json user = config.empty() ? json::object() : read_config(config);
    for (const auto& s : sets) apply_override(user, s);
    if (const char* env = std::getenv("CCNLS_SEED")) {
      try {
        user["seed"] = std::stoull(env);
      } catch (const std::exception&) {
        throw ParameterError(fmt::format("CCNLS_SEED='{}' is not an unsigned integer", env));
      }
    }
    const json params = resolve_params(cmd->defaults, user);
    const RunManifest m = make_manifest(cmd->name, params);
    set_worker_count(jobs);

    Context ctx;
    ctx.dry_run = dry_run;
    ctx.check = check;
    ctx.dir = run_directory(m, out_dir);
    if (!dry_run) std::filesystem::create_directories(ctx.dir);
    Report r = cmd->run(params, ctx);
    if (!dry_run) {
      r.summary["acceptance_band"] = {{"ok", r.band_ok}, {"band", r.band_note}};
      emit_report(r, m, out_dir);
      out << r.line << "  [" << ctx.dir.string() << "]\n";
    } else {
      out << cmd->name << ": " << r.line << "\n";
    }
    if (check && !dry_run && !r.band_ok) {
      err << "acceptance band violated: " << r.band_note << "\n";
      return kExitBand;
    }
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kExitParam;
  } catch (const json::exception& e) {
    err << "parameter error: " << e.what() << "\n";
    return kExitParam;
  } catch (const InstabilityError& e) {
    err << "numerical instability at step " << e.step << ": " << e.what() << "\n";
    return kExitUnstable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ccnls::cli
