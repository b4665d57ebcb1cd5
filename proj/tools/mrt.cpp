// mrt: scenario runner.
//
//   mrt <scenario> --config run.ini [--out result.csv] [--seed N]
//   mrt validate [--out report.csv] [--seed N]
//
// Exit status: 0 ok, 1 a reported check failed, 2 bad configuration,
// 3 physics precondition violated. MRT_LOG_LEVEL=error|warn|info|debug.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mrt/mrt.hpp"

namespace {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

Level log_level() {
  const char* env = std::getenv("MRT_LOG_LEVEL");
  if (env == nullptr) return Level::warn;
  const std::string v = env;
  if (v == "error") return Level::error;
  if (v == "info") return Level::info;
  if (v == "debug") return Level::debug;
  return Level::warn;
}

void log(Level at, const std::string& msg) {
  static const Level current = log_level();
  static const char* names[] = {"error", "warning", "info", "debug"};
  if (at <= current) std::cerr << "mrt: " << names[static_cast<int>(at)] << ": " << msg << '\n';
}

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

// Called only after a run completes, so a failed run never leaves a partial file.
int emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    log(Level::error, "cannot write '" + path + "'");
    return 2;
  }
  f << text;
  log(Level::info, "wrote " + path);
  return 0;
}

int run_scenario(const std::string& name, const Options& opt) {
  auto tree = mrt::config::read_tree(std::filesystem::path(opt.config));
  const auto given = tree.get_optional<std::string>("scenario");
  if (!given)
    tree.put("scenario", name);
  else if (*given != name)
    throw mrt::config_error(opt.config + ": scenario '" + *given + "' does not match subcommand '" + name + "'");

  auto cfg = mrt::config::from_tree(tree, std::filesystem::path(opt.config).parent_path());
  if (opt.seed) mrt::config::set_seed(cfg, *opt.seed);
  if (!opt.out.empty()) mrt::config::set_output(cfg, opt.out);
  log(Level::debug, "scenario " + name + ", seed " + std::to_string(cfg.seed));

  std::ostringstream buf;
  const auto outcome = mrt::scenario::run(cfg, buf);
  for (const auto& w : outcome.warnings) log(Level::warn, w);
  if (const int rc = emit(cfg.output, buf.str()); rc != 0) return rc;
  if (outcome.status != 0) log(Level::error, "one or more oracle checks failed");
  return outcome.status;
}

int run_validate(const Options& opt) {
  std::ostringstream buf;
  const auto outcome = mrt::scenario::validate(opt.seed.value_or(0), buf);
  if (const int rc = emit(opt.out, buf.str()); rc != 0) return rc;
  if (outcome.status != 0) log(Level::error, "acceptance suite failed");
  return outcome.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incoherent tunneling rates and populations of a noisy two-state system"};
  app.set_version_flag("--version", std::string("mrt ") + mrt::version);
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const char* name : {"envelope", "mrt-scan", "evolve", "peak", "multichannel", "oracle"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", opt.config, "run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output CSV (default: config 'output' key, else stdout)");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  val->add_option("--config", opt.config, "ignored; accepted for symmetry");
  val->add_option("--out", opt.out, "report CSV (default stdout)");
  val->add_option("--seed", opt.seed, "random seed");
  val->callback([&chosen] { chosen = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return chosen == "validate" ? run_validate(opt) : run_scenario(chosen, opt);
  } catch (const mrt::config_error& e) {
    log(Level::error, std::string("configuration: ") + e.what());
    return 2;
  } catch (const mrt::physics_error& e) {
    log(Level::error, std::string("precondition violated: ") + e.what());
    return 3;
  } catch (const std::exception& e) {
    log(Level::error, e.what());
    return 1;
  }
}
