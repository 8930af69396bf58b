#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "wqc/cli/commands.hpp"
#include "wqc/cli/config.hpp"
#include "wqc/cli/io.hpp"
#include "wqc/error.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericError = 3 };

int report(const std::string& kind, int code, const std::string& message,
           const std::vector<std::string>& details, const std::filesystem::path& out) {
  nlohmann::json err{{"error", kind},
                     {"exit_code", code},
                     {"message", message},
                     {"details", details},
                     {"version", wqc::cli::version_string()}};
  std::cerr << err.dump() << "\n";
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (!ec) std::ofstream(out / "error.json") << err.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak quantum chaos toolkit: classical spectra, quantum band structure and absorption"};
  app.set_version_flag("--version", wqc::cli::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned jobs = 0;
  std::uint64_t seed = 0;
  auto* o_config = app.add_option("--config", config_path, "YAML or JSON run configuration")
                       ->envname("WQC_CONFIG");
  auto* o_out = app.add_option("--out", out_dir, "output directory")->envname("WQC_OUT");
  auto* o_jobs = app.add_option("--jobs", jobs, "concurrent sweep points")
                     ->envname("WQC_JOBS")->check(CLI::PositiveNumber);
  auto* o_seed = app.add_option("--seed", seed, "master random seed")->envname("WQC_SEED");
  for (auto name : wqc::cli::subcommand_names())
    app.add_subcommand(std::string(name), std::string(wqc::cli::subcommand_summary(name)))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kConfigError;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  std::filesystem::path out = *o_out ? out_dir : "wqc-out";
  try {
    auto cfg = *o_config ? wqc::cli::parse_config(config_path) : wqc::cli::parse_config_text("");
    if (*o_out) cfg.out_dir = out_dir;
    if (*o_jobs) cfg.jobs = jobs;
    if (*o_seed) cfg.seed = seed;
    out = cfg.out_dir;
    if (auto v = wqc::cli::validate(cfg); !v.empty()) throw wqc::cli::ConfigError(v);
    wqc::cli::run_subcommand(sub, cfg, out);
  } catch (const wqc::cli::ConfigError& e) {
    return report("config", kConfigError, e.what(), e.violations(), out);
  } catch (const wqc::DomainError& e) {
    return report("domain", kConfigError, e.what(), {}, out);
  } catch (const wqc::NumericError& e) {
    return report("numeric", kNumericError, e.what(), {}, out);
  } catch (const std::exception& e) {
    return report("runtime", kNumericError, e.what(), {}, out);
  }
  return kOk;
}
