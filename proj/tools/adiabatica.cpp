// adiabatica <experiment> --config <file> [--out <dir>] [--threads N] [--override key=value]...

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adiabatica/config.hpp"
#include "adiabatica/experiments.hpp"
#include "adiabatica/kernels.hpp"

namespace {

constexpr const char* kOutEnv = "ADIABATICA_OUT";

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  std::vector<std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic-following simulator for a two-level atom crossing a cavity mode"};
  app.set_version_flag("--version", std::string(ADIABATICA_VERSION));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const std::string& tag : adiabatica::experiment_tags()) {
    CLI::App* sub = app.add_subcommand(tag, "Run the " + tag + " experiment");
    sub->add_option("--config,-c", opt.config, "JSON scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out,-o", opt.out,
                    std::string("Output directory (default: $") + kOutEnv + " or the current directory)");
    sub->add_option("--threads,-j", opt.threads, "Cap on worker threads (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--override,-s", opt.overrides, "Override a config key, e.g. model.detuning=0.5")
        ->take_all();
    sub->callback([&chosen, tag] { chosen = tag; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (opt.out.empty()) {
    const char* env = std::getenv(kOutEnv);
    opt.out = env != nullptr && *env != '\0' ? env : ".";
  }

  try {
    adiabatica::set_thread_limit(opt.threads);
    const auto config = adiabatica::load_config(opt.config, opt.overrides, adiabatica::parse_experiment(chosen));
    const auto files = adiabatica::run_experiment(config);
    adiabatica::write_outputs(files, opt.out);
    for (const auto& f : files) std::cerr << "wrote " << (std::filesystem::path(opt.out) / f.name).string() << '\n';
  } catch (const adiabatica::ConfigError& e) {
    std::cerr << "adiabatica: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "adiabatica: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
