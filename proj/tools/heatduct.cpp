// Command line entry point: heatduct <subcommand> --config <path> [--out <dir>] [--seed <n>]
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "heatduct/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady buoyant channel flow with viscous heating"};
  app.require_subcommand(1);

  heatduct::RunOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;

  for (const char* name : {"solve", "certify", "spectrum", "mms"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "random seed (overrides [output] seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : heatduct::kExitConfig;
  }

  auto* sub = app.get_subcommands().front();
  opts.subcommand = sub->get_name();
  if (sub->count("--out")) opts.out_dir = out_dir;
  if (sub->count("--seed")) opts.seed = seed;
  return heatduct::run(opts, std::cout, std::cerr);
}
