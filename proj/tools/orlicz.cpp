// orlicz check|constants|conjugate|solve|refine <config> [--out DIR] [--seed N] [--tol X]

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "orlicz/config.hpp"
#include "orlicz/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Musielak-Orlicz toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  for (const auto& name : orlicz::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides options.seed");
    sub->add_option("--tol", tol, "overrides options.tol");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0, anything else is a usage error
    return app.exit(e) == 0 ? orlicz::kExitOk : orlicz::kExitError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << '\n';
    return orlicz::kExitError;
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    orlicz::RunConfig cfg = orlicz::parse_config(text.str(), command);
    if (seed) cfg.options.seed = *seed;
    if (tol) cfg.options.tol = *tol;
    return orlicz::run(cfg, out_dir, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return orlicz::kExitError;
  }
}
