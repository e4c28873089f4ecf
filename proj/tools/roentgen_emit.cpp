#include "roentgen/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  using namespace roentgen::cli;

  CLI::App app{"Spontaneous emission spectra of a moving two-level atom"};
  app.require_subcommand(1);

  std::filesystem::path config;
  Overrides overrides;
  std::string out_dir;
  std::size_t threads = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;

  for (const auto &name : subcommands()) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", config, "Scenario file (YAML, or JSON by extension)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Relative tolerance of frequency integrals")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for randomized checks");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  auto *sub = app.get_subcommands().front();
  if (sub->count("--out"))
    overrides.out = out_dir;
  if (sub->count("--threads"))
    overrides.threads = threads;
  if (sub->count("--tol"))
    overrides.tolerance = tol;
  if (sub->count("--seed"))
    overrides.seed = seed;

  return static_cast<int>(run_file(sub->get_name(), config, overrides, std::cerr));
}
