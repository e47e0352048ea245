// singext: check | weyl | resolvent | pick | verify over a JSON model config.

#include <cctype>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "singext/commands.hpp"
#include "singext/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary triples and Weyl functions for finite-rank singular perturbations"};
  app.require_subcommand(1, 1);

  singext::CommandOptions opt;
  std::string model;
  std::string grid;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "model configuration (JSON)")->required();
    sub->add_option("--model", model, "a | b (overrides the config)")
        ->check(CLI::IsMember({"a", "b", "A", "B"}));
    sub->add_option("--grid", grid, "\"re,im;re,im;...\" or \"ladder:start,ratio,count[,shift]\"");
    sub->add_option("--seed", seed, "seed for randomized suites");
    sub->add_option("--out", opt.out, "output file (default stdout)");
  };

  CLI::App* check = app.add_subcommand("check", "admissibility flags of the Gram matrix");
  CLI::App* weyl = app.add_subcommand("weyl", "Weyl function samples as CSV");
  CLI::App* resolvent = app.add_subcommand("resolvent", "Krein-Naimark resolvent of one vector");
  CLI::App* pick = app.add_subcommand("pick", "negative squares of Pick matrices");
  CLI::App* verify = app.add_subcommand("verify", "run every invariant suite");
  for (CLI::App* sub : {check, weyl, resolvent, pick, verify}) add_common(sub);
  resolvent->add_option("--z", opt.z, "spectral parameter \"re,im\"")->required();
  resolvent->add_option("--input", opt.input, "input vector JSON {\"regular\": [...], \"singular\": [...]}")->required();
  resolvent->add_flag("--compressed", opt.compressed, "return the compressed resolvent on h_m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : singext::exit_code::kConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (!model.empty()) opt.model = static_cast<char>(std::tolower(model[0]));
  if (chosen->count("--grid") > 0) opt.grid = grid;
  if (chosen->count("--seed") > 0) opt.seed = seed;
  return singext::run_command(chosen->get_name(), opt, std::cout, std::cerr);
}
