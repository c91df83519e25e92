#include <CLI11.hpp>

#include "gevrey_flow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator and verification suite for the random-diffusion active scalar equation"};
  app.require_subcommand(1, 1);
  gevrey_flow::CliOptions opt;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"params", "derived parameters and admissibility report"},
      {"omega-mc", "Monte Carlo estimate of the barrier-event probability"},
      {"simulate", "integrate one path; write norm series and field dumps"},
      {"verify-decay", "simulate several barrier-event paths and test the decay rate"},
      {"property-suite", "embedding, bilinear-bound, oracle and rescaling checks"},
      {"picard-compare", "fixed-point oracle against the exponential integrator"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "configuration file")->required();
    sub->add_option("--seed", seed, "overrides the configured seed");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->callback([&opt, &seed, sub, name = name] {
      opt.subcommand = name;
      if (sub->count("--seed") > 0) opt.seed = seed;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gevrey_flow::exit_config_error;
  }
  return gevrey_flow::run_cli(opt);
}
