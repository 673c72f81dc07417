#include "nsgvd/app.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* cmd, nsgvd::CommandOptions& opt) {
  cmd->add_option("--config", opt.config, "INI configuration file");
  cmd->add_option("--set", opt.overrides, "override as section.key=value (repeatable)");
  cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--seed", opt.seed, "global seed");
  cmd->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NSG video detector"};
  app.require_subcommand(1);
  nsgvd::CommandOptions opt;
  nsgvd::CommandStreams io{std::cout, std::cerr};
  std::function<int()> run;

  auto* synth = app.add_subcommand("synth", "synthetic Gaussian videos")->require_subcommand(1);
  auto* gen = synth->add_subcommand("gen", "generate videos, oracle scores and a manifest");
  add_common(gen, opt);
  gen->callback([&] { run = [&] { return nsgvd::cmd_synth_gen(opt, io); }; });

  auto* nsg = app.add_subcommand("nsg", "normalized spatiotemporal gradients")->require_subcommand(1);
  auto* extract = nsg->add_subcommand("extract", "compute NSG features for a manifest");
  add_common(extract, opt);
  extract->callback([&] { run = [&] { return nsgvd::cmd_nsg_extract(opt, io); }; });

  auto* kernel = app.add_subcommand("kernel", "deep kernel")->require_subcommand(1);
  auto* train = kernel->add_subcommand("train", "train the kernel on real and fake features");
  add_common(train, opt);
  train->callback([&] { run = [&] { return nsgvd::cmd_kernel_train(opt, io); }; });

  auto* detect = app.add_subcommand("detect", "score test videos against a reference set");
  add_common(detect, opt);
  detect->callback([&] { run = [&] { return nsgvd::cmd_detect(opt, io); }; });

  auto* theory = app.add_subcommand("theory", "Monte Carlo checks of the bounds")->require_subcommand(1);
  auto* verify = theory->add_subcommand("verify", "run the theory checks");
  add_common(verify, opt);
  verify->callback([&] { run = [&] { return nsgvd::cmd_theory_verify(opt, io); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nsgvd::kExitValidation;
  }
  return nsgvd::run_guarded(run, std::cerr);
}
