#include <exception>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

}  // namespace

int main(int argc, char** argv) {
  using evtlearn::cli::Invocation;
  CLI::App app{"Learning on multivariate extremes"};
  app.require_subcommand(1);

  Invocation inv;
  std::string config_path;
  std::string out_path;
  for (const auto& cmd : evtlearn::cli::commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.description);
    sub->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", inv.overrides, "override a configuration key (key=value)");
    sub->add_option("--seed", inv.seed, "random seed");
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--threads", inv.threads, "worker threads")->check(CLI::Range(1, 1024));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (!config_path.empty()) inv.config_path = config_path;
  if (!out_path.empty()) inv.out = out_path;
  try {
    for (const auto& cmd : evtlearn::cli::commands()) {
      if (app.got_subcommand(cmd.name)) {
        inv.command = cmd.name;
        evtlearn::cli::execute(cmd, inv);
      }
    }
  } catch (const evtlearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
