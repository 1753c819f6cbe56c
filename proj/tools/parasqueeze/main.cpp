#include <cstdio>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "parasqueeze/errors.hpp"

namespace {

// Names the concrete library error for the exit-3 diagnostic.
const char* error_name(const parasqueeze::Error& e) {
  if (dynamic_cast<const parasqueeze::SingularThreshold*>(&e)) return "SingularThreshold";
  if (dynamic_cast<const parasqueeze::DetunedInput*>(&e)) return "DetunedInput";
  if (dynamic_cast<const parasqueeze::NoRealRoot*>(&e)) return "NoRealRoot";
  if (dynamic_cast<const parasqueeze::NoConvergence*>(&e)) return "NoConvergence";
  if (dynamic_cast<const parasqueeze::NotOnHopfLine*>(&e)) return "NotOnHopfLine";
  if (dynamic_cast<const parasqueeze::NoSignChange*>(&e)) return "NoSignChange";
  if (dynamic_cast<const parasqueeze::TooShort*>(&e)) return "TooShort";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  using parasqueeze::cli::CommandArgs;

  CLI::App app{"parasqueeze: parametric resonator with lock-in feedback"};
  app.require_subcommand(1);

  CommandArgs args;
  const char* env_out = std::getenv("PARASQUEEZE_OUT");
  args.out_dir = env_out != nullptr ? env_out : ".";

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const CommandArgs&);
    bool takes_config;
  };
  const Command commands[] = {
      {"threshold", "instability threshold over an omega grid, three methods",
       parasqueeze::cli::cmd_threshold, true},
      {"multipliers", "Floquet multiplier paths over a pump sweep",
       parasqueeze::cli::cmd_multipliers, true},
      {"transient", "deterministic trajectory and its stationary spectrum",
       parasqueeze::cli::cmd_transient, true},
      {"gain", "phase-dependent gain, analytic curves and time-domain measurement",
       parasqueeze::cli::cmd_gain, true},
      {"nsd", "noise spectral densities of x and the lock-in quadratures",
       parasqueeze::cli::cmd_nsd, true},
      {"squeeze", "stationary quadrature variances over a pump sweep",
       parasqueeze::cli::cmd_squeeze, true},
      {"validate", "run the cross-method validation battery", parasqueeze::cli::cmd_validate,
       false},
  };

  const Command* selected = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    if (cmd.takes_config)
      sub->add_option("--config", args.config_path,
                      "key = value config file (defaults used when omitted)");
    sub->add_option("--out", args.out_dir,
                    "output directory (default $PARASQUEEZE_OUT, else '.')");
    sub->add_option("--threads", args.threads, "worker threads for scans (default 1)");
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (selected == nullptr) throw parasqueeze::cli::ConfigError("no command selected");
    if (args.threads < 0) throw parasqueeze::cli::ConfigError("--threads must be >= 0");
    return selected->run(args);
  } catch (const parasqueeze::cli::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const parasqueeze::Error& e) {
    std::fprintf(stderr, "numerical failure (%s): %s\n", error_name(e), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
