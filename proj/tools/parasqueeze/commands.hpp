#pragma once

#include <filesystem>
#include <string>

namespace parasqueeze::cli {

struct CommandArgs {
  std::string config_path;  // empty selects the built-in defaults
  std::filesystem::path out_dir;
  int threads = 1;
};

// Each command writes its data files (and best-effort plots) into out_dir
// and returns the process exit code. Config problems surface as
// ConfigError, numerical failures as parasqueeze::Error; main maps both.
int cmd_threshold(const CommandArgs& args);
int cmd_multipliers(const CommandArgs& args);
int cmd_transient(const CommandArgs& args);
int cmd_gain(const CommandArgs& args);
int cmd_nsd(const CommandArgs& args);
int cmd_squeeze(const CommandArgs& args);
int cmd_validate(const CommandArgs& args);

}  // namespace parasqueeze::cli
