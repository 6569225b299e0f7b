#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evtlearn/config.hpp"

namespace evtlearn::cli {

struct Invocation {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;  // key=value
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<std::filesystem::path> out;
};

struct Command {
  std::string name;
  std::string description;
  Schema schema;
  void (*run)(const Config& config, const Invocation& inv);
};

const std::vector<Command>& commands();

/// Loads the config file, applies overrides and runs the command.
void execute(const Command& command, const Invocation& inv);

}  // namespace evtlearn::cli
