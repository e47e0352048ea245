#pragma once

// Command verbs behind the singext tool. Each returns the process exit code;
// reports go to `out`, diagnostics to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace singext {

struct CommandOptions {
  std::string config;
  std::optional<char> model;  // overrides the config's "model"
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty: stdout
  bool compressed = false;
  std::string z;      // resolvent point "re,im"
  std::string input;  // resolvent input vector file
};

int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_weyl(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_resolvent(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_pick(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err);

// Dispatch by verb name, mapping thrown errors to exit codes.
int run_command(const std::string& verb, const CommandOptions& opt, std::ostream& out,
                std::ostream& err);

}  // namespace singext
