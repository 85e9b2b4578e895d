#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/session.hpp"

namespace kgr::cli {

// Malformed command lines; batch mode exits with 2 on these.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CommandType { Load, LoadBundled, AssertInstance, NewClass, Infer, Ask, Explain, Dump, Rules, Help, Quit };

struct Command {
    CommandType type;
    std::vector<std::string> args;
    bool all = false;  // explain --all
};

// One command per line:
//   load <path> [--namespace <ns>]     load-bundled <proton|bfo>
//   assert <instance> <class>          new-class <name> [--namespace <ns>]
//   infer    ask <query>    explain [--all] <fact>    dump
//   rules <path>    help    quit
Command parse_command(std::string_view line);

// Executes one command against the session, writing results to `out`.
// Returns false for quit.
bool execute(Session& session, const Command& command, std::ostream& out);

// Script lines with blank lines and '#' comments removed.
std::vector<std::string> read_script(std::istream& in);

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

// Runs commands in order and stops at the first error, which is reported
// on `err` together with the offending command.
int run_batch(Session& session, std::span<const std::string> commands, std::ostream& out,
              std::ostream& err);

// Interactive loop; errors are reported and the loop continues. `quit` or
// end of input ends it with exit code 0.
int run_repl(Session& session, std::istream& in, std::ostream& out, std::ostream& err,
             bool show_prompt = true);

}  // namespace kgr::cli
