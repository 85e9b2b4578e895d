#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "kgr/cli.hpp"
#include "kgr/parser.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kgr: forward-chaining reasoner over upper-ontology knowledge graphs"};
    app.require_subcommand(0, 1);

    std::string rules_path;
    kgr::SessionConfig config;
    app.add_option("--rules", rules_path, "Rule file replacing the default rule set");
    app.add_flag("--auto-infer", config.auto_infer, "Infer automatically when a query finds the closure stale");
    app.add_flag("--fallback-new-class", config.fallback_to_new_class,
                 "Register unresolvable instances as new classes");
    app.add_option("--max-derived", config.max_derived, "Abort inference beyond this many derived facts");

    std::string script = "-";
    auto* run = app.add_subcommand("run", "Run a script of commands, one per line ('-' for stdin)");
    run->add_option("script", script, "Script file")->required();

    std::vector<std::string> commands;
    auto* exec = app.add_subcommand("exec", "Run each argument as one command");
    exec->add_option("commands", commands, "Commands")->required();

    auto* repl = app.add_subcommand("repl", "Interactive session (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kgr::cli::kUsage;
    }

    kgr::Session session(config);
    if (!rules_path.empty()) {
        try {
            std::ifstream in(rules_path);
            if (!in) throw kgr::Error(kgr::ErrorKind::Io, "cannot open '" + rules_path + "'");
            std::ostringstream text;
            text << in.rdbuf();
            session.set_rules(kgr::parse_rules(text.str()));
        } catch (const kgr::Error& e) {
            std::cerr << "error: " << kgr::to_string(e.kind()) << ": " << e.what() << '\n';
            return kgr::cli::kFailure;
        }
    }

    if (*run) {
        std::vector<std::string> lines;
        if (script == "-") {
            lines = kgr::cli::read_script(std::cin);
        } else {
            std::ifstream in(script);
            if (!in) {
                std::cerr << "error: cannot open script '" << script << "'\n";
                return kgr::cli::kUsage;
            }
            lines = kgr::cli::read_script(in);
        }
        return kgr::cli::run_batch(session, lines, std::cout, std::cerr);
    }
    if (*exec) return kgr::cli::run_batch(session, commands, std::cout, std::cerr);
    (void)repl;
    return kgr::cli::run_repl(session, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
}
