#include "kgr/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace kgr::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Whitespace-separated words; double quotes group words.
std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    bool quoted = false;
    bool have = false;
    for (char c : text) {
        if (c == '"') {
            quoted = !quoted;
            have = true;
        } else if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
            if (have) out.push_back(std::move(current));
            current.clear();
            have = false;
        } else {
            current.push_back(c);
            have = true;
        }
    }
    if (quoted) throw UsageError("unterminated quote");
    if (have) out.push_back(std::move(current));
    return out;
}

std::string strip_quotes(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 1 - 1);
    return std::string(s);
}

std::string join(std::span<const std::string> words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

// Pulls `--namespace <ns>` out of the token list.
std::string take_namespace(std::vector<std::string>& words, std::string fallback) {
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] == "--namespace") {
            if (i + 1 >= words.size()) throw UsageError("--namespace needs a value");
            fallback = words[i + 1];
            words.erase(words.begin() + static_cast<std::ptrdiff_t>(i),
                        words.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
    }
    return fallback;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void print_help(std::ostream& out) {
    out << "commands:\n"
           "  load <path> [--namespace <ns>]   load a fact file\n"
           "  load-bundled <proton|bfo>        load a bundled ontology\n"
           "  assert <instance> <class>        place user:<instance> under every matching class\n"
           "  new-class <name> [--namespace <ns>]\n"
           "  infer                            compute the closure\n"
           "  ask <query>                      e.g. ask isinstanceOf(user:paris, proton:Entity)\n"
           "  explain [--all] <fact>           derivation tree of a fact\n"
           "  dump                             full log of nodes, facts and derivations\n"
           "  rules <path>                     replace the rule set\n"
           "  quit\n";
}

}  // namespace

Command parse_command(std::string_view line) {
    line = trim(line);
    auto space = line.find_first_of(" \t");
    std::string name(line.substr(0, space));
    std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
    if (name.empty()) throw UsageError("empty command");

    auto no_args = [&](CommandType type) {
        if (!rest.empty()) throw UsageError("'" + name + "' takes no arguments");
        return Command{type, {}};
    };

    if (name == "infer") return no_args(CommandType::Infer);
    if (name == "dump") return no_args(CommandType::Dump);
    if (name == "quit" || name == "exit") return no_args(CommandType::Quit);
    if (name == "help") return no_args(CommandType::Help);

    if (name == "ask") {
        if (rest.empty()) throw UsageError("usage: ask <query>");
        return Command{CommandType::Ask, {strip_quotes(rest)}};
    }
    if (name == "explain") {
        Command cmd{CommandType::Explain, {}};
        if (rest.starts_with("--all")) {
            cmd.all = true;
            rest = trim(rest.substr(5));
        }
        if (rest.empty()) throw UsageError("usage: explain [--all] <fact>");
        cmd.args.push_back(strip_quotes(rest));
        return cmd;
    }

    auto words = tokenize(rest);
    if (name == "load") {
        auto ns = take_namespace(words, std::string(Session::kInstanceNamespace));
        if (words.size() != 1) throw UsageError("usage: load <path> [--namespace <ns>]");
        return Command{CommandType::Load, {words[0], ns}};
    }
    if (name == "load-bundled") {
        if (words.size() != 1) throw UsageError("usage: load-bundled <proton|bfo>");
        return Command{CommandType::LoadBundled, {words[0]}};
    }
    if (name == "assert") {
        if (words.size() < 2) throw UsageError("usage: assert <instance> <class>");
        // Unquoted multi-word class names ("material entity") are joined back.
        return Command{CommandType::AssertInstance,
                       {words[0], join(std::span(words).subspan(1))}};
    }
    if (name == "new-class") {
        auto ns = take_namespace(words, std::string(Session::kInstanceNamespace));
        if (words.size() != 1) throw UsageError("usage: new-class <name> [--namespace <ns>]");
        return Command{CommandType::NewClass, {words[0], ns}};
    }
    if (name == "rules") {
        if (words.size() != 1) throw UsageError("usage: rules <path>");
        return Command{CommandType::Rules, {words[0]}};
    }
    throw UsageError("unknown command '" + name + "'");
}

bool execute(Session& session, const Command& command, std::ostream& out) {
    const auto& args = command.args;
    switch (command.type) {
        case CommandType::Load: {
            auto report = session.load_ontology_text(read_file(args[0]), args[1]);
            out << "loaded " << report.ns << ": " << report.facts << " facts, " << report.classes
                << " classes, " << report.properties << " properties, " << report.instances
                << " instances";
            if (report.relations) out << ", " << report.relations << " relations";
            out << '\n';
            return true;
        }
        case CommandType::LoadBundled: {
            const auto* bundle = find_bundled(args[0]);
            if (!bundle) throw UsageError("no bundled ontology named '" + args[0] + "'");
            auto report = session.load_bundled(*bundle);
            out << "loaded " << report.ns << ": " << report.facts << " facts, " << report.classes
                << " classes, " << report.properties << " properties, " << report.instances
                << " instances";
            if (report.relations) out << ", " << report.relations << " relations";
            out << '\n';
            return true;
        }
        case CommandType::AssertInstance: {
            auto facts = session.assert_instance(args[0], args[1]);
            if (facts.empty()) out << "registered class " << Session::kInstanceNamespace << ':' << args[0] << '\n';
            for (const auto& f : facts) out << "asserted " << to_string(f) << '\n';
            return true;
        }
        case CommandType::NewClass:
            out << "registered class " << session.assert_new_class(args[0], args[1]).str() << '\n';
            return true;
        case CommandType::Infer: {
            auto report = session.infer();
            out << report.derived << " facts derived\n";
            return true;
        }
        case CommandType::Ask: {
            auto answer = session.ask(std::string_view(args[0]));
            if (answer.ground || answer.bindings.empty()) {
                out << (answer.truth ? "true" : "false") << '\n';
                return true;
            }
            for (const auto& subst : answer.bindings) {
                bool first = true;
                for (const auto& [var, value] : subst) {
                    out << (first ? "" : ", ") << var << " = " << value.str();
                    first = false;
                }
                out << '\n';
            }
            return true;
        }
        case CommandType::Explain: {
            auto atom = parse_query(args[0], session.predicates(), Session::kInstanceNamespace);
            if (!atom.is_ground()) throw UsageError("explain needs a ground fact");
            if (command.all) {
                for (const auto& tree : session.explain_all(atom.to_fact())) out << render(tree);
            } else {
                out << render(session.explain(atom.to_fact()));
            }
            return true;
        }
        case CommandType::Dump:
            out << session.dump_log();
            return true;
        case CommandType::Rules: {
            auto rules = parse_rules(read_file(args[0]), session.predicates());
            out << "loaded " << rules.size() << " rules\n";
            session.set_rules(std::move(rules));
            return true;
        }
        case CommandType::Help:
            print_help(out);
            return true;
        case CommandType::Quit:
            return false;
    }
    return true;
}

std::vector<std::string> read_script(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        lines.emplace_back(t);
    }
    return lines;
}

int run_batch(Session& session, std::span<const std::string> commands, std::ostream& out,
              std::ostream& err) {
    for (const auto& line : commands) {
        try {
            if (!execute(session, parse_command(line), out)) return kOk;
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << "\n  in command: " << line << '\n';
            return kUsage;
        } catch (const Error& e) {
            err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n  in command: " << line << '\n';
            return kFailure;
        }
    }
    return kOk;
}

int run_repl(Session& session, std::istream& in, std::ostream& out, std::ostream& err, bool show_prompt) {
    std::string line;
    for (;;) {
        if (show_prompt) out << "kgr> " << std::flush;
        if (!std::getline(in, line)) break;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            if (!execute(session, parse_command(t), out)) break;
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << '\n';
        } catch (const Error& e) {
            err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        }
    }
    return kOk;
}

}  // namespace kgr::cli
