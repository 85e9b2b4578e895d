#include "kgr/parser.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace kgr {

namespace {

std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view unquote(std::string_view s, std::size_t line) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    if (!s.empty() && (s.front() == '"' || s.back() == '"')) {
        throw ParseError("unbalanced quote in '" + std::string(s) + "'", line);
    }
    return s;
}

Symbol symbol_or_throw(std::string_view text, std::string_view default_namespace, std::size_t line) {
    text = trim(text);
    auto colon = text.find(':');
    std::string_view ns = default_namespace;
    std::string_view local = text;
    if (colon != std::string_view::npos) {
        ns = trim(text.substr(0, colon));
        local = trim(text.substr(colon + 1));
    }
    try {
        return Symbol::intern(ns, local);
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
}

Predicate predicate_or_throw(std::string_view name, const PredicateTable& predicates, std::size_t line) {
    if (auto p = predicates.lookup(name)) return *p;
    throw ParseError("unknown predicate '" + std::string(name) + "'", line, ErrorKind::UnknownPredicate);
}

bool looks_like_variable(std::string_view text) {
    if (text.empty() || !std::isupper(static_cast<unsigned char>(text.front()))) return false;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (!std::isalnum(u) && u != '_') return false;
    }
    return true;
}

Term parse_term(std::string_view text, std::string_view default_namespace) {
    text = trim(text);
    if (text.empty()) throw ParseError("empty term");
    if (text.front() == '"') {
        return symbol_or_throw(unquote(text, 0), default_namespace, 0);
    }
    if (auto colon = text.find(':'); colon != std::string_view::npos) {
        auto ns = trim(text.substr(0, colon));
        auto local = unquote(trim(text.substr(colon + 1)), 0);
        std::string joined(ns);
        joined.push_back(':');
        joined.append(local);
        return symbol_or_throw(joined, default_namespace, 0);
    }
    if (looks_like_variable(text)) return Variable{std::string(text)};
    return symbol_or_throw(text, default_namespace, 0);
}

// Cursor over DSL text; tracks quoting so names may hold '(' ',' or '.'.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }
    bool consume(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view token) {
        if (!consume(token)) {
            throw ParseError("expected '" + std::string(token) + "' at offset " + std::to_string(pos_) +
                             " in '" + std::string(text_) + "'");
        }
    }
    std::string_view identifier() {
        skip_space();
        auto start = pos_;
        while (pos_ < text_.size()) {
            auto c = static_cast<unsigned char>(text_[pos_]);
            if (!std::isalnum(c) && c != '_' && c != '-') break;
            ++pos_;
        }
        if (start == pos_) {
            throw ParseError("expected identifier at offset " + std::to_string(pos_) + " in '" +
                             std::string(text_) + "'");
        }
        return text_.substr(start, pos_ - start);
    }
    // Raw term text up to an unquoted ',' or ')'.
    std::string_view term_text() {
        auto start = pos_;
        bool quoted = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '"') quoted = !quoted;
            else if (!quoted && (c == ',' || c == ')' || c == '(')) break;
            ++pos_;
        }
        if (quoted) throw ParseError("unterminated quote in '" + std::string(text_) + "'");
        return text_.substr(start, pos_ - start);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Atom parse_atom(Scanner& in, const PredicateTable& predicates, std::string_view default_namespace) {
    auto name = in.identifier();
    auto predicate = predicate_or_throw(name, predicates, 0);
    in.expect("(");
    std::vector<Term> terms;
    for (;;) {
        terms.push_back(parse_term(in.term_text(), default_namespace));
        if (in.consume(")")) break;
        in.expect(",");
    }
    if (terms.size() != 2) {
        throw ParseError("predicate '" + std::string(name) + "' takes 2 arguments, got " +
                         std::to_string(terms.size()));
    }
    return Atom{predicate, std::move(terms[0]), std::move(terms[1])};
}

}  // namespace

Symbol parse_symbol(std::string_view text, std::string_view default_namespace) {
    return symbol_or_throw(text, default_namespace, 0);
}

Fact parse_fact_line(std::string_view line, std::string_view default_namespace,
                     const PredicateTable& predicates, std::size_t line_number) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
        throw ParseError("expected 3 tab-separated fields, got " + std::to_string(fields.size()),
                         line_number);
    }
    auto predicate = predicate_or_throw(trim(fields[0]), predicates, line_number);
    return Fact{predicate, symbol_or_throw(fields[1], default_namespace, line_number),
                symbol_or_throw(fields[2], default_namespace, line_number)};
}

FactFile parse_fact_file(std::string_view text, std::string_view default_namespace,
                         const PredicateTable& predicates) {
    FactFile out;
    PredicateTable known = predicates;
    std::size_t number = 0;
    if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
    if (text.empty()) return out;
    for (auto raw : split(text, '\n')) {
        ++number;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            ++out.skipped_lines;
            continue;
        }
        if (line.front() == '@') {
            auto fields = split(line, '\t');
            if (fields.size() != 2 || trim(fields[0]) != "@predicate") {
                throw ParseError("unknown directive '" + std::string(line) + "'", number);
            }
            try {
                auto p = known.declare(trim(fields[1]));
                out.declared_predicates.push_back(p);
            } catch (const Error& e) {
                throw ParseError(e.what(), number);
            }
            continue;
        }
        out.facts.push_back(FactLine{number, parse_fact_line(raw, default_namespace, known, number)});
    }
    return out;
}

std::string serialize_fact(const Fact& fact) {
    std::string out = fact.predicate.name();
    out.push_back('\t');
    out += fact.subject.str();
    out.push_back('\t');
    out += fact.object.str();
    return out;
}

std::string serialize_fact_file(const FactFile& file) {
    std::ostringstream out;
    for (auto p : file.declared_predicates) out << "@predicate\t" << p.name() << '\n';
    for (const auto& line : file.facts) out << serialize_fact(line.fact) << '\n';
    return out.str();
}

Rule parse_rule(std::string_view text, const PredicateTable& predicates,
                std::string_view default_namespace) {
    Scanner in(text);
    Rule rule;
    rule.id = std::string(in.identifier());
    in.expect(":");
    rule.head = parse_atom(in, predicates, default_namespace);
    in.expect(":-");
    do {
        rule.body.push_back(parse_atom(in, predicates, default_namespace));
    } while (in.consume(","));
    in.expect(".");
    if (!in.at_end()) throw ParseError("trailing text after rule '" + rule.id + "'");
    validate_rule(rule);
    return rule;
}

std::vector<Rule> parse_rules(std::string_view text, const PredicateTable& predicates,
                              std::string_view default_namespace) {
    std::vector<Rule> rules;
    std::string pending;
    std::size_t start_line = 0;
    std::size_t number = 0;
    for (auto raw : split(text, '\n')) {
        ++number;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == '%') continue;
        if (pending.empty()) start_line = number;
        if (!pending.empty()) pending.push_back(' ');
        pending.append(line);
        // A rule ends at a '.' outside quotes at the end of a line.
        bool quoted = false;
        for (char c : pending) {
            if (c == '"') quoted = !quoted;
        }
        if (!quoted && pending.back() == '.') {
            try {
                rules.push_back(parse_rule(pending, predicates, default_namespace));
            } catch (const ParseError& e) {
                throw ParseError(e.what(), start_line, e.kind());
            }
            pending.clear();
        }
    }
    if (!pending.empty()) throw ParseError("unterminated rule (missing '.')", start_line);
    return rules;
}

Atom parse_query(std::string_view text, const PredicateTable& predicates,
                 std::string_view default_namespace) {
    Scanner in(text);
    auto atom = parse_atom(in, predicates, default_namespace);
    in.consume(".");
    if (!in.at_end()) throw ParseError("trailing text after query '" + std::string(text) + "'");
    return atom;
}

}  // namespace kgr
