#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/model.hpp"

namespace kgr {

// Fact files are UTF-8, one `predicate<TAB>subject<TAB>object` per line.
// `#` starts a comment line, blank lines are ignored, and
// `@predicate<TAB>name` declares an extra binary predicate for later lines.
// Names without ':' take the caller's default namespace.

struct FactLine {
    std::size_t line;
    Fact fact;
};

struct FactFile {
    std::vector<FactLine> facts;
    std::vector<Predicate> declared_predicates;
    std::size_t skipped_lines = 0;  // comments and blanks
};

// `line_number` only feeds error messages.
Fact parse_fact_line(std::string_view line, std::string_view default_namespace,
                     const PredicateTable& predicates = {}, std::size_t line_number = 0);

FactFile parse_fact_file(std::string_view text, std::string_view default_namespace,
                         const PredicateTable& predicates = {});

// Tab-separated form with fully qualified names; parse_fact_line inverts it.
std::string serialize_fact(const Fact& fact);
std::string serialize_fact_file(const FactFile& file);

// "name" or "ns:name" -> Symbol, with surrounding whitespace trimmed.
Symbol parse_symbol(std::string_view text, std::string_view default_namespace);

// Rule DSL: `id: head :- body1, body2, ... .`
// Terms starting with an uppercase letter (and containing no ':' or quotes)
// are variables; everything else is a constant, optionally double-quoted.
Rule parse_rule(std::string_view text, const PredicateTable& predicates = {},
                std::string_view default_namespace = "user");

// A sequence of rules, each terminated by '.', with `#` or `%` comment lines.
std::vector<Rule> parse_rules(std::string_view text, const PredicateTable& predicates = {},
                              std::string_view default_namespace = "user");

// `pred(term, term)`. Unknown predicates raise ParseError with kind UnknownPredicate.
Atom parse_query(std::string_view text, const PredicateTable& predicates = {},
                 std::string_view default_namespace = "user");

}  // namespace kgr
