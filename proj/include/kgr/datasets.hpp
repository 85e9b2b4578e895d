#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/parser.hpp"

namespace kgr {

struct ExpectedCounts {
    std::size_t classes = 0;
    std::size_t properties = 0;
    std::size_t facts = 0;
    std::size_t relations = 0;  // declared extra predicates
};

// An upper ontology shipped with the library as fact-file text. The same
// files are installed under share/kgr for inspection.
struct BundledOntology {
    std::string name;
    std::string ns;
    std::string_view text;
    ExpectedCounts expected;

    FactFile parse() const { return parse_fact_file(text, ns); }
};

const BundledOntology& proton();
const BundledOntology& bfo();

// nullptr if no bundle has that name.
const BundledOntology* find_bundled(std::string_view name);
std::vector<std::string> bundled_names();

// axiom1..axiom4 plus subClassOf transitivity.
std::string_view default_rules_text();
std::vector<Rule> default_rules();

}  // namespace kgr
