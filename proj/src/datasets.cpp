#include "kgr/datasets.hpp"

namespace kgr {

namespace bundled {
extern const std::string_view proton_tsv;
extern const std::string_view bfo_tsv;
extern const std::string_view default_rules_dl;
}  // namespace bundled

const BundledOntology& proton() {
    // Property count is what the tables enumerate (76), one short of the
    // usual 77; see the header of proton.tsv.
    static const BundledOntology bundle{"proton", "proton", bundled::proton_tsv,
                                        ExpectedCounts{25, 76, 156, 0}};
    return bundle;
}

const BundledOntology& bfo() {
    static const BundledOntology bundle{"bfo", "bfo", bundled::bfo_tsv, ExpectedCounts{34, 0, 33, 8}};
    return bundle;
}

const BundledOntology* find_bundled(std::string_view name) {
    if (name == "proton") return &proton();
    if (name == "bfo") return &bfo();
    return nullptr;
}

std::vector<std::string> bundled_names() { return {"bfo", "proton"}; }

std::string_view default_rules_text() { return bundled::default_rules_dl; }

std::vector<Rule> default_rules() {
    static const std::vector<Rule> rules = parse_rules(default_rules_text());
    return rules;
}

}  // namespace kgr
