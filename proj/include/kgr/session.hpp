#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/datasets.hpp"
#include "kgr/engine.hpp"
#include "kgr/model.hpp"
#include "kgr/parser.hpp"

namespace kgr {

struct SessionConfig {
    // Run infer() implicitly when a query finds the closure out of date.
    bool auto_infer = false;
    // assert_instance registers the class name as a new user class instead
    // of failing when no class resolves.
    bool fallback_to_new_class = false;
    bool record_all_derivations = true;
    std::size_t max_derived = 10'000'000;
};

struct LoadReport {
    std::string ns;
    std::size_t facts = 0;      // facts newly inserted
    std::size_t classes = 0;    // distinct symbols of each kind in ns
    std::size_t properties = 0;
    std::size_t instances = 0;
    std::size_t relations = 0;  // predicates declared by the file
};

struct InferReport {
    std::size_t iterations = 0;
    std::size_t derived = 0;
};

// Result of a query: a truth value for ground queries, bindings otherwise.
struct Answer {
    bool ground = true;
    bool truth = false;
    std::vector<Substitution> bindings;  // sorted by bound symbol text
};

// Mediates between assertions, queries and the knowledge graph: loads
// ontologies, places new instances, runs inference and answers queries.
//
// Mutations mark the closure stale. Queries on a stale session throw
// StaleClosure unless auto_infer is set.
class Session {
public:
    static constexpr std::string_view kInstanceNamespace = "user";

    explicit Session(SessionConfig config = {});

    LoadReport load_ontology(const FactFile& facts, std::string_view ns);
    LoadReport load_ontology_text(std::string_view text, std::string_view ns);
    LoadReport load_bundled(const BundledOntology& bundle);
    void reset();

    // Class symbols whose local name matches case-insensitively, in text order.
    std::vector<Symbol> resolve_class(std::string_view local_name) const;

    // Places user:<instance> under every class resolve_class finds.
    std::vector<Fact> assert_instance(std::string_view instance_name, std::string_view class_name);
    Symbol assert_new_class(std::string_view class_name, std::string_view ns = kInstanceNamespace);
    // Inserts a base fact directly.
    bool assert_fact(const Fact& fact);

    InferReport infer();

    bool ask(const Fact& fact);
    Answer ask(const Atom& query);
    Answer ask(std::string_view query_text);

    DerivationTree explain(const Fact& fact);
    std::vector<DerivationTree> explain_all(const Fact& fact);

    // Sections, in order: Class/Property/Instance nodes, base facts per
    // predicate, derived facts per rule (each followed by the premises of
    // its first derivation, indented "  <= ").
    std::string dump_log();

    void set_rules(std::vector<Rule> rules);
    const std::vector<Rule>& rules() const { return rules_; }
    const PredicateTable& predicates() const { return predicates_; }
    const KnowledgeGraph& graph() const { return graph_; }
    const std::set<std::string>& loaded_namespaces() const { return namespaces_; }
    bool closed() const { return closed_; }
    const SessionConfig& config() const { return config_; }
    SessionConfig& config() { return config_; }

private:
    void ensure_closed();
    std::size_t count_kind(std::string_view ns, NodeKind kind) const;

    SessionConfig config_;
    KnowledgeGraph graph_;
    std::vector<Rule> rules_;
    PredicateTable predicates_;
    std::set<std::string> namespaces_;
    bool closed_ = false;
};

}  // namespace kgr
