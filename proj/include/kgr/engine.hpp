#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgr/model.hpp"

namespace kgr {

// Variable name -> bound symbol. std::map keeps printing and comparison ordered.
using Substitution = std::map<std::string, Symbol>;

// Grounds an atom. Returns nullopt if some variable is unbound.
std::optional<Fact> apply(const Substitution& subst, const Atom& atom);

// Every extension of `partial` that grounds `atom` to a fact of `graph`,
// in fact-index order. Uses the (predicate, argument) indexes when an
// argument is bound.
std::vector<Substitution> match_atom(const Atom& atom, const KnowledgeGraph& graph,
                                     const Substitution& partial = {});

struct CloseOptions {
    std::size_t max_derived = 10'000'000;
    // Record every distinct derivation of each fact instead of only the first.
    // The number of derivations can grow much faster than the number of facts
    // (a transitive chain of n classes has ~n^3/6), so this is opt-in.
    bool record_all_derivations = false;
};

struct ClosureResult {
    KnowledgeGraph graph;
    std::size_t iterations = 0;
    std::size_t derived_count = 0;
};

// Reference evaluator: applies every rule to every combination of known
// facts until nothing new appears. Slow; used as a testing oracle.
ClosureResult naive_close(std::span<const Fact> base, std::span<const Rule> rules,
                          const CloseOptions& options = {});

// Semi-naive forward chaining. Each round joins rule bodies only where at
// least one body atom matches a fact first derived in the previous round.
// Any derived facts already in `graph` are discarded first.
ClosureResult seminaive_close(const KnowledgeGraph& graph, std::span<const Rule> rules,
                              const CloseOptions& options = {});
ClosureResult seminaive_close(std::span<const Fact> base, std::span<const Rule> rules,
                              const CloseOptions& options = {});

// Derivations of `fact` recorded in `graph`, resolved to facts and rule ids.
std::vector<Derivation> derivations(const KnowledgeGraph& graph, std::span<const Rule> rules,
                                    const Fact& fact);

struct DerivationTree {
    Fact fact;
    std::string rule_id;  // empty for asserted facts
    std::vector<DerivationTree> premises;

    bool asserted() const { return rule_id.empty(); }
};

// Expands the first recorded derivation recursively. Premises of a first
// derivation always precede the fact in the graph, so the tree is finite.
// Throws UnknownFact if the fact is not in the graph.
DerivationTree explain(const KnowledgeGraph& graph, std::span<const Rule> rules, const Fact& fact);

// One tree per recorded derivation (each premise expanded by its first
// derivation). A single "asserted" tree for base facts.
std::vector<DerivationTree> explain_all(const KnowledgeGraph& graph, std::span<const Rule> rules,
                                        const Fact& fact);

// Indented text rendering, two spaces per level:
//   isinstanceOf(user:english, proton:Entity)  [axiom1]
//     isinstanceOf(user:english, proton:Language)  [asserted]
std::string render(const DerivationTree& tree);

}  // namespace kgr
