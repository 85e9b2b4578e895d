#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include <absl/container/flat_hash_map.h>
#include <variant>
#include <vector>

#include "kgr/error.hpp"

namespace kgr {

// Interned (namespace, local) node identifier. Two symbols with equal names
// share one id for the lifetime of the process; copying is free.
class Symbol {
public:
    Symbol() = default;

    // Throws InvalidName on empty parts or parts containing ':', tab or newline.
    static Symbol intern(std::string_view ns, std::string_view local);
    // Lookup without interning.
    static std::optional<Symbol> find(std::string_view ns, std::string_view local);

    const std::string& ns() const;
    const std::string& local() const;
    std::string str() const;  // "ns:local"

    std::uint32_t id() const noexcept { return id_; }
    bool valid() const noexcept { return id_ != kInvalid; }

    friend bool operator==(Symbol a, Symbol b) noexcept { return a.id_ == b.id_; }

private:
    static constexpr std::uint32_t kInvalid = 0xffffffffu;
    explicit Symbol(std::uint32_t id) : id_(id) {}
    std::uint32_t id_ = kInvalid;
};

// Orders by (namespace, local) text. Use this wherever output order matters;
// ids depend on interning order.
struct SymbolTextLess {
    bool operator()(Symbol a, Symbol b) const;
};

bool is_valid_name_part(std::string_view part);

// Interned binary predicate name. The five built-ins always exist with fixed ids.
class Predicate {
public:
    Predicate() = default;

    static Predicate intern(std::string_view name);
    static std::optional<Predicate> find(std::string_view name);

    static Predicate subClassOf();
    static Predicate isinstanceOf();
    static Predicate propertyOf();
    static Predicate subPropertyOf();
    static Predicate inverseOf();

    const std::string& name() const;
    std::uint32_t id() const noexcept { return id_; }
    bool is_builtin() const noexcept { return id_ < 5; }

    friend bool operator==(Predicate a, Predicate b) noexcept { return a.id_ == b.id_; }

private:
    explicit Predicate(std::uint32_t id) : id_(id) {}
    std::uint32_t id_ = 0;
};

bool is_valid_predicate_name(std::string_view name);

// The set of predicate names a parser or graph accepts. Built-ins are always
// present; ontologies may declare more.
class PredicateTable {
public:
    PredicateTable();

    void declare(Predicate p);
    Predicate declare(std::string_view name);
    bool contains(Predicate p) const;
    std::optional<Predicate> lookup(std::string_view name) const;

    // Built-ins first in fixed order, then declared predicates by name.
    std::vector<Predicate> ordered() const;

private:
    std::vector<Predicate> declared_;
};

struct Fact {
    Predicate predicate;
    Symbol subject;
    Symbol object;

    friend bool operator==(const Fact&, const Fact&) = default;
};

// Text order: predicate name, then subject, then object.
struct FactTextLess {
    bool operator()(const Fact& a, const Fact& b) const;
};

std::string to_string(const Fact& fact);  // "pred(ns:a, ns:b)"

struct Variable {
    std::string name;
    friend bool operator==(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, Symbol>;

inline bool is_variable(const Term& t) { return std::holds_alternative<Variable>(t); }
std::string to_string(const Term& term);

struct Atom {
    Predicate predicate;
    Term subject;
    Term object;

    bool is_ground() const { return !is_variable(subject) && !is_variable(object); }
    // Requires is_ground().
    Fact to_fact() const;

    friend bool operator==(const Atom&, const Atom&) = default;
};

std::string to_string(const Atom& atom);

struct Rule {
    std::string id;
    Atom head;
    std::vector<Atom> body;

    friend bool operator==(const Rule&, const Rule&) = default;
};

// Throws RangeRestriction if a head variable is missing from the body and
// ParseError if the body is empty.
void validate_rule(const Rule& rule);
std::string to_string(const Rule& rule);  // DSL form, parseable by parse_rule

enum class NodeKind { Class, Property, Instance };

std::string_view to_string(NodeKind kind);

struct Derivation {
    Fact fact;
    std::string rule_id;
    std::vector<Fact> premises;  // in rule body order
};

enum class Origin { Base, Derived };

}  // namespace kgr

template <>
struct std::hash<kgr::Symbol> {
    std::size_t operator()(kgr::Symbol s) const noexcept { return s.id(); }
};

template <>
struct std::hash<kgr::Predicate> {
    std::size_t operator()(kgr::Predicate p) const noexcept { return p.id(); }
};

template <>
struct std::hash<kgr::Fact> {
    std::size_t operator()(const kgr::Fact& f) const noexcept {
        std::uint64_t h = (std::uint64_t{f.subject.id()} << 32) | f.object.id();
        h ^= std::uint64_t{f.predicate.id()} * 0x9e3779b97f4a7c15ull;
        h ^= h >> 29;
        h *= 0xbf58476d1ce4e5b9ull;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

namespace kgr {

// Base facts, derived facts, their indexes, node kinds and provenance.
//
// Facts live in one insertion-ordered table; each fact has a stable index
// (FactId) and all posting lists are sorted by it. The engine relies on that
// ordering to restrict matches to index ranges.
class KnowledgeGraph {
public:
    using FactId = std::uint32_t;

    // Compact provenance: rule position in the rule list plus premise ids.
    struct DerivationRecord {
        std::uint32_t rule;
        std::vector<FactId> premises;
    };

    KnowledgeGraph() = default;

    // Inserts a fact. Returns true iff it was not already present. Re-inserting
    // a derived fact as Base promotes it (and drops its derivations) but still
    // returns false. Throws KindConflict if the fact forces a symbol into a
    // second NodeKind; the graph is unchanged in that case.
    bool insert(const Fact& fact, Origin origin = Origin::Base);

    // Registers an explicit kind for a symbol with no facts yet.
    // Throws KindConflict if the symbol already has a different forced kind.
    void declare_kind(Symbol symbol, NodeKind kind);

    bool contains(const Fact& fact) const;
    std::optional<FactId> find(const Fact& fact) const;
    std::optional<Origin> origin(const Fact& fact) const;

    const Fact& fact(FactId id) const { return facts_[id]; }
    Origin origin(FactId id) const { return origins_[id]; }
    std::size_t size() const noexcept { return facts_.size(); }
    std::size_t base_size() const noexcept { return facts_.size() - derived_count_; }
    std::size_t derived_size() const noexcept { return derived_count_; }
    bool empty() const noexcept { return facts_.empty(); }

    std::span<const Fact> facts() const { return facts_; }
    std::vector<Fact> base_facts() const;
    std::vector<Fact> derived_facts() const;

    // Posting lists, sorted ascending. Empty span when nothing matches.
    std::span<const FactId> with_predicate(Predicate p) const;
    std::span<const FactId> with_subject(Predicate p, Symbol s) const;
    std::span<const FactId> with_object(Predicate p, Symbol o) const;

    std::optional<NodeKind> kind(Symbol s) const;
    // Symbols with a registered kind, in text order.
    std::vector<Symbol> symbols(std::optional<NodeKind> kind = std::nullopt) const;
    const std::vector<std::pair<Symbol, NodeKind>>& declared_kinds() const { return declared_; }

    void add_derivation(FactId fact, DerivationRecord record);
    const std::vector<DerivationRecord>& derivation_records(FactId fact) const;

    // Copy holding only base facts and explicit kind declarations.
    KnowledgeGraph base_only() const;

    // Rebuilds every index from the fact table and compares with the
    // incrementally maintained ones.
    bool indexes_consistent() const;

private:
    struct KindEntry {
        NodeKind kind;
        bool forced;
    };

    static std::uint64_t key(Predicate p, Symbol s) {
        return (std::uint64_t{p.id()} << 32) | s.id();
    }

    std::vector<std::pair<Symbol, NodeKind>> kind_requirements(const Fact& fact) const;
    void apply_kinds(const Fact& fact);
    void check_kind(Symbol s, NodeKind k) const;

    std::vector<Fact> facts_;
    std::vector<Origin> origins_;
    std::size_t derived_count_ = 0;
    absl::flat_hash_map<Fact, FactId, std::hash<Fact>> ids_;
    std::unordered_map<std::uint32_t, std::vector<FactId>> by_predicate_;
    absl::flat_hash_map<std::uint64_t, std::vector<FactId>> by_subject_;
    absl::flat_hash_map<std::uint64_t, std::vector<FactId>> by_object_;
    std::unordered_map<Symbol, KindEntry> kinds_;
    std::vector<std::pair<Symbol, NodeKind>> declared_;
    std::unordered_map<FactId, std::vector<DerivationRecord>> derivations_;
};

}  // namespace kgr
