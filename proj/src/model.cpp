#include "kgr/model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>

namespace kgr {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidName: return "InvalidName";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownPredicate: return "UnknownPredicate";
        case ErrorKind::RangeRestriction: return "RangeRestrictionError";
        case ErrorKind::KindConflict: return "KindConflict";
        case ErrorKind::UnknownFact: return "UnknownFact";
        case ErrorKind::ResourceLimit: return "ResourceLimit";
        case ErrorKind::DuplicateNamespace: return "DuplicateNamespace";
        case ErrorKind::UnresolvedClass: return "UnresolvedClass";
        case ErrorKind::AlreadyExists: return "AlreadyExists";
        case ErrorKind::StaleClosure: return "StaleClosure";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

namespace {

// Process-wide string pool shared by Symbol and Predicate.
template <typename Entry>
class Interner {
public:
    template <typename Make>
    std::uint32_t intern(const std::string& key, Make&& make) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = ids_.find(key); it != ids_.end()) return it->second;
        }
        std::unique_lock lock(mutex_);
        if (auto it = ids_.find(key); it != ids_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(entries_.size());
        entries_.push_back(make());
        ids_.emplace(key, id);
        return id;
    }

    std::optional<std::uint32_t> find(const std::string& key) const {
        std::shared_lock lock(mutex_);
        if (auto it = ids_.find(key); it != ids_.end()) return it->second;
        return std::nullopt;
    }

    const Entry& get(std::uint32_t id) const {
        std::shared_lock lock(mutex_);
        return entries_[id];
    }

private:
    mutable std::shared_mutex mutex_;
    std::deque<Entry> entries_;  // deque keeps references stable across growth
    std::unordered_map<std::string, std::uint32_t> ids_;
};

struct SymbolEntry {
    std::string ns;
    std::string local;
};

Interner<SymbolEntry>& symbols() {
    static Interner<SymbolEntry> pool;
    return pool;
}

std::string symbol_key(std::string_view ns, std::string_view local) {
    std::string key;
    key.reserve(ns.size() + local.size() + 1);
    key.append(ns).push_back(':');
    key.append(local);
    return key;
}

Interner<std::string>& predicates() {
    static Interner<std::string>* pool = [] {
        auto* p = new Interner<std::string>;
        for (const char* name : {"subClassOf", "isinstanceOf", "propertyOf", "subPropertyOf", "inverseOf"}) {
            p->intern(name, [&] { return std::string(name); });
        }
        return p;
    }();
    return *pool;
}

}  // namespace

bool is_valid_name_part(std::string_view part) {
    return !part.empty() && part.find_first_of(":\t\n\r") == std::string_view::npos;
}

Symbol Symbol::intern(std::string_view ns, std::string_view local) {
    if (!is_valid_name_part(ns) || !is_valid_name_part(local)) {
        throw Error(ErrorKind::InvalidName,
                    "invalid symbol name '" + std::string(ns) + ":" + std::string(local) + "'");
    }
    return Symbol(symbols().intern(symbol_key(ns, local), [&] {
        return SymbolEntry{std::string(ns), std::string(local)};
    }));
}

std::optional<Symbol> Symbol::find(std::string_view ns, std::string_view local) {
    if (auto id = symbols().find(symbol_key(ns, local))) return Symbol(*id);
    return std::nullopt;
}

const std::string& Symbol::ns() const { return symbols().get(id_).ns; }
const std::string& Symbol::local() const { return symbols().get(id_).local; }
std::string Symbol::str() const { return symbol_key(ns(), local()); }

bool SymbolTextLess::operator()(Symbol a, Symbol b) const {
    if (a == b) return false;
    if (int c = a.ns().compare(b.ns()); c != 0) return c < 0;
    return a.local() < b.local();
}

bool is_valid_predicate_name(std::string_view name) {
    if (name.empty()) return false;
    auto head = static_cast<unsigned char>(name.front());
    if (!std::isalpha(head) && head != '_') return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || u == '_' || u == '-';
    });
}

Predicate Predicate::intern(std::string_view name) {
    if (!is_valid_predicate_name(name)) {
        throw Error(ErrorKind::InvalidName, "invalid predicate name '" + std::string(name) + "'");
    }
    std::string key(name);
    return Predicate(predicates().intern(key, [&] { return key; }));
}

std::optional<Predicate> Predicate::find(std::string_view name) {
    if (auto id = predicates().find(std::string(name))) return Predicate(*id);
    return std::nullopt;
}

Predicate Predicate::subClassOf() { return Predicate(0); }
Predicate Predicate::isinstanceOf() { return Predicate(1); }
Predicate Predicate::propertyOf() { return Predicate(2); }
Predicate Predicate::subPropertyOf() { return Predicate(3); }
Predicate Predicate::inverseOf() { return Predicate(4); }

const std::string& Predicate::name() const { return predicates().get(id_); }

PredicateTable::PredicateTable() {
    declared_ = {Predicate::subClassOf(), Predicate::isinstanceOf(), Predicate::propertyOf(),
                 Predicate::subPropertyOf(), Predicate::inverseOf()};
}

void PredicateTable::declare(Predicate p) {
    if (!contains(p)) declared_.push_back(p);
}

Predicate PredicateTable::declare(std::string_view name) {
    auto p = Predicate::intern(name);
    declare(p);
    return p;
}

bool PredicateTable::contains(Predicate p) const {
    return std::find(declared_.begin(), declared_.end(), p) != declared_.end();
}

std::optional<Predicate> PredicateTable::lookup(std::string_view name) const {
    auto p = Predicate::find(name);
    if (p && contains(*p)) return p;
    return std::nullopt;
}

std::vector<Predicate> PredicateTable::ordered() const {
    std::vector<Predicate> out(declared_.begin(), declared_.begin() + 5);
    std::vector<Predicate> extra(declared_.begin() + 5, declared_.end());
    std::sort(extra.begin(), extra.end(),
              [](Predicate a, Predicate b) { return a.name() < b.name(); });
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

bool FactTextLess::operator()(const Fact& a, const Fact& b) const {
    if (a.predicate != b.predicate) return a.predicate.name() < b.predicate.name();
    SymbolTextLess less;
    if (a.subject != b.subject) return less(a.subject, b.subject);
    return less(a.object, b.object);
}

std::string to_string(const Fact& fact) {
    return fact.predicate.name() + "(" + fact.subject.str() + ", " + fact.object.str() + ")";
}

std::string to_string(const Term& term) {
    if (const auto* v = std::get_if<Variable>(&term)) return v->name;
    return std::get<Symbol>(term).str();
}

Fact Atom::to_fact() const {
    return Fact{predicate, std::get<Symbol>(subject), std::get<Symbol>(object)};
}

std::string to_string(const Atom& atom) {
    return atom.predicate.name() + "(" + to_string(atom.subject) + ", " + to_string(atom.object) + ")";
}

void validate_rule(const Rule& rule) {
    if (rule.body.empty()) {
        throw ParseError("rule '" + rule.id + "' has an empty body");
    }
    auto bound = [&](const Term& t) {
        const auto* v = std::get_if<Variable>(&t);
        if (!v) return true;
        return std::any_of(rule.body.begin(), rule.body.end(), [&](const Atom& a) {
            return a.subject == t || a.object == t;
        });
    };
    for (const Term* t : {&rule.head.subject, &rule.head.object}) {
        if (!bound(*t)) {
            throw ParseError("rule '" + rule.id + "': head variable " + to_string(*t) +
                                 " does not occur in the body",
                             0, ErrorKind::RangeRestriction);
        }
    }
}

std::string to_string(const Rule& rule) {
    std::ostringstream out;
    out << rule.id << ": " << to_string(rule.head) << " :- ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out << ", ";
        out << to_string(rule.body[i]);
    }
    out << '.';
    return out.str();
}

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Class: return "Class";
        case NodeKind::Property: return "Property";
        case NodeKind::Instance: return "Instance";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

namespace {

// Kind implied by a predicate position; `forced` false means "use this only
// if the symbol has no kind yet".
struct KindHint {
    NodeKind kind;
    bool forced;
};

std::pair<KindHint, KindHint> kind_hints(Predicate p) {
    if (p == Predicate::subClassOf()) return {{NodeKind::Class, true}, {NodeKind::Class, true}};
    if (p == Predicate::isinstanceOf()) return {{NodeKind::Instance, true}, {NodeKind::Class, true}};
    if (p == Predicate::propertyOf()) return {{NodeKind::Property, true}, {NodeKind::Class, false}};
    if (p == Predicate::subPropertyOf() || p == Predicate::inverseOf()) {
        return {{NodeKind::Property, true}, {NodeKind::Property, true}};
    }
    return {{NodeKind::Instance, false}, {NodeKind::Instance, false}};
}

}  // namespace

void KnowledgeGraph::check_kind(Symbol s, NodeKind k) const {
    auto it = kinds_.find(s);
    if (it != kinds_.end() && it->second.forced && it->second.kind != k) {
        throw Error(ErrorKind::KindConflict,
                    s.str() + " is a " + std::string(to_string(it->second.kind)) +
                        " and cannot also be a " + std::string(to_string(k)));
    }
}

void KnowledgeGraph::apply_kinds(const Fact& fact) {
    auto [hs, ho] = kind_hints(fact.predicate);
    // Validate both positions before touching anything.
    if (hs.forced) check_kind(fact.subject, hs.kind);
    if (ho.forced) check_kind(fact.object, ho.kind);
    if (hs.forced && ho.forced && fact.subject == fact.object && hs.kind != ho.kind) {
        throw Error(ErrorKind::KindConflict,
                    fact.subject.str() + " cannot be both " + std::string(to_string(hs.kind)) +
                        " and " + std::string(to_string(ho.kind)));
    }
    auto apply = [&](Symbol s, KindHint h) {
        auto [it, fresh] = kinds_.try_emplace(s, KindEntry{h.kind, h.forced});
        if (!fresh && h.forced && !it->second.forced) it->second = KindEntry{h.kind, true};
    };
    apply(fact.subject, hs);
    apply(fact.object, ho);
}

bool KnowledgeGraph::insert(const Fact& fact, Origin origin) {
    if (auto it = ids_.find(fact); it != ids_.end()) {
        FactId id = it->second;
        if (origin == Origin::Base && origins_[id] == Origin::Derived) {
            origins_[id] = Origin::Base;
            --derived_count_;
            derivations_.erase(id);
        }
        return false;
    }
    apply_kinds(fact);
    auto id = static_cast<FactId>(facts_.size());
    facts_.push_back(fact);
    origins_.push_back(origin);
    if (origin == Origin::Derived) ++derived_count_;
    ids_.emplace(fact, id);
    by_predicate_[fact.predicate.id()].push_back(id);
    by_subject_[key(fact.predicate, fact.subject)].push_back(id);
    by_object_[key(fact.predicate, fact.object)].push_back(id);
    return true;
}

void KnowledgeGraph::declare_kind(Symbol symbol, NodeKind kind) {
    check_kind(symbol, kind);
    kinds_[symbol] = KindEntry{kind, true};
    declared_.emplace_back(symbol, kind);
}

bool KnowledgeGraph::contains(const Fact& fact) const { return ids_.contains(fact); }

std::optional<KnowledgeGraph::FactId> KnowledgeGraph::find(const Fact& fact) const {
    if (auto it = ids_.find(fact); it != ids_.end()) return it->second;
    return std::nullopt;
}

std::optional<Origin> KnowledgeGraph::origin(const Fact& fact) const {
    if (auto id = find(fact)) return origins_[*id];
    return std::nullopt;
}

std::vector<Fact> KnowledgeGraph::base_facts() const {
    std::vector<Fact> out;
    out.reserve(base_size());
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        if (origins_[i] == Origin::Base) out.push_back(facts_[i]);
    }
    return out;
}

std::vector<Fact> KnowledgeGraph::derived_facts() const {
    std::vector<Fact> out;
    out.reserve(derived_count_);
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        if (origins_[i] == Origin::Derived) out.push_back(facts_[i]);
    }
    return out;
}

std::span<const KnowledgeGraph::FactId> KnowledgeGraph::with_predicate(Predicate p) const {
    if (auto it = by_predicate_.find(p.id()); it != by_predicate_.end()) return it->second;
    return {};
}

std::span<const KnowledgeGraph::FactId> KnowledgeGraph::with_subject(Predicate p, Symbol s) const {
    if (auto it = by_subject_.find(key(p, s)); it != by_subject_.end()) return it->second;
    return {};
}

std::span<const KnowledgeGraph::FactId> KnowledgeGraph::with_object(Predicate p, Symbol o) const {
    if (auto it = by_object_.find(key(p, o)); it != by_object_.end()) return it->second;
    return {};
}

std::optional<NodeKind> KnowledgeGraph::kind(Symbol s) const {
    if (auto it = kinds_.find(s); it != kinds_.end()) return it->second.kind;
    return std::nullopt;
}

std::vector<Symbol> KnowledgeGraph::symbols(std::optional<NodeKind> kind) const {
    std::vector<Symbol> out;
    for (const auto& [s, entry] : kinds_) {
        if (!kind || entry.kind == *kind) out.push_back(s);
    }
    std::sort(out.begin(), out.end(), SymbolTextLess{});
    return out;
}

void KnowledgeGraph::add_derivation(FactId fact, DerivationRecord record) {
    derivations_[fact].push_back(std::move(record));
}

const std::vector<KnowledgeGraph::DerivationRecord>&
KnowledgeGraph::derivation_records(FactId fact) const {
    static const std::vector<DerivationRecord> none;
    if (auto it = derivations_.find(fact); it != derivations_.end()) return it->second;
    return none;
}

KnowledgeGraph KnowledgeGraph::base_only() const {
    KnowledgeGraph out;
    for (const auto& [s, k] : declared_) out.declare_kind(s, k);
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        if (origins_[i] == Origin::Base) out.insert(facts_[i], Origin::Base);
    }
    return out;
}

bool KnowledgeGraph::indexes_consistent() const {
    std::unordered_map<std::uint32_t, std::vector<FactId>> pred;
    absl::flat_hash_map<std::uint64_t, std::vector<FactId>> subj;
    absl::flat_hash_map<std::uint64_t, std::vector<FactId>> obj;
    for (FactId id = 0; id < facts_.size(); ++id) {
        const Fact& f = facts_[id];
        pred[f.predicate.id()].push_back(id);
        subj[key(f.predicate, f.subject)].push_back(id);
        obj[key(f.predicate, f.object)].push_back(id);
        auto it = ids_.find(f);
        if (it == ids_.end() || it->second != id) return false;
        if (!kinds_.contains(f.subject) || !kinds_.contains(f.object)) return false;
    }
    auto derived = static_cast<std::size_t>(
        std::count(origins_.begin(), origins_.end(), Origin::Derived));
    return ids_.size() == facts_.size() && derived == derived_count_ && pred == by_predicate_ &&
           subj == by_subject_ && obj == by_object_;
}

}  // namespace kgr
