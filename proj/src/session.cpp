#include "kgr/session.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace kgr {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

bool binding_less(const Substitution& a, const Substitution& b) {
    SymbolTextLess less;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](const auto& x, const auto& y) {
                                            if (x.first != y.first) return x.first < y.first;
                                            return less(x.second, y.second);
                                        });
}

}  // namespace

Session::Session(SessionConfig config) : config_(config), rules_(default_rules()) {}

void Session::reset() {
    graph_ = KnowledgeGraph{};
    predicates_ = PredicateTable{};
    namespaces_.clear();
    closed_ = false;
}

std::size_t Session::count_kind(std::string_view ns, NodeKind kind) const {
    auto symbols = graph_.symbols(kind);
    return static_cast<std::size_t>(
        std::count_if(symbols.begin(), symbols.end(), [&](Symbol s) { return s.ns() == ns; }));
}

LoadReport Session::load_ontology(const FactFile& facts, std::string_view ns) {
    if (namespaces_.contains(std::string(ns))) {
        throw Error(ErrorKind::DuplicateNamespace, "namespace '" + std::string(ns) + "' is already loaded");
    }
    if (!is_valid_name_part(ns)) {
        throw Error(ErrorKind::InvalidName, "invalid namespace '" + std::string(ns) + "'");
    }
    // Work on a copy so a failing file leaves the session untouched.
    KnowledgeGraph graph = graph_;
    LoadReport report;
    report.ns = std::string(ns);
    for (const auto& line : facts.facts) {
        try {
            if (graph.insert(line.fact, Origin::Base)) ++report.facts;
        } catch (const Error& e) {
            throw ParseError(e.what(), line.line, e.kind());
        }
    }
    graph_ = std::move(graph);
    for (auto p : facts.declared_predicates) predicates_.declare(p);
    report.relations = facts.declared_predicates.size();
    namespaces_.insert(std::string(ns));
    closed_ = false;
    report.classes = count_kind(ns, NodeKind::Class);
    report.properties = count_kind(ns, NodeKind::Property);
    report.instances = count_kind(ns, NodeKind::Instance);
    return report;
}

LoadReport Session::load_ontology_text(std::string_view text, std::string_view ns) {
    return load_ontology(parse_fact_file(text, ns, predicates_), ns);
}

LoadReport Session::load_bundled(const BundledOntology& bundle) {
    return load_ontology_text(bundle.text, bundle.ns);
}

std::vector<Symbol> Session::resolve_class(std::string_view local_name) const {
    std::vector<Symbol> out;
    for (Symbol s : graph_.symbols(NodeKind::Class)) {
        if (iequals(s.local(), local_name)) out.push_back(s);
    }
    return out;
}

std::vector<Fact> Session::assert_instance(std::string_view instance_name, std::string_view class_name) {
    Symbol instance = Symbol::intern(kInstanceNamespace, instance_name);
    auto classes = resolve_class(class_name);
    if (classes.empty()) {
        if (!config_.fallback_to_new_class) {
            throw Error(ErrorKind::UnresolvedClass, "no class named '" + std::string(class_name) + "'");
        }
        // Nothing to attach to: the concept becomes a class of its own.
        assert_new_class(instance_name);
        return {};
    }
    std::vector<Fact> facts;
    KnowledgeGraph graph = graph_;
    for (Symbol c : classes) {
        Fact f{Predicate::isinstanceOf(), instance, c};
        graph.insert(f, Origin::Base);
        facts.push_back(f);
    }
    graph_ = std::move(graph);
    closed_ = false;
    return facts;
}

Symbol Session::assert_new_class(std::string_view class_name, std::string_view ns) {
    Symbol s = Symbol::intern(ns, class_name);
    if (graph_.kind(s) == NodeKind::Class) {
        throw Error(ErrorKind::AlreadyExists, "class " + s.str() + " already exists");
    }
    graph_.declare_kind(s, NodeKind::Class);
    closed_ = false;
    return s;
}

bool Session::assert_fact(const Fact& fact) {
    if (!predicates_.contains(fact.predicate)) {
        throw Error(ErrorKind::UnknownPredicate, "unknown predicate '" + fact.predicate.name() + "'");
    }
    bool inserted = graph_.insert(fact, Origin::Base);
    closed_ = false;
    return inserted;
}

InferReport Session::infer() {
    CloseOptions options;
    options.max_derived = config_.max_derived;
    options.record_all_derivations = config_.record_all_derivations;
    auto result = seminaive_close(graph_, rules_, options);
    graph_ = std::move(result.graph);
    closed_ = true;
    return InferReport{result.iterations, result.derived_count};
}

void Session::ensure_closed() {
    if (closed_) return;
    if (!config_.auto_infer) {
        throw Error(ErrorKind::StaleClosure, "the closure is out of date; run infer first");
    }
    infer();
}

bool Session::ask(const Fact& fact) {
    ensure_closed();
    return graph_.contains(fact);
}

Answer Session::ask(const Atom& query) {
    ensure_closed();
    Answer answer;
    if (query.is_ground()) {
        answer.truth = graph_.contains(query.to_fact());
        return answer;
    }
    answer.ground = false;
    answer.bindings = match_atom(query, graph_);
    std::sort(answer.bindings.begin(), answer.bindings.end(), binding_less);
    answer.truth = !answer.bindings.empty();
    return answer;
}

Answer Session::ask(std::string_view query_text) {
    return ask(parse_query(query_text, predicates_, kInstanceNamespace));
}

DerivationTree Session::explain(const Fact& fact) {
    ensure_closed();
    return kgr::explain(graph_, rules_, fact);
}

std::vector<DerivationTree> Session::explain_all(const Fact& fact) {
    ensure_closed();
    return kgr::explain_all(graph_, rules_, fact);
}

std::string Session::dump_log() {
    ensure_closed();
    std::ostringstream out;
    for (NodeKind kind : {NodeKind::Class, NodeKind::Property, NodeKind::Instance}) {
        out << "== " << to_string(kind) << " nodes ==\n";
        for (Symbol s : graph_.symbols(kind)) out << s.str() << '\n';
    }

    std::map<std::uint32_t, std::vector<Fact>> base;
    std::vector<std::vector<KnowledgeGraph::FactId>> derived(rules_.size());
    for (KnowledgeGraph::FactId id = 0; id < graph_.size(); ++id) {
        const Fact& f = graph_.fact(id);
        if (graph_.origin(id) == Origin::Base) {
            base[f.predicate.id()].push_back(f);
        } else {
            const auto& records = graph_.derivation_records(id);
            if (!records.empty() && records.front().rule < derived.size()) {
                derived[records.front().rule].push_back(id);
            }
        }
    }
    for (Predicate p : predicates_.ordered()) {
        out << "== base " << p.name() << " ==\n";
        auto& facts = base[p.id()];
        std::sort(facts.begin(), facts.end(), FactTextLess{});
        for (const Fact& f : facts) out << serialize_fact(f) << '\n';
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
        out << "== derived by " << rules_[r].id << " ==\n";
        auto& ids = derived[r];
        std::sort(ids.begin(), ids.end(), [&](auto a, auto b) {
            return FactTextLess{}(graph_.fact(a), graph_.fact(b));
        });
        for (auto id : ids) {
            out << serialize_fact(graph_.fact(id)) << '\n';
            for (auto premise : graph_.derivation_records(id).front().premises) {
                out << "  <= " << serialize_fact(graph_.fact(premise)) << '\n';
            }
        }
    }
    return out.str();
}

void Session::set_rules(std::vector<Rule> rules) {
    for (const auto& rule : rules) validate_rule(rule);
    rules_ = std::move(rules);
    closed_ = false;
}

}  // namespace kgr
