#include "kgr/engine.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace kgr {

using FactId = KnowledgeGraph::FactId;

std::optional<Fact> apply(const Substitution& subst, const Atom& atom) {
    auto ground = [&](const Term& t) -> std::optional<Symbol> {
        if (const auto* s = std::get_if<Symbol>(&t)) return *s;
        auto it = subst.find(std::get<Variable>(t).name);
        if (it == subst.end()) return std::nullopt;
        return it->second;
    };
    auto s = ground(atom.subject);
    auto o = ground(atom.object);
    if (!s || !o) return std::nullopt;
    return Fact{atom.predicate, *s, *o};
}

std::vector<Substitution> match_atom(const Atom& atom, const KnowledgeGraph& graph,
                                     const Substitution& partial) {
    auto resolve = [&](const Term& t) -> std::optional<Symbol> {
        if (const auto* s = std::get_if<Symbol>(&t)) return *s;
        auto it = partial.find(std::get<Variable>(t).name);
        if (it == partial.end()) return std::nullopt;
        return it->second;
    };
    auto subject = resolve(atom.subject);
    auto object = resolve(atom.object);

    std::span<const FactId> candidates;
    if (subject && object) {
        auto id = graph.find(Fact{atom.predicate, *subject, *object});
        if (!id) return {};
        return {partial};
    }
    if (subject) candidates = graph.with_subject(atom.predicate, *subject);
    else if (object) candidates = graph.with_object(atom.predicate, *object);
    else candidates = graph.with_predicate(atom.predicate);

    std::vector<Substitution> out;
    for (FactId id : candidates) {
        const Fact& f = graph.fact(id);
        Substitution s = partial;
        auto bind = [&](const Term& t, Symbol value) {
            const auto* v = std::get_if<Variable>(&t);
            if (!v) return std::get<Symbol>(t) == value;
            auto [it, fresh] = s.try_emplace(v->name, value);
            return fresh || it->second == value;
        };
        if (bind(atom.subject, f.subject) && bind(atom.object, f.object)) out.push_back(std::move(s));
    }
    return out;
}

namespace {

void check_limit(std::size_t derived, const CloseOptions& options) {
    if (derived > options.max_derived) {
        throw Error(ErrorKind::ResourceLimit, "closure exceeded the limit of " +
                                                  std::to_string(options.max_derived) + " derived facts");
    }
}

// ---------------------------------------------------------------------------
// Naive reference evaluation. Deliberately index-free.

void enumerate_naive(const Rule& rule, std::size_t pos, const std::vector<Fact>& facts,
                     Substitution& subst, std::vector<std::size_t>& chosen,
                     const std::function<void(const Substitution&, const std::vector<std::size_t>&)>& emit) {
    if (pos == rule.body.size()) {
        emit(subst, chosen);
        return;
    }
    const Atom& atom = rule.body[pos];
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const Fact& f = facts[i];
        if (f.predicate != atom.predicate) continue;
        Substitution next = subst;
        bool ok = true;
        for (auto [term, value] : {std::pair{&atom.subject, f.subject}, std::pair{&atom.object, f.object}}) {
            if (const auto* c = std::get_if<Symbol>(term)) {
                ok = ok && *c == value;
            } else {
                auto [it, fresh] = next.try_emplace(std::get<Variable>(*term).name, value);
                ok = ok && (fresh || it->second == value);
            }
        }
        if (!ok) continue;
        chosen.push_back(i);
        enumerate_naive(rule, pos + 1, facts, next, chosen, emit);
        chosen.pop_back();
    }
}

}  // namespace

ClosureResult naive_close(std::span<const Fact> base, std::span<const Rule> rules,
                          const CloseOptions& options) {
    std::vector<Fact> facts;
    std::unordered_set<Fact> known;
    for (const Fact& f : base) {
        if (known.insert(f).second) facts.push_back(f);
    }
    const std::size_t base_count = facts.size();

    struct Found {
        Fact fact;
        std::uint32_t rule;
        std::vector<std::size_t> premises;
    };
    std::vector<Found> derived;
    ClosureResult result;

    bool changed = true;
    while (changed) {
        ++result.iterations;
        std::vector<Found> round;
        std::unordered_set<Fact> round_known;
        for (std::uint32_t r = 0; r < rules.size(); ++r) {
            Substitution subst;
            std::vector<std::size_t> chosen;
            enumerate_naive(rules[r], 0, facts, subst, chosen,
                            [&](const Substitution& s, const std::vector<std::size_t>& premises) {
                                auto head = apply(s, rules[r].head);
                                if (known.contains(*head) || !round_known.insert(*head).second) return;
                                round.push_back(Found{*head, r, premises});
                            });
        }
        changed = !round.empty();
        for (auto& f : round) {
            known.insert(f.fact);
            facts.push_back(f.fact);
            derived.push_back(std::move(f));
        }
        check_limit(derived.size(), options);
    }

    for (std::size_t i = 0; i < base_count; ++i) result.graph.insert(facts[i], Origin::Base);
    for (const auto& f : derived) {
        result.graph.insert(f.fact, Origin::Derived);
        KnowledgeGraph::DerivationRecord record{f.rule, {}};
        for (auto p : f.premises) record.premises.push_back(*result.graph.find(facts[p]));
        result.graph.add_derivation(*result.graph.find(f.fact), std::move(record));
    }
    result.derived_count = derived.size();
    return result;
}

// ---------------------------------------------------------------------------
// Semi-naive evaluation.

namespace {

constexpr std::uint32_t kConstant = 0xffffffffu;

struct SlotTerm {
    std::uint32_t slot = kConstant;  // kConstant => use `value`
    Symbol value;
};

struct SlotAtom {
    Predicate predicate;
    SlotTerm subject;
    SlotTerm object;
};

struct CompiledRule {
    std::uint32_t index;
    SlotAtom head;
    std::vector<SlotAtom> body;
    std::size_t slots = 0;
};

CompiledRule compile(const Rule& rule, std::uint32_t index) {
    CompiledRule out{index, {}, {}, 0};
    std::vector<std::string> names;
    auto term = [&](const Term& t) {
        SlotTerm st;
        if (const auto* s = std::get_if<Symbol>(&t)) {
            st.value = *s;
            return st;
        }
        const auto& name = std::get<Variable>(t).name;
        auto it = std::find(names.begin(), names.end(), name);
        st.slot = static_cast<std::uint32_t>(it - names.begin());
        if (it == names.end()) names.push_back(name);
        return st;
    };
    auto atom = [&](const Atom& a) { return SlotAtom{a.predicate, term(a.subject), term(a.object)}; };
    for (const Atom& a : rule.body) out.body.push_back(atom(a));
    out.head = atom(rule.head);
    out.slots = names.size();
    return out;
}

struct Pending {
    Fact fact;
    std::vector<KnowledgeGraph::DerivationRecord> records;
};

// Joins one rule with one body atom playing the delta role. Facts are
// visible to body atom j only if their id lies in ranges[j].
class RoundJoin {
public:
    RoundJoin(const KnowledgeGraph& graph, const CompiledRule& rule, const CloseOptions& options,
              std::vector<Pending>& pending, absl::flat_hash_map<Fact, std::size_t, std::hash<Fact>>& pending_ids,
              std::vector<std::pair<FactId, KnowledgeGraph::DerivationRecord>>& extra)
        : graph_(graph), rule_(rule), options_(options), pending_(pending),
          pending_ids_(pending_ids), extra_(extra),
          bindings_(rule.slots), premises_(rule.body.size()) {}

    void run(std::size_t delta_atom, FactId old_end, FactId delta_end) {
        ranges_.assign(rule_.body.size(), {0, delta_end});
        for (std::size_t j = 0; j < delta_atom; ++j) ranges_[j] = {0, old_end};
        ranges_[delta_atom] = {old_end, delta_end};
        order_.clear();
        order_.push_back(delta_atom);
        for (std::size_t j = 0; j < rule_.body.size(); ++j) {
            if (j != delta_atom) order_.push_back(j);
        }
        std::fill(bindings_.begin(), bindings_.end(), Symbol{});
        step(0);
    }

private:
    std::optional<Symbol> value(const SlotTerm& t) const {
        if (t.slot == kConstant) return t.value;
        if (bindings_[t.slot].valid()) return bindings_[t.slot];
        return std::nullopt;
    }

    void step(std::size_t depth) {
        if (depth == order_.size()) {
            emit();
            return;
        }
        const std::size_t j = order_[depth];
        const SlotAtom& atom = rule_.body[j];
        const auto [lo, hi] = ranges_[j];
        auto subject = value(atom.subject);
        auto object = value(atom.object);

        if (subject && object) {
            auto id = graph_.find(Fact{atom.predicate, *subject, *object});
            if (id && *id >= lo && *id < hi) {
                premises_[j] = *id;
                step(depth + 1);
            }
            return;
        }

        std::span<const FactId> list = subject ? graph_.with_subject(atom.predicate, *subject)
                                     : object  ? graph_.with_object(atom.predicate, *object)
                                               : graph_.with_predicate(atom.predicate);
        auto it = std::lower_bound(list.begin(), list.end(), lo);
        for (; it != list.end() && *it < hi; ++it) {
            const Fact& f = graph_.fact(*it);
            // Bind free slots; undo afterwards.
            std::uint32_t bound_here[2];
            int nbound = 0;
            bool ok = true;
            for (auto [term, sym] : {std::pair{&atom.subject, f.subject}, std::pair{&atom.object, f.object}}) {
                if (term->slot == kConstant) {
                    ok = term->value == sym;
                } else if (bindings_[term->slot].valid()) {
                    ok = bindings_[term->slot] == sym;
                } else {
                    bindings_[term->slot] = sym;
                    bound_here[nbound++] = term->slot;
                }
                if (!ok) break;
            }
            if (ok) {
                premises_[j] = *it;
                step(depth + 1);
            }
            for (int k = 0; k < nbound; ++k) bindings_[bound_here[k]] = Symbol{};
        }
    }

    void emit() {
        const Fact head{rule_.head.predicate, *value(rule_.head.subject), *value(rule_.head.object)};
        if (auto id = graph_.find(head)) {
            if (options_.record_all_derivations && graph_.origin(*id) == Origin::Derived) {
                extra_.emplace_back(*id, KnowledgeGraph::DerivationRecord{rule_.index, premises_});
            }
            return;
        }
        auto [it, fresh] = pending_ids_.try_emplace(head, pending_.size());
        if (fresh) {
            pending_.push_back(Pending{head, {{rule_.index, premises_}}});
            check_limit(graph_.derived_size() + pending_.size(), options_);
        } else if (options_.record_all_derivations) {
            pending_[it->second].records.push_back({rule_.index, premises_});
        }
    }

    const KnowledgeGraph& graph_;
    const CompiledRule& rule_;
    const CloseOptions& options_;
    std::vector<Pending>& pending_;
    absl::flat_hash_map<Fact, std::size_t, std::hash<Fact>>& pending_ids_;
    std::vector<std::pair<FactId, KnowledgeGraph::DerivationRecord>>& extra_;
    std::vector<Symbol> bindings_;
    std::vector<FactId> premises_;
    std::vector<std::pair<FactId, FactId>> ranges_;
    std::vector<std::size_t> order_;
};

}  // namespace

ClosureResult seminaive_close(const KnowledgeGraph& graph, std::span<const Rule> rules,
                              const CloseOptions& options) {
    ClosureResult result{graph.base_only(), 0, 0};
    KnowledgeGraph& g = result.graph;

    std::vector<CompiledRule> compiled;
    compiled.reserve(rules.size());
    for (std::uint32_t i = 0; i < rules.size(); ++i) compiled.push_back(compile(rules[i], i));

    FactId old_end = 0;
    auto delta_end = static_cast<FactId>(g.size());
    for (;;) {
        ++result.iterations;
        std::vector<Pending> pending;
        absl::flat_hash_map<Fact, std::size_t, std::hash<Fact>> pending_ids;
        std::vector<std::pair<FactId, KnowledgeGraph::DerivationRecord>> extra;
        if (delta_end > old_end) {
            for (const auto& rule : compiled) {
                RoundJoin join(g, rule, options, pending, pending_ids, extra);
                for (std::size_t i = 0; i < rule.body.size(); ++i) join.run(i, old_end, delta_end);
            }
        }
        // Posting lists are only mutated here, never while a join holds spans.
        for (auto& [id, record] : extra) g.add_derivation(id, std::move(record));
        for (auto& p : pending) {
            g.insert(p.fact, Origin::Derived);
            auto id = *g.find(p.fact);
            for (auto& record : p.records) g.add_derivation(id, std::move(record));
        }
        if (pending.empty()) break;
        old_end = delta_end;
        delta_end = static_cast<FactId>(g.size());
    }
    result.derived_count = g.derived_size();
    return result;
}

ClosureResult seminaive_close(std::span<const Fact> base, std::span<const Rule> rules,
                              const CloseOptions& options) {
    KnowledgeGraph graph;
    for (const Fact& f : base) graph.insert(f, Origin::Base);
    return seminaive_close(graph, rules, options);
}

// ---------------------------------------------------------------------------
// Provenance

namespace {

std::string rule_name(std::span<const Rule> rules, std::uint32_t index) {
    if (index < rules.size()) return rules[index].id;
    return "rule#" + std::to_string(index);
}

FactId require(const KnowledgeGraph& graph, const Fact& fact) {
    if (auto id = graph.find(fact)) return *id;
    throw Error(ErrorKind::UnknownFact, "unknown fact " + to_string(fact));
}

DerivationTree expand(const KnowledgeGraph& graph, std::span<const Rule> rules, FactId id) {
    DerivationTree node{graph.fact(id), {}, {}};
    const auto& records = graph.derivation_records(id);
    if (graph.origin(id) == Origin::Base || records.empty()) return node;
    const auto& first = records.front();
    node.rule_id = rule_name(rules, first.rule);
    for (FactId p : first.premises) node.premises.push_back(expand(graph, rules, p));
    return node;
}

void render_into(std::ostringstream& out, const DerivationTree& tree, std::size_t depth) {
    out << std::string(depth * 2, ' ') << to_string(tree.fact) << "  ["
        << (tree.asserted() ? std::string("asserted") : tree.rule_id) << "]\n";
    for (const auto& p : tree.premises) render_into(out, p, depth + 1);
}

}  // namespace

std::vector<Derivation> derivations(const KnowledgeGraph& graph, std::span<const Rule> rules,
                                    const Fact& fact) {
    std::vector<Derivation> out;
    for (const auto& record : graph.derivation_records(require(graph, fact))) {
        Derivation d{fact, rule_name(rules, record.rule), {}};
        for (FactId p : record.premises) d.premises.push_back(graph.fact(p));
        out.push_back(std::move(d));
    }
    return out;
}

DerivationTree explain(const KnowledgeGraph& graph, std::span<const Rule> rules, const Fact& fact) {
    return expand(graph, rules, require(graph, fact));
}

std::vector<DerivationTree> explain_all(const KnowledgeGraph& graph, std::span<const Rule> rules,
                                        const Fact& fact) {
    FactId id = require(graph, fact);
    const auto& records = graph.derivation_records(id);
    if (graph.origin(id) == Origin::Base || records.empty()) return {expand(graph, rules, id)};
    std::vector<DerivationTree> out;
    for (const auto& record : records) {
        DerivationTree node{fact, rule_name(rules, record.rule), {}};
        for (FactId p : record.premises) node.premises.push_back(expand(graph, rules, p));
        out.push_back(std::move(node));
    }
    return out;
}

std::string render(const DerivationTree& tree) {
    std::ostringstream out;
    render_into(out, tree, 0);
    return out.str();
}

}  // namespace kgr
