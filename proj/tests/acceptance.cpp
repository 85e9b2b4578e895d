// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgr/datasets.hpp"
#include "kgr/engine.hpp"
#include "kgr/session.hpp"
#include "oracles.hpp"

using namespace kgr;

namespace {

constexpr double kExperimentSeconds = 1.0;
constexpr double kChainSeconds = 30.0;
constexpr std::size_t kChainLength = 1000;
constexpr int kRandomGraphs = 200;
constexpr int kRandomInstances = 50;
constexpr int kDumpRuns = 5;

Symbol P(std::string_view local) { return Symbol::intern("proton", local); }
Symbol B(std::string_view local) { return Symbol::intern("bfo", local); }
Symbol U(std::string_view local) { return Symbol::intern("user", local); }
Fact isa(Symbol x, Symbol c) { return {Predicate::isinstanceOf(), x, c}; }
Fact prop(Symbol p, Symbol t) { return {Predicate::propertyOf(), p, t}; }

struct Outcome {
    bool pass;
    std::string detail;
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fs", seconds);
    return buf;
}

Session three_experiments() {
    Session s;
    s.load_bundled(proton());
    s.load_bundled(bfo());
    s.assert_instance("english", "Language");
    s.assert_instance("paris", "Location");
    s.assert_instance("square", "Object");
    s.infer();
    return s;
}

Outcome english() {
    Clock clock;
    Session s;
    s.load_bundled(proton());
    s.assert_instance("english", "Language");
    s.infer();
    bool ok = s.ask("isinstanceOf(user:english, proton:Abstract)").truth &&
              s.ask("isinstanceOf(user:english, proton:Entity)").truth;
    double t = clock.seconds();
    return {ok && t < kExperimentSeconds, fmt(t)};
}

Outcome paris() {
    Clock clock;
    Session s;
    s.load_bundled(proton());
    s.assert_instance("paris", "Location");
    s.infer();
    auto answer = s.ask("propertyOf(P, user:paris)");
    std::set<Symbol, SymbolTextLess> found;
    for (const auto& b : answer.bindings) found.insert(b.at("P"));
    double t = clock.seconds();
    int missing = 0;
    for (auto* name : {"nima gns unique feature identifier", "longitude", "population count", "subregion of",
                       "nima gns designator", "latitude"}) {
        missing += !found.contains(P(name));
    }
    return {missing == 0 && t < kExperimentSeconds,
            std::to_string(found.size()) + " properties, " + std::to_string(missing) + " missing, " + fmt(t)};
}

Outcome square() {
    Clock clock;
    Session s;
    s.load_bundled(proton());
    s.load_bundled(bfo());
    s.assert_instance("square", "Object");
    s.infer();
    bool ok = s.ask(isa(U("square"), P("Entity"))) && s.ask(isa(U("square"), B("material entity"))) &&
              s.ask(prop(P("is owned by"), U("square"))) && s.ask(prop(P("has contact info"), U("square")));
    double t = clock.seconds();
    return {ok && t < kExperimentSeconds, fmt(t)};
}

Outcome datasets() {
    KnowledgeGraph p;
    for (const auto& line : proton().parse().facts) p.insert(line.fact);
    KnowledgeGraph b;
    for (const auto& line : bfo().parse().facts) b.insert(line.fact);
    auto classes = p.symbols(NodeKind::Class).size();
    auto sub = p.with_predicate(Predicate::subClassOf()).size();
    auto subprop = p.with_predicate(Predicate::subPropertyOf()).size();
    auto inv = p.with_predicate(Predicate::inverseOf()).size();
    auto bfo_classes = b.symbols(NodeKind::Class).size();
    bool ok = classes == 25 && sub == 56 && subprop == 30 && inv == 7 && bfo_classes == 34;
    return {ok, "proton " + std::to_string(classes) + " classes, " + std::to_string(sub) + " subClassOf, " +
                    std::to_string(subprop) + " subPropertyOf, " + std::to_string(inv) + " inverseOf; bfo " +
                    std::to_string(bfo_classes) + " classes"};
}

Outcome oracle_equivalence() {
    std::mt19937 rng(20260101);
    int mismatches = 0;
    for (int i = 0; i < kRandomGraphs; ++i) {
        auto base = testing::random_graph(rng, {20, 50});
        auto fast_result = seminaive_close(base, default_rules());
        auto slow_result = naive_close(base, default_rules());
        auto fast = fast_result.graph.facts();
        auto slow = slow_result.graph.facts();
        std::set<Fact, FactTextLess> a(fast.begin(), fast.end());
        std::set<Fact, FactTextLess> b(slow.begin(), slow.end());
        mismatches += a != b;
    }
    return {mismatches == 0, std::to_string(kRandomGraphs) + " graphs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome reachability() {
    std::mt19937 rng(77);
    Session s;
    s.load_bundled(proton());
    auto classes = s.graph().symbols(NodeKind::Class);
    std::vector<Fact> base;
    for (const auto& line : proton().parse().facts) base.push_back(line.fact);
    for (int i = 0; i < kRandomInstances; ++i) {
        Symbol c = classes[rng() % classes.size()];
        for (const auto& f : s.assert_instance("i" + std::to_string(i), c.local())) base.push_back(f);
    }
    s.infer();
    std::set<Fact, FactTextLess> closed;
    for (auto id : s.graph().with_predicate(Predicate::isinstanceOf())) closed.insert(s.graph().fact(id));
    auto expected = testing::expected_memberships(base);
    std::size_t mismatches = 0;
    for (const auto& f : expected) mismatches += !closed.contains(f);
    for (const auto& f : closed) mismatches += !expected.contains(f);
    return {mismatches == 0,
            std::to_string(closed.size()) + " memberships, " + std::to_string(mismatches) + " mismatches"};
}

Outcome performance() {
    Clock experiments;
    three_experiments();
    double t1 = experiments.seconds();

    auto chain = testing::subclass_chain(kChainLength);
    Clock clock;
    auto result = seminaive_close(chain, default_rules());
    double t2 = clock.seconds();
    auto total = result.graph.with_predicate(Predicate::subClassOf()).size();
    constexpr std::size_t kPairs = kChainLength * (kChainLength - 1) / 2;
    bool ok = t1 < kExperimentSeconds && t2 < kChainSeconds && total == kPairs &&
              result.derived_count == kPairs - (kChainLength - 1);
    return {ok, "experiments " + fmt(t1) + "; chain " + fmt(t2) + ", " + std::to_string(total) + " subClassOf (" +
                    std::to_string(result.derived_count) + " derived)"};
}

Outcome determinism() {
    auto first = three_experiments().dump_log();
    int differing = 0;
    for (int i = 1; i < kDumpRuns; ++i) differing += three_experiments().dump_log() != first;
    return {differing == 0, std::to_string(kDumpRuns) + " runs, " + std::to_string(first.size()) + " bytes"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"english experiment", english},
        {"paris experiment", paris},
        {"square experiment", square},
        {"dataset fidelity", datasets},
        {"semi-naive equals naive", oracle_equivalence},
        {"membership equals reachability", reachability},
        {"performance", performance},
        {"dump determinism", determinism},
    };
    int failures = 0;
    int n = 0;
    for (const auto& [name, check] : criteria) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failures += !outcome.pass;
        std::printf("%s %d %s: %s\n", outcome.pass ? "PASS" : "FAIL", ++n, name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
