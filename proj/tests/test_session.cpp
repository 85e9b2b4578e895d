#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kgr/parser.hpp"
#include "kgr/session.hpp"
#include "oracles.hpp"

using namespace kgr;

namespace {

Symbol P(std::string_view local) { return Symbol::intern("proton", local); }
Symbol B(std::string_view local) { return Symbol::intern("bfo", local); }
Symbol U(std::string_view local) { return Symbol::intern("user", local); }
Fact isa(Symbol x, Symbol c) { return {Predicate::isinstanceOf(), x, c}; }

template <typename F>
ErrorKind error_kind(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

Session proton_session(SessionConfig config = {}) {
    Session s(config);
    s.load_bundled(proton());
    return s;
}

}  // namespace

TEST(Session, LoadReports) {
    Session s;
    auto report = s.load_bundled(proton());
    EXPECT_EQ(report.classes, 25u);
    EXPECT_EQ(report.properties, proton().expected.properties);
    EXPECT_EQ(report.facts, 156u);
    auto b = s.load_bundled(bfo());
    EXPECT_EQ(b.classes, 34u);
    EXPECT_EQ(b.relations, 8u);
    EXPECT_TRUE(s.predicates().lookup("partOf"));
    EXPECT_EQ(error_kind([&] { s.load_bundled(proton()); }), ErrorKind::DuplicateNamespace);

    auto empty = s.load_ontology_text("", "empty");
    EXPECT_EQ(empty.facts, 0u);
    EXPECT_EQ(empty.classes, 0u);
}

TEST(Session, FailedLoadLeavesSessionUntouched) {
    Session s;
    s.load_bundled(proton());
    auto before = s.graph().size();
    // Language is a Class; making it an instance must fail on line 2.
    try {
        s.load_ontology_text("subClassOf\tA\tB\nisinstanceOf\tproton:Language\tB\n", "bad");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::KindConflict);
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_EQ(s.graph().size(), before);
    EXPECT_FALSE(s.loaded_namespaces().contains("bad"));
    EXPECT_EQ(error_kind([&] { s.load_ontology_text("subClassOf\tA\n", "bad"); }), ErrorKind::ParseError);
}

TEST(Session, ResolveClass) {
    Session s;
    s.load_bundled(proton());
    EXPECT_EQ(s.resolve_class("Location"), std::vector<Symbol>{P("Location")});
    auto before = s.resolve_class("Object");
    s.load_bundled(bfo());
    EXPECT_EQ(s.resolve_class("Object"), (std::vector<Symbol>{B("object"), P("Object")}));
    EXPECT_EQ(s.resolve_class("oBjEcT").size(), 2u);
    EXPECT_TRUE(s.resolve_class("Unicorn").empty());
    // Properties are not classes.
    EXPECT_TRUE(s.resolve_class("longitude").empty());
    // Loading BFO keeps the proton members of every resolution set.
    for (Symbol c : before) {
        auto after = s.resolve_class(c.local());
        EXPECT_NE(std::find(after.begin(), after.end(), c), after.end());
    }
}

TEST(Session, AssertInstance) {
    auto s = proton_session();
    EXPECT_EQ(s.assert_instance("english", "Language"), std::vector<Fact>{isa(U("english"), P("Language"))});
    EXPECT_FALSE(s.closed());
    s.load_bundled(bfo());
    auto facts = s.assert_instance("square", "Object");
    EXPECT_EQ(facts, (std::vector<Fact>{isa(U("square"), B("object")), isa(U("square"), P("Object"))}));
    EXPECT_EQ(error_kind([&] { s.assert_instance("x", "Nonexistent"); }), ErrorKind::UnresolvedClass);
    EXPECT_EQ(error_kind([&] { s.assert_instance("bad:name", "Object"); }), ErrorKind::InvalidName);
}

TEST(Session, FallbackToNewClass) {
    SessionConfig config;
    config.fallback_to_new_class = true;
    auto s = proton_session(config);
    EXPECT_TRUE(s.assert_instance("gizmo", "Nonexistent").empty());
    EXPECT_EQ(s.graph().kind(U("gizmo")), NodeKind::Class);
}

TEST(Session, AssertNewClass) {
    auto s = proton_session();
    EXPECT_EQ(s.assert_new_class("Widget", "user"), U("Widget"));
    EXPECT_EQ(s.graph().kind(U("Widget")), NodeKind::Class);
    EXPECT_EQ(s.resolve_class("widget"), std::vector<Symbol>{U("Widget")});
    EXPECT_EQ(error_kind([&] { s.assert_new_class("Widget", "user"); }), ErrorKind::AlreadyExists);
    EXPECT_EQ(error_kind([&] { s.assert_new_class("Language", "proton"); }), ErrorKind::AlreadyExists);
    // A new class survives inference and can take instances.
    s.assert_instance("w1", "Widget");
    s.infer();
    EXPECT_TRUE(s.ask(isa(U("w1"), U("Widget"))));
    EXPECT_EQ(s.graph().kind(U("Widget")), NodeKind::Class);
}

TEST(Session, InferAndAsk) {
    Session empty;
    EXPECT_EQ(empty.infer().derived, 0u);

    auto s = proton_session();
    s.assert_instance("english", "Language");
    s.assert_instance("paris", "Location");
    EXPECT_EQ(error_kind([&] { s.ask(isa(U("english"), P("Entity"))); }), ErrorKind::StaleClosure);
    s.infer();
    EXPECT_TRUE(s.closed());
    EXPECT_TRUE(s.ask(isa(U("english"), P("Abstract"))));
    EXPECT_TRUE(s.ask(isa(U("english"), P("Entity"))));
    EXPECT_TRUE(s.ask(isa(U("paris"), P("Object"))));
    EXPECT_FALSE(s.ask(Fact{Predicate::subClassOf(), P("Entity"), P("Language")}));
    EXPECT_FALSE(s.ask("subClassOf(proton:Entity, proton:Language)").truth);
    EXPECT_TRUE(s.ask("isinstanceOf(paris, proton:Entity)").truth);

    auto answer = s.ask("propertyOf(P, user:paris)");
    EXPECT_FALSE(answer.ground);
    ASSERT_FALSE(answer.bindings.empty());
    for (std::size_t i = 1; i < answer.bindings.size(); ++i) {
        EXPECT_TRUE(SymbolTextLess{}(answer.bindings[i - 1].at("P"), answer.bindings[i].at("P")));
    }
    // Mutation makes the session stale again.
    s.assert_instance("rome", "Location");
    EXPECT_EQ(error_kind([&] { s.ask("isinstanceOf(rome, proton:Entity)"); }), ErrorKind::StaleClosure);
}

TEST(Session, AutoInfer) {
    SessionConfig config;
    config.auto_infer = true;
    auto s = proton_session(config);
    s.assert_instance("english", "Language");
    EXPECT_TRUE(s.ask(isa(U("english"), P("Entity"))));
    EXPECT_TRUE(s.closed());
}

TEST(Session, SquareAcrossOntologies) {
    auto s = proton_session();
    s.load_bundled(bfo());
    s.assert_instance("square", "Object");
    s.infer();
    EXPECT_TRUE(s.ask(isa(U("square"), P("Entity"))));
    EXPECT_TRUE(s.ask(isa(U("square"), B("material entity"))));
    EXPECT_TRUE(s.ask(isa(U("square"), B("entity"))));
    auto answer = s.ask("propertyOf(P, user:square)");
    std::vector<Symbol> props;
    for (const auto& b : answer.bindings) props.push_back(b.at("P"));
    EXPECT_NE(std::find(props.begin(), props.end(), P("is owned by")), props.end());
    EXPECT_NE(std::find(props.begin(), props.end(), P("has contact info")), props.end());
}

TEST(Session, RedundantMembershipIsHarmless) {
    auto s = proton_session();
    s.assert_instance("doc", "Document");
    s.assert_instance("doc", "Object");
    auto report = s.infer();
    EXPECT_TRUE(s.ask(isa(U("doc"), P("Entity"))));
    EXPECT_GT(report.derived, 0u);
}

TEST(Session, RandomPlacementsMatchReachability) {
    std::mt19937 rng(8);
    auto classes = proton_session().graph().symbols(NodeKind::Class);
    auto base = [&] {
        std::vector<Fact> out;
        for (const auto& line : proton().parse().facts) out.push_back(line.fact);
        return out;
    }();
    for (int trial = 0; trial < 20; ++trial) {
        auto s = proton_session();
        std::vector<Fact> placed = base;
        for (int i = 0; i < 5; ++i) {
            auto name = "r" + std::to_string(trial) + "_" + std::to_string(i);
            Symbol c = classes[rng() % classes.size()];
            for (const auto& f : s.assert_instance(name, c.local())) placed.push_back(f);
        }
        s.infer();
        for (const auto& f : kgr::testing::expected_memberships(placed)) EXPECT_TRUE(s.ask(f)) << to_string(f);
    }
}

TEST(Session, DumpLog) {
    Session empty;
    empty.infer();
    auto text = empty.dump_log();
    EXPECT_EQ(text.rfind("== Class nodes ==\n== Property nodes ==\n== Instance nodes ==\n== base subClassOf ==\n", 0), 0u);
    EXPECT_NE(text.find("== derived by trans ==\n"), std::string::npos);

    auto s = proton_session();
    EXPECT_EQ(error_kind([&] { s.dump_log(); }), ErrorKind::StaleClosure);
    s.infer();
    auto proton_log = s.dump_log();
    auto classes_start = proton_log.find("== Class nodes ==\n") + 18;
    auto classes_end = proton_log.find("== Property nodes ==");
    auto class_block = proton_log.substr(classes_start, classes_end - classes_start);
    EXPECT_EQ(std::count(class_block.begin(), class_block.end(), '\n'), 25);

    s.assert_instance("english", "Language");
    s.infer();
    auto log = s.dump_log();
    auto section = log.find("== derived by axiom1 ==");
    ASSERT_NE(section, std::string::npos);
    auto next = log.find("== derived by axiom2 ==");
    auto axiom1 = log.substr(section, next - section);
    EXPECT_NE(axiom1.find("\nisinstanceOf\tuser:english\tproton:Entity\n  <= "), std::string::npos);
    EXPECT_EQ(log, s.dump_log());
}

// Facts listed in the dump are exactly base and derived facts.
TEST(Session, DumpCoversGraphExactly) {
    auto s = proton_session();
    s.load_bundled(bfo());
    s.assert_instance("square", "Object");
    s.assert_instance("paris", "Location");
    s.infer();
    std::istringstream in(s.dump_log());
    std::string line, section;
    std::set<Fact, FactTextLess> base, derived;
    while (std::getline(in, line)) {
        if (line.starts_with("== ")) {
            section = line;
            continue;
        }
        if (line.starts_with("  <= ")) continue;
        if (section.starts_with("== base ")) base.insert(parse_fact_line(line, "x", s.predicates()));
        if (section.starts_with("== derived by ")) derived.insert(parse_fact_line(line, "x", s.predicates()));
    }
    auto b = s.graph().base_facts();
    auto d = s.graph().derived_facts();
    EXPECT_EQ(base, (std::set<Fact, FactTextLess>(b.begin(), b.end())));
    EXPECT_EQ(derived, (std::set<Fact, FactTextLess>(d.begin(), d.end())));
}

TEST(Session, CustomRules) {
    auto s = proton_session();
    s.infer();
    s.set_rules(parse_rules("only1: isinstanceOf(X,Z) :- isinstanceOf(X,Y), subClassOf(Y,Z).\n"));
    EXPECT_FALSE(s.closed());
    s.assert_instance("english", "Language");
    s.infer();
    EXPECT_TRUE(s.ask(isa(U("english"), P("Entity"))));
    EXPECT_FALSE(s.ask("propertyOf(P, english)").truth);
}
