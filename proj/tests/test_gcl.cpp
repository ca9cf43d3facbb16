#include "doctest.h"

#include <fstream>
#include <sstream>

#include "gclmc/explore.hpp"
#include "gclmc/gcl.hpp"
#include "gclmc/oracle.hpp"
#include "helpers.hpp"

using namespace gclmc;
using namespace gclmc::test;

TEST_CASE("prog1 parses into two processes with four actions") {
    Model m = reference_model("prog1");
    CHECK(m.process_count() == 2);
    CHECK(m.action_count() == 4);
}

TEST_CASE("acquire desugars to a guarded counter write") {
    Model m = parse(R"(model locks
var m : int [0, 2] = 0;
property true;
process A {
  l0: true -> acquire(m); goto l1;
}
process B {
  l0: true -> acquire(m); goto l1;
  l1: true -> release(m); goto l2;
}
)");
    const auto& acq_b = m.action(action_by_label(m, "B/acquire(m)"));
    CHECK(acq_b.hint.kind == ActionHint::Kind::Acquire);
    CHECK(acq_b.guard->to_string() == "m = 0");
    REQUIRE(acq_b.updates.size() == 1);
    std::vector<std::int32_t> vals{0};
    CHECK(evaluate(acq_b.updates[0].rhs, vals) == 2);  // pid 1 writes 2

    const auto& rel = m.action(action_by_label(m, "B/release(m)"));
    CHECK(rel.hint.kind == ActionHint::Kind::Release);
    CHECK(rel.guard->to_string() == "m = 2");
    std::vector<std::int32_t> held{2};
    CHECK(evaluate(rel.updates[0].rhs, held) == 0);
}

TEST_CASE("undeclared variables are rejected with a location") {
    try {
        parse("model bad\nproperty true;\nprocess P {\n  l0: true -> z := 1; goto l1;\n}\n",
              "bad.gcl");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("undeclared variable 'z'") != std::string::npos);
        CHECK(e.span.file == "bad.gcl");
        CHECK(e.span.line == 4);
        CHECK(std::string(e.what()).find("bad.gcl:4:") == 0);
    }
}

TEST_CASE("frontend error cases") {
    CHECK_THROWS_AS(parse("model x\nvar a : int [0, 1] = 5;\nproperty true;\nprocess P { l0: "
                          "true -> a := 0; goto l1; }\n"),
                    ParseError);  // initializer outside the domain
    CHECK_THROWS_AS(parse("model x\nvar a : int [0, 1] = 0;\nvar a : int [0, 1] = 0;\nproperty "
                          "true;\nprocess P { l0: true -> a := 0; goto l1; }\n"),
                    ParseError);  // duplicate name
    CHECK_THROWS_AS(parse("model x\nproperty true\nprocess P { }\n"), ParseError);  // syntax
    CHECK_THROWS_AS(parse("model x\nvar a : int [0,1] = 0;\nproperty a;\nprocess P { l0: true -> "
                          "a := 0; goto l1; }\n"),
                    ParseError);  // property must be boolean
}

TEST_CASE("parse and pretty-print reach a fixed point") {
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"}) {
        Model m = reference_model(name);
        std::string printed = pretty_print(m);
        Model reparsed = parse(printed, "roundtrip");
        CHECK(pretty_print(reparsed) == printed);
        CHECK(reparsed.action_count() == m.action_count());
        CHECK(explore_full(reparsed).states_visited == explore_full(m).states_visited);
    }
    for (std::uint64_t seed = 0; seed < 25; seed++) {
        Model m = random_model(seed);
        std::string printed = pretty_print(m);
        CHECK(pretty_print(parse(printed)) == printed);
    }
}

TEST_CASE("full reachable counts of the reference models") {
    // prog1: the 3x3 location product
    CHECK(explore_full(reference_model("prog1")).states_visited == 9);
    // indep(3,4): every interleaving of three private 3-step counters
    CHECK(explore_full(reference_model("indep(3,4)")).states_visited == 64);
    // prog2: initialization followed by the prog1 product
    CHECK(explore_full(reference_model("prog2")).states_visited == 10);
    // lockpair: the mutex excludes 4 of the 16 location pairs and the
    // final state splits on the last writer of x
    CHECK(explore_full(reference_model("lockpair")).states_visited == 13);
    CHECK(explore_full(reference_model("deadlock2")).states_visited == 23);
}

TEST_CASE("the shipped model files match the built-in ones") {
    const std::pair<const char*, const char*> files[] = {
        {"prog1", "prog1.gcl"},       {"prog2", "prog2.gcl"},
        {"lockpair", "lockpair.gcl"}, {"deadlock2", "deadlock2.gcl"},
        {"indep(3,4)", "indep_3_4.gcl"},
    };
    for (auto& [name, file] : files) {
        Model from_file = parse_file(std::string(GCLMC_MODEL_DIR) + "/" + file);
        CHECK(pretty_print(from_file) == pretty_print(reference_model(name)));
    }
}

TEST_CASE("parameterized independent models") {
    Model m = reference_model("indep(2,3)");
    CHECK(m.process_count() == 2);
    CHECK(m.action_count() == 4);
    CHECK(explore_full(m).states_visited == 9);  // n^p
    CHECK_THROWS_AS(reference_model("indep(0,4)"), ModelError);
    CHECK_THROWS_AS(reference_model("nonsense"), ModelError);
    CHECK(is_reference_model_name("indep(4,2)"));
    CHECK_FALSE(is_reference_model_name("indep(4)"));
}

TEST_CASE("property overrides parse against the model's variables") {
    Model m = reference_model("lockpair");
    ExprPtr y = parse_property(m, "x <= 2");
    CHECK(y->is_boolean());
    CHECK_THROWS_AS(parse_property(m, "q = 0"), ParseError);
    CHECK_THROWS_AS(parse_property(m, "x + 1"), ParseError);
}

TEST_CASE("comments and whitespace are ignored") {
    Model m = parse("model c # trailing\n# full line\nvar a : int [0,1] = 0;\nproperty true;\n"
                    "process P { l0: true -> a := 1; goto l1; }\n");
    CHECK(m.action_count() == 1);
}

TEST_CASE("negative domains and literals round-trip") {
    Model m = parse(R"(model neg
var t : int [-2, 2] = -1;
property t >= -2;
process P {
  l0: t < 2 -> t := t + 1; goto l0;
  l0: t > -2 -> t := t - 1; goto l0;
}
)");
    CHECK(m.vars[0].lo == -2);
    CHECK(m.vars[0].init == -1);
    CHECK(pretty_print(parse(pretty_print(m))) == pretty_print(m));
    auto r = explore_full(m);
    CHECK(r.states_visited == 5);  // t ranges over the whole domain
    CHECK_FALSE(r.violated());
}
