#include "doctest.h"

#include <unordered_map>

#include "gclmc/gcl.hpp"
#include "gclmc/oracle.hpp"
#include "gclmc/por.hpp"
#include "helpers.hpp"

using namespace gclmc;
using namespace gclmc::test;

TEST_CASE("full exploration is deterministic and exact") {
    Model m = reference_model("prog1");
    auto r1 = explore_full(m);
    auto r2 = explore_full(m);
    CHECK(r1.states_visited == 9);
    CHECK(r1.transitions_taken == r2.transitions_taken);
    CHECK(r1.external_states == r1.states_visited);
}

TEST_CASE("full exploration finds every deadlock") {
    Model m = reference_model("deadlock2");
    auto r = explore_full(m);
    CHECK(r.deadlock_count == 3);  // the mutual hold and the two final states
    State held = state_after(m, {"P0/acquire(m1)", "P1/acquire(m2)"});
    bool found = false;
    for (const auto& d : r.deadlocks)
        found = found || d == held;
    CHECK(found);
}

TEST_CASE("violation traces replay to the bad state") {
    Model m = reference_model("prog1");
    m.property_y = parse_property(m, "b != 2");
    m.finalize();
    auto r = explore_full(m);
    REQUIRE(r.violated());
    REQUIRE_FALSE(r.violation->trace.empty());
    State s = m.initial_state();
    for (const auto& [action, state] : r.violation->trace) {
        s = apply(m, s, action);
        CHECK(s == state);
    }
    CHECK_FALSE(property_holds(m, s));
}

TEST_CASE("a violated initial state yields an empty trace") {
    Model m = reference_model("prog1");
    m.property_y = parse_property(m, "a != 0");
    m.finalize();
    auto r = explore_full(m);
    REQUIRE(r.violated());
    CHECK(r.violation->trace.empty());
}

TEST_CASE("state limits surface as a resource error") {
    ExplorationOptions opts;
    opts.max_states = 5;
    CHECK_THROWS_AS(explore_full(reference_model("indep(3,4)"), opts), ResourceLimit);
}

TEST_CASE("reduction keeps independent interleavings down") {
    auto prog1 = explore_por(reference_model("prog1"));
    CHECK(prog1.states_visited <= 7);
    CHECK(prog1.states_visited < 9);

    auto ind = explore_por(reference_model("indep(3,4)"));
    CHECK(ind.states_visited <= 12);
}

TEST_CASE("reduced exploration preserves deadlocks on the references") {
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"}) {
        Model m = reference_model(name);
        auto full = explore_full(m);
        auto red = explore_por(m);
        CHECK_MESSAGE(state_keys(full.deadlocks) == state_keys(red.deadlocks), name);
        CHECK(red.deadlock_count == full.deadlock_count);
        for (const State& s : red.visited_bases)
            CHECK(full.visited_bases.count(s));
    }
}

namespace {

void check_nothing_ignored(const Model& m, const std::string& name) {
    ExplorationOptions opts;
    opts.keep_graph = true;
    auto r = explore_por(m, opts);
    if (r.violated())
        return;  // the search stops at the counterexample

    // reduced successors per state, and the action set each state selected
    std::unordered_map<State, std::vector<State>, StateHash> succ;
    std::unordered_map<State, std::set<int>, StateHash> selected;
    for (auto& [from, action, to] : r.edges) {
        succ[from].push_back(to);
        selected[from].insert(action);
    }
    for (const State& q : r.visited_bases) {
        // reduced-reachable set from q
        std::vector<State> stack{q};
        std::unordered_set<State, StateHash> seen{q};
        while (!stack.empty()) {
            State s = stack.back();
            stack.pop_back();
            for (const State& t : succ[s])
                if (seen.insert(t).second)
                    stack.push_back(t);
        }
        for (int beta : enabled(m, q)) {
            bool eventually_selected = false;
            for (const State& s : seen)
                if (selected[s].count(beta))
                    eventually_selected = true;
            CHECK_MESSAGE(eventually_selected, name, ": action ", m.action(beta).label,
                          " ignored from some state");
        }
    }
}

}  // namespace

TEST_CASE("no enabled action is ignored along the reduced graph") {
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"})
        check_nothing_ignored(reference_model(name), name);
    for (std::uint64_t seed = 0; seed < 20; seed++)
        check_nothing_ignored(random_model(seed), "seed " + std::to_string(seed));
}

TEST_CASE("reduced and full verdicts agree when a property fails") {
    Model m = reference_model("prog1");
    m.property_y = parse_property(m, "y != 2");
    m.finalize();
    auto full = explore_full(m);
    auto red = explore_por(m);
    CHECK(full.violated());
    REQUIRE(red.violated());
    // the reduced trace is a real trace of the model
    State s = m.initial_state();
    for (const auto& [action, state] : red.violation->trace) {
        s = apply(m, s, action);
        CHECK(s == state);
    }
    CHECK_FALSE(property_holds(m, s));
}

TEST_CASE("every stubborn set chosen during reduction validates") {
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"}) {
        Model m = reference_model(name);
        StubbornAudit audit;
        auto r = explore_por(m, {}, &audit);
        CHECK(r.stubborn_sets_validated > 0);
        CHECK(r.stubborn_violations == 0);
    }
}

TEST_CASE("a privately cycling process cannot starve a visible action") {
    // the classic ignoring shape: one process loops on a private variable
    // forever, the other has a single write the property observes
    const char* source = R"(model starver
var z : int [0, 1] = 0;
var x : int [0, 1] = 0;
property x = 0;
process Loop {
  l0: true -> z := 1; goto l1;
  l1: true -> z := 0; goto l0;
}
process Write {
  l0: true -> x := 1; goto l1;
}
)";
    Model m = parse(source);
    auto full = explore_full(m);
    REQUIRE(full.violated());
    auto red = explore_por(m);
    CHECK(red.violated());

    // without the property, the write must still be explored somewhere
    Model quiet = parse(source);
    quiet.property_y = Expr::bool_lit(true);
    quiet.finalize();
    auto r = explore_por(quiet);
    bool wrote = false;
    for (const State& s : r.visited_bases)
        wrote = wrote || s.vals[static_cast<std::size_t>(quiet.var_index("x"))] == 1;
    CHECK(wrote);
    CHECK(state_keys(r.deadlocks) == state_keys(explore_full(quiet).deadlocks));
}

TEST_CASE("exhaustive enabling-set search never explores more states") {
    for (const char* name : {"prog1", "lockpair", "deadlock2"}) {
        Model m = reference_model(name);
        ExplorationOptions ex;
        ex.exhaustive_nes = true;
        auto plain = explore_por(m);
        auto tuned = explore_por(m, ex);
        CHECK(tuned.states_visited <= plain.states_visited);
        CHECK(tuned.deadlock_count == plain.deadlock_count);
    }
}

TEST_CASE("exact visibility widens reductions for tautological properties") {
    Model m = reference_model("prog1");
    m.property_y = parse_property(m, "a + b >= 0");  // always true, but written
    m.finalize();
    ExplorationOptions exact;
    exact.exact_visibility = true;
    auto with_static = explore_tr(m, dynamic_movers());
    auto with_exact = explore_tr(m, dynamic_movers(), exact);
    CHECK_FALSE(with_static.violated());
    CHECK_FALSE(with_exact.violated());
    // statically both of the first thread's writes look visible, so its
    // steps commit one by one; the refinement sees the property cannot
    // change and restores the full transactions
    CHECK(with_exact.external_states < with_static.external_states);
    CHECK(with_exact.external_states == 4);
}
