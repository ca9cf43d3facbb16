// Acceptance suite: runs every top-level requirement at its stated
// tolerance and prints one PASS/FAIL line per criterion. The process exits
// nonzero if any criterion fails.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gclmc/gcl.hpp"
#include "gclmc/oracle.hpp"
#include "gclmc/por.hpp"
#include "gclmc/tr.hpp"

using namespace gclmc;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> details;

    Criterion(int i, std::string t) : id(i), title(std::move(t)) {}

    void expect(bool ok, const std::string& what) {
        std::ostringstream line;
        line << (ok ? "  ok   " : "  FAIL ") << what;
        details.push_back(line.str());
        pass = pass && ok;
    }
    template <typename T, typename U>
    void expect_eq(const T& actual, const U& expected, const std::string& what) {
        std::ostringstream line;
        line << what << " (expected " << expected << ", got " << actual << ")";
        expect(actual == static_cast<T>(expected), line.str());
    }
};

std::set<std::vector<std::int32_t>> keys(const std::vector<State>& states) {
    std::set<std::vector<std::int32_t>> out;
    for (const auto& s : states) {
        auto k = s.vals;
        k.insert(k.end(), s.pcs.begin(), s.pcs.end());
        out.insert(k);
    }
    return out;
}

struct Summary {
    int failed = 0;

    void report(const Criterion& c) {
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title
                  << "\n";
        for (const auto& d : c.details)
            std::cout << d << "\n";
        if (!c.pass)
            failed++;
    }
};

// every reduced run in this suite funnels through here so the produced
// stubborn sets are validated on the fly (criterion 7 aggregates them)
std::uint64_t g_sets_validated = 0;
std::uint64_t g_set_violations = 0;

ExplorationResult audited_por(const Model& m) {
    StubbornAudit audit;
    auto r = explore_por(m, {}, &audit);
    g_sets_validated += audit.validated;
    g_set_violations += audit.violations;
    return r;
}

ExplorationResult audited_tr(const Model& m, bool dynamic) {
    StubbornAudit audit;
    auto oracle = dynamic ? dynamic_movers() : classify_movers_static(m, static_matrix(m));
    auto r = explore_tr(m, oracle, {}, &audit);
    g_sets_validated += audit.validated;
    g_set_violations += audit.violations;
    return r;
}

void criterion_1(Summary& s) {
    Criterion c{1, "independent system: full n^p, transactions 2^p, reduction <= n*p"};
    Model m = reference_model("indep(3,4)");
    auto t0 = Clock::now();
    auto full = explore_full(m);
    auto str = audited_tr(m, true);
    auto spor = audited_por(m);
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.expect_eq(full.states_visited, 64u, "full exploration states");
    c.expect_eq(str.external_states, 8u, "dynamic transaction reduction external states");
    c.expect(spor.states_visited <= 12, "partial-order reduction states <= 12 (got " +
                                            std::to_string(spor.states_visited) + ")");
    c.expect(secs < 1.0, "runtime under one second");
    s.report(c);
}

void criterion_2(Summary& s) {
    Criterion c{2, "prog1: full 9, transactions collapse to 4, reduction below 7"};
    Model m = reference_model("prog1");
    auto full = explore_full(m);
    auto str = audited_tr(m, true);
    auto spor = audited_por(m);
    c.expect_eq(full.states_visited, 9u, "full exploration states");
    c.expect_eq(str.external_states, 4u, "dynamic transaction reduction external states");
    c.expect(spor.states_visited <= 7 && spor.states_visited < 9,
             "partial-order reduction states <= 7 (got " +
                 std::to_string(spor.states_visited) + ")");
    s.report(c);
}

void criterion_3(Summary& s) {
    Criterion c{3, "prog2: static movers reduce nothing, dynamic ones do"};
    Model m = reference_model("prog2");
    auto full = explore_full(m);
    auto st = audited_tr(m, false);
    auto dy = audited_tr(m, true);
    c.expect_eq(st.external_states, full.states_visited,
                "static transaction reduction equals the full state count");
    c.expect(dy.external_states < st.external_states,
             "dynamic transaction reduction is strictly smaller (got " +
                 std::to_string(dy.external_states) + " vs " +
                 std::to_string(st.external_states) + ")");
    s.report(c);
}

void criterion_4(Summary& s) {
    Criterion c{4, "lockpair: 16 states, transactions collapse to 4"};
    Model m = reference_model("lockpair");
    auto full = explore_full(m);
    auto str = audited_tr(m, true);
    // Both figures assume the lock example's final states coincide; with a
    // shared variable written differently by the two critical sections the
    // mutex excludes 4 location pairs (16 -> 12) and the joint completion
    // splits on the last writer (+1 state, and a fifth external state).
    c.expect_eq(full.states_visited, 16u, "full exploration states");
    c.expect_eq(str.external_states, 4u, "dynamic transaction reduction external states");
    s.report(c);
}

void criterion_5(Summary& s) {
    Criterion c{5, "deadlock2: transactions prune the deadlock, reduction keeps it"};
    Model m = reference_model("deadlock2");
    auto full = explore_full(m);
    auto str = audited_tr(m, true);
    auto spor = audited_por(m);
    // As in criterion 4, the two joint completions differ in the shared
    // variable, so the honest external count is 5.
    c.expect_eq(str.external_states, 4u, "dynamic transaction reduction external states");
    c.expect(!str.violated(), "no violation under the constant property");
    c.expect(str.deadlock_count < full.deadlock_count,
             "the blocked interleaving is pruned by transactions");
    c.expect(spor.deadlock_count >= 1, "partial-order reduction reports a deadlock");
    c.expect(keys(spor.deadlocks) == keys(full.deadlocks),
             "partial-order reduction finds exactly the full deadlock set");
    s.report(c);
}

void criterion_6(Summary& s) {
    Criterion c{6, "differential soundness over 100 generated models"};
    auto t0 = Clock::now();
    int failures = 0;
    std::string first;
    for (std::uint64_t seed = 0; seed < 100; seed++) {
        Model m = random_model(seed);
        auto full = explore_full(m);
        for (int kind = 0; kind < 3; kind++) {
            ExplorationResult red = kind == 0   ? audited_tr(m, false)
                                    : kind == 1 ? audited_tr(m, true)
                                                : audited_por(m);
            auto rep = check_soundness(m, full, red);
            if (!rep.pass) {
                failures++;
                if (first.empty())
                    first = "seed " + std::to_string(seed) + " " + red.strategy + ": " +
                            rep.failures.front();
            }
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    c.expect(failures == 0,
             "subset, verdict and deadlock checks on all strategies" +
                 (failures ? " (" + std::to_string(failures) + " failures, first: " + first + ")"
                           : std::string()));
    c.expect(secs < 300.0, "total runtime under five minutes (" + std::to_string(secs) + "s)");
    s.report(c);
}

void criterion_7(Summary& s) {
    Criterion c{7, "stubborn validity and preservation theorems"};
    c.expect(g_sets_validated > 0 && g_set_violations == 0,
             "every stubborn set produced so far validates (" +
                 std::to_string(g_sets_validated) + " checked)");
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"}) {
        Model m = reference_model(name);
        c.expect(check_strong_preservation(m).pass,
                 std::string(name) + ": strong stubborn sets preserved outside the set");
        c.expect(check_semi_preservation(m).pass,
                 std::string(name) + ": semi-stubborn sets preserved outside the set");
        c.expect(check_left_mover_preservation(m).pass,
                 std::string(name) + ": left movers survive remote steps");
        // genuinely fails on deadlock2: a release right-moves on a witness
        // whose enabling set contains the release itself, and the move
        // invalidates the witness (see notes in the repository history)
        c.expect(check_right_mover_preservation(m).pass,
                 std::string(name) + ": right movers survive moving");
    }
    s.report(c);
}

void criterion_8(Summary& s) {
    Criterion c{8, "reduction premise holds; an injected violation is localized"};
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"}) {
        Model m = reference_model(name);
        TransactionGraph g = build_transaction_graph(m, dynamic_movers());
        PremiseReport rep = check_reduction_premise(m, g);
        std::string detail;
        for (std::size_t i = 0; i < rep.item_pass.size(); i++)
            if (!rep.item_pass[i])
                detail += " item " + std::to_string(i + 1);
        c.expect(rep.all_pass(), std::string(name) + ": all nine premise items" + detail);
    }

    // a model whose transaction system has live pre- and post-phase
    // states (the reference systems flip their blocked post-phases
    // external, leaving nothing to corrupt)
    Model m = parse(R"(model mixed
var m : int [0, 2] = 0;
var x : int [0, 2] = 0;
property true;
process A {
  l0: true -> acquire(m); goto l1;
  l1: true -> x := 1; goto l2;
  l2: true -> release(m); goto l3;
}
process B {
  l0: true -> x := 2; goto l1;
}
)");
    TransactionGraph g = build_transaction_graph(m, dynamic_movers());
    {
        PremiseReport rep = check_reduction_premise(m, g);
        c.expect(rep.all_pass(), "the mixed lock model passes before mutation");
    }
    bool injected = false;
    for (std::size_t u = 0; u < g.states.size() && !injected; u++) {
        for (std::size_t v = 0; v < g.states.size() && !injected; v++) {
            for (int i = 0; i < m.process_count() && !injected; i++) {
                if (g.states[u].phases[static_cast<std::size_t>(i)] != Phase::L ||
                    g.states[v].phases[static_cast<std::size_t>(i)] != Phase::R)
                    continue;
                bool remote_equal = true;
                for (int j = 0; j < m.process_count(); j++)
                    if (j != i && g.states[u].phases[static_cast<std::size_t>(j)] !=
                                      g.states[v].phases[static_cast<std::size_t>(j)])
                        remote_equal = false;
                bool clean = remote_equal;
                for (const auto& e : g.edges)
                    if (e.pid != i &&
                        (e.to == static_cast<int>(u) || e.from == static_cast<int>(v)))
                        clean = false;
                if (!clean)
                    continue;
                g.edges.push_back(
                    {static_cast<int>(u), static_cast<int>(v),
                     m.processes[static_cast<std::size_t>(i)].action_ids.front(), i});
                injected = true;
            }
        }
    }
    c.expect(injected, "a post-to-pre edge could be injected");
    if (injected) {
        PremiseReport rep = check_reduction_premise(m, g);
        bool exactly_third = !rep.item_pass[2];
        for (std::size_t i = 0; i < rep.item_pass.size(); i++)
            if (i != 2 && !rep.item_pass[i])
                exactly_third = false;
        c.expect(exactly_third, "the injected edge fails exactly the phase-order item");
    }
    s.report(c);
}

void criterion_9(Summary& s) {
    Criterion c{9, "structural checks on every dynamic transaction run"};
    std::vector<Model> models;
    for (const char* name : {"prog1", "prog2", "lockpair", "deadlock2", "indep(3,4)"})
        models.push_back(reference_model(name));
    for (std::uint64_t seed = 0; seed < 100; seed++)
        models.push_back(random_model(seed));

    bool subset_ok = true;
    bool biject_ok = true;
    bool checks_ran = true;
    bool recomputed_ok = true;
    std::string first;
    for (const Model& m : models) {
        auto full = explore_full(m);
        auto str = explore_tr(m, dynamic_movers());
        if (!full.violated())
            for (const State& st : str.visited_bases)
                if (!full.visited_bases.count(st)) {
                    subset_ok = false;
                    break;
                }
        if (keys(str.external_list).size() != str.external_list.size())
            biject_ok = false;
        if (str.outer_all_n_checks == 0)
            checks_ran = false;
        if (!str.violated() && full.states_visited <= 10000) {
            ExplorationOptions off;
            off.subsumption = false;
            auto plain = explore_tr(m, dynamic_movers(), off);
            auto ref = reference_rts_externals(m, dynamic_movers());
            if (keys(str.external_list) != keys(plain.external_list) ||
                keys(str.external_list) != keys(ref)) {
                recomputed_ok = false;
                if (first.empty())
                    first = m.name;
            }
        }
    }
    c.expect(subset_ok, "reduced base states stay inside the full reachable set");
    c.expect(biject_ok, "external states are one-to-one with base states");
    c.expect(checks_ran, "the external-phase assertion was exercised on every run");
    c.expect(recomputed_ok,
             "stored externals equal the recomputed reduced system" +
                 (first.empty() ? std::string() : " (first mismatch: " + first + ")"));
    s.report(c);
}

}  // namespace

int main() {
    Summary s;
    criterion_1(s);
    criterion_2(s);
    criterion_3(s);
    criterion_4(s);
    criterion_5(s);
    criterion_6(s);
    criterion_7(s);
    criterion_8(s);
    criterion_9(s);
    std::cout << (s.failed == 0 ? "all criteria passed"
                                : std::to_string(s.failed) + " criterion(s) failed")
              << "\n";
    return s.failed == 0 ? 0 : 1;
}
