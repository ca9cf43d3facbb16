#include "gclmc/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "gclmc/gcl.hpp"

namespace gclmc {

namespace {

std::string show_state(const Model& m, const State& s) {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < m.vars.size(); i++)
        out << (i ? "," : "") << m.vars[i].name << "=" << s.vals[i];
    out << " pc=[";
    for (std::size_t i = 0; i < s.pcs.size(); i++)
        out << (i ? "," : "") << s.pcs[i];
    out << "]}";
    return out.str();
}

std::string show_phased(const Model& m, const PhasedState& s) {
    std::string out = show_state(m, s.base) + "/";
    for (Phase p : s.phases)
        out += phase_char(p);
    return out;
}

}  // namespace

SoundnessReport check_soundness(const Model& m, const ExplorationResult& full,
                                const ExplorationResult& reduced) {
    SoundnessReport rep;
    if (!full.violated()) {
        for (const State& s : reduced.visited_bases)
            if (!full.visited_bases.count(s)) {
                rep.fail("reduced run reaches a state outside the full reachable set: " +
                         show_state(m, s));
                break;
            }
    }
    if (full.violated() != reduced.violated())
        rep.fail("verdict mismatch: full " + std::string(full.violated() ? "violated" : "holds") +
                 ", " + reduced.strategy + " " + (reduced.violated() ? "violated" : "holds"));
    if (!full.violated() && !reduced.violated()) {
        if (reduced.strategy == "spor") {
            std::set<std::vector<std::int32_t>> fd;
            auto key = [](const State& s) {
                std::vector<std::int32_t> k = s.vals;
                k.insert(k.end(), s.pcs.begin(), s.pcs.end());
                return k;
            };
            if (full.deadlock_count == full.deadlocks.size() &&
                reduced.deadlock_count == reduced.deadlocks.size()) {
                std::set<std::vector<std::int32_t>> a;
                std::set<std::vector<std::int32_t>> b;
                for (const State& s : full.deadlocks)
                    a.insert(key(s));
                for (const State& s : reduced.deadlocks)
                    b.insert(key(s));
                if (a != b)
                    rep.fail("deadlock sets differ between full and spor");
            } else if (full.deadlock_count != reduced.deadlock_count) {
                rep.fail("deadlock counts differ between full and spor");
            }
            (void)fd;
        } else if (reduced.strategy == "tr" || reduced.strategy == "str") {
            if (reduced.deadlock_count > full.deadlock_count)
                rep.fail("reduction reports more deadlocks than the full exploration");
            else if (reduced.deadlock_count < full.deadlock_count)
                rep.notes.push_back(
                    "deadlocks pruned: " +
                    std::to_string(full.deadlock_count - reduced.deadlock_count));
        }
    }
    return rep;
}

TransactionGraph build_transaction_graph(const Model& m, const MoverOracle& oracle,
                                         std::size_t state_bound) {
    DependencyMatrix dep = static_matrix(m);
    VisibilitySets vis = visibility(m);

    TransactionGraph g;
    std::unordered_map<PhasedState, int, PhasedStateHash> ids;
    auto intern = [&](const PhasedState& s) {
        auto it = ids.find(s);
        if (it != ids.end())
            return it->second;
        int id = static_cast<int>(g.states.size());
        g.states.push_back(s);
        ids.emplace(s, id);
        if (g.states.size() > state_bound)
            throw StateSpaceTooLarge("transaction system exceeds bound");
        return id;
    };
    PhasedState init{m.initial_state(),
                     std::vector<Phase>(static_cast<std::size_t>(m.process_count()), Phase::N)};
    g.initial = intern(init);
    std::deque<int> queue{g.initial};
    std::unordered_set<int> queued{g.initial};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        PhasedState cur = g.states[static_cast<std::size_t>(v)];
        for (int a : enabled(m, cur.base)) {
            int pid = m.action(a).pid;
            State succ = apply(m, cur.base, a);
            Phase h = phase_step(m, cur.base, cur.phases[static_cast<std::size_t>(pid)], a, succ,
                                 oracle, vis, dep);
            bool blocked = true;
            for (int b : m.processes[static_cast<std::size_t>(pid)].action_ids)
                if (action_enabled(m, succ, b))
                    blocked = false;
            // where the post-phase rule holds, the external phase is an
            // allowed alternative; taking it at locally blocked states
            // keeps every post-phase terminating
            if (h == Phase::L && blocked)
                h = Phase::N;
            PhasedState next = cur;
            next.base = succ;
            next.phases[static_cast<std::size_t>(pid)] = h;
            int w = intern(next);
            g.edges.push_back({v, w, a, pid});
            if (queued.insert(w).second)
                queue.push_back(w);
        }
    }
    return g;
}

namespace {

bool phases_equal_except(const PhasedState& a, const PhasedState& b, std::vector<int> skip) {
    for (std::size_t j = 0; j < a.phases.size(); j++) {
        if (std::find(skip.begin(), skip.end(), static_cast<int>(j)) != skip.end())
            continue;
        if (a.phases[j] != b.phases[j])
            return false;
    }
    return true;
}

}  // namespace

PremiseReport check_reduction_premise(const Model& m, const TransactionGraph& g) {
    PremiseReport rep;
    rep.item_pass.assign(9, true);
    rep.counterexamples.assign(9, "");
    auto fail = [&](int item, const std::string& why) {
        if (rep.item_pass[static_cast<std::size_t>(item - 1)]) {
            rep.item_pass[static_cast<std::size_t>(item - 1)] = false;
            rep.counterexamples[static_cast<std::size_t>(item - 1)] = why;
        }
    };

    std::size_t P = static_cast<std::size_t>(m.process_count());

    // 1: every phase is one of R/L/N (the partition is structural)
    for (const auto& s : g.states) {
        if (s.phases.size() != P)
            fail(1, "phase vector of wrong arity at " + show_phased(m, s));
        for (Phase p : s.phases)
            if (p != Phase::R && p != Phase::L && p != Phase::N)
                fail(1, "phase outside {R,L,N} at " + show_phased(m, s));
    }

    // out-edge index
    std::vector<std::vector<TransactionGraph::Edge>> out(g.states.size());
    for (const auto& e : g.edges)
        out[static_cast<std::size_t>(e.from)].push_back(e);

    // 2: an i-step never changes a remote phase
    for (const auto& e : g.edges) {
        const auto& u = g.states[static_cast<std::size_t>(e.from)];
        const auto& v = g.states[static_cast<std::size_t>(e.to)];
        for (std::size_t j = 0; j < P; j++)
            if (static_cast<int>(j) != e.pid && u.phases[j] != v.phases[j])
                fail(2, "remote phase changed by " + m.action(e.action).label + " at " +
                            show_phased(m, u));
    }

    // 3: no step of i leaves the post-phase for the pre-phase
    for (const auto& e : g.edges) {
        const auto& u = g.states[static_cast<std::size_t>(e.from)];
        const auto& v = g.states[static_cast<std::size_t>(e.to)];
        if (u.phases[static_cast<std::size_t>(e.pid)] == Phase::L &&
            v.phases[static_cast<std::size_t>(e.pid)] == Phase::R)
            fail(3, "post-to-pre step " + m.action(e.action).label + " from " + show_phased(m, u));
    }

    // 4: steps into the pre-phase right-commute with remote steps, up to
    // the remote process's phase
    for (const auto& e1 : g.edges) {
        const auto& v = g.states[static_cast<std::size_t>(e1.to)];
        if (v.phases[static_cast<std::size_t>(e1.pid)] != Phase::R)
            continue;
        for (const auto& e2 : out[static_cast<std::size_t>(e1.to)]) {
            if (e2.pid == e1.pid)
                continue;
            const auto& w = g.states[static_cast<std::size_t>(e2.to)];
            bool found = false;
            for (const auto& f1 : out[static_cast<std::size_t>(e1.from)]) {
                if (f1.action != e2.action)
                    continue;
                for (const auto& f2 : out[static_cast<std::size_t>(f1.to)]) {
                    if (f2.action != e1.action)
                        continue;
                    const auto& y = g.states[static_cast<std::size_t>(f2.to)];
                    if (y.base == w.base && phases_equal_except(y, w, {e2.pid})) {
                        found = true;
                        break;
                    }
                }
                if (found)
                    break;
            }
            if (!found)
                fail(4, "no commuting square for " + m.action(e1.action).label + " before " +
                            m.action(e2.action).label + " at " +
                            show_phased(m, g.states[static_cast<std::size_t>(e1.from)]));
        }
    }

    // 5: steps out of the post-phase left-commute with remote steps, up to
    // both involved processes' phases
    for (const auto& e1 : g.edges) {  // u -beta_j-> v
        for (const auto& e2 : out[static_cast<std::size_t>(e1.to)]) {  // v -alpha_i-> w
            if (e2.pid == e1.pid)
                continue;
            const auto& v = g.states[static_cast<std::size_t>(e1.to)];
            if (v.phases[static_cast<std::size_t>(e2.pid)] != Phase::L)
                continue;
            const auto& w = g.states[static_cast<std::size_t>(e2.to)];
            bool found = false;
            for (const auto& f1 : out[static_cast<std::size_t>(e1.from)]) {
                if (f1.action != e2.action)
                    continue;
                for (const auto& f2 : out[static_cast<std::size_t>(f1.to)]) {
                    if (f2.action != e1.action)
                        continue;
                    const auto& y = g.states[static_cast<std::size_t>(f2.to)];
                    if (y.base == w.base && phases_equal_except(y, w, {e1.pid, e2.pid})) {
                        found = true;
                        break;
                    }
                }
                if (found)
                    break;
            }
            if (!found)
                fail(5, "no commuting square for " + m.action(e2.action).label + " after " +
                            m.action(e1.action).label + " at " +
                            show_phased(m, g.states[static_cast<std::size_t>(e1.from)]));
        }
    }

    // 6: every post-phase state locally reaches an external one
    for (std::size_t pid = 0; pid < P; pid++) {
        std::vector<std::vector<int>> rev(g.states.size());
        for (const auto& e : g.edges)
            if (e.pid == static_cast<int>(pid))
                rev[static_cast<std::size_t>(e.to)].push_back(e.from);
        std::vector<bool> reaches(g.states.size(), false);
        std::deque<int> work;
        for (std::size_t v = 0; v < g.states.size(); v++)
            if (g.states[v].phases[pid] == Phase::N) {
                reaches[v] = true;
                work.push_back(static_cast<int>(v));
            }
        while (!work.empty()) {
            int v = work.front();
            work.pop_front();
            for (int u : rev[static_cast<std::size_t>(v)])
                if (!reaches[static_cast<std::size_t>(u)]) {
                    reaches[static_cast<std::size_t>(u)] = true;
                    work.push_back(u);
                }
        }
        for (std::size_t v = 0; v < g.states.size(); v++)
            if (g.states[v].phases[pid] == Phase::L && !reaches[v])
                fail(6, "post phase of process " + std::to_string(pid) +
                            " cannot terminate from " + show_phased(m, g.states[v]));
    }

    // 7: the per-process abstraction relates only states with equal remote
    // phases (pairs agreeing on base and on every phase but i)
    for (std::size_t i = 0; i < P; i++) {
        std::map<std::pair<std::vector<std::int32_t>, std::string>, std::vector<int>> groups;
        for (std::size_t v = 0; v < g.states.size(); v++) {
            std::vector<std::int32_t> key = g.states[v].base.vals;
            key.insert(key.end(), g.states[v].base.pcs.begin(), g.states[v].base.pcs.end());
            std::string ph;
            for (std::size_t j = 0; j < P; j++)
                ph += j == i ? '_' : phase_char(g.states[v].phases[j]);
            groups[{key, ph}].push_back(static_cast<int>(v));
        }
        for (const auto& [key, members] : groups) {
            (void)key;
            for (std::size_t x = 0; x < members.size(); x++)
                for (std::size_t y = x + 1; y < members.size(); y++)
                    for (std::size_t j = 0; j < P; j++)
                        if (j != i &&
                            g.states[static_cast<std::size_t>(members[x])].phases[j] !=
                                g.states[static_cast<std::size_t>(members[y])].phases[j])
                            fail(7, "abstraction for process " + std::to_string(i) +
                                        " relates states with different remote phases");
        }
    }

    // 8: entering the pre-phase never falsifies the property
    for (const auto& e : g.edges) {
        const auto& u = g.states[static_cast<std::size_t>(e.from)];
        const auto& v = g.states[static_cast<std::size_t>(e.to)];
        if (v.phases[static_cast<std::size_t>(e.pid)] == Phase::R &&
            property_holds(m, u.base) && !property_holds(m, v.base))
            fail(8, "pre-phase step " + m.action(e.action).label + " disables the property at " +
                        show_phased(m, u));
    }

    // 9: leaving the post-phase never establishes the property
    for (const auto& e : g.edges) {
        const auto& u = g.states[static_cast<std::size_t>(e.from)];
        const auto& v = g.states[static_cast<std::size_t>(e.to)];
        if (u.phases[static_cast<std::size_t>(e.pid)] == Phase::L &&
            !property_holds(m, u.base) && property_holds(m, v.base))
            fail(9, "post-phase step " + m.action(e.action).label + " enables the property at " +
                        show_phased(m, u));
    }

    return rep;
}

SoundnessReport check_post_phase_actuation(const Model& m, const TransactionGraph& g) {
    SoundnessReport rep;
    std::size_t P = static_cast<std::size_t>(m.process_count());
    for (std::size_t pid = 0; pid < P; pid++) {
        // entry points: the process's own steps into its post-phase; from
        // there any steps that keep the phase extend the same transaction
        std::vector<bool> reached(g.states.size(), false);
        std::deque<int> work;
        for (const auto& e : g.edges) {
            if (e.pid == static_cast<int>(pid) &&
                g.states[static_cast<std::size_t>(e.from)].phases[pid] != Phase::L &&
                g.states[static_cast<std::size_t>(e.to)].phases[pid] == Phase::L &&
                !reached[static_cast<std::size_t>(e.to)]) {
                reached[static_cast<std::size_t>(e.to)] = true;
                work.push_back(e.to);
            }
        }
        std::vector<std::vector<int>> out(g.states.size());
        for (const auto& e : g.edges)
            if (g.states[static_cast<std::size_t>(e.to)].phases[pid] == Phase::L)
                out[static_cast<std::size_t>(e.from)].push_back(e.to);
        while (!work.empty()) {
            int v = work.front();
            work.pop_front();
            for (int w : out[static_cast<std::size_t>(v)])
                if (!reached[static_cast<std::size_t>(w)]) {
                    reached[static_cast<std::size_t>(w)] = true;
                    work.push_back(w);
                }
        }
        for (std::size_t v = 0; v < g.states.size(); v++)
            if (g.states[v].phases[pid] == Phase::L && !reached[v]) {
                rep.fail("post-phase state of process " + std::to_string(pid) +
                         " not actuated: " + show_phased(m, g.states[v]));
                return rep;
            }
    }
    return rep;
}

Model random_model(std::uint64_t seed, const RandomModelParams& params) {
    std::mt19937_64 rng(seed * 6364136223846793005ull + 1442695040888963407ull);
    auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    std::ostringstream src;
    src << "model rnd" << seed << "\n";

    int nv = std::max(1, params.max_vars - pick(2));
    int dom = params.max_domain;  // values 0..dom-1
    std::vector<int> init(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; v++) {
        init[static_cast<std::size_t>(v)] = pick(dom);
        src << "var d" << v << " : int [0, " << dom - 1 << "] = "
            << init[static_cast<std::size_t>(v)] << ";\n";
    }
    int np = 1 + pick(params.max_processes);
    bool with_lock = params.lock_sugar && np >= 2 && pick(2) == 0;
    if (with_lock)
        src << "var mtx : int [0, " << np << "] = 0;\n";

    if (params.random_property && pick(3) != 0) {
        // a comparison that holds initially, so violations are found by
        // exploration rather than at the first state
        int v = pick(nv);
        int c = pick(dom);
        const char* op = init[static_cast<std::size_t>(v)] == c ? (pick(2) ? "=" : "<=") : "!=";
        if (std::string(op) == "<=" && init[static_cast<std::size_t>(v)] > c)
            op = ">=";
        src << "property d" << v << " " << op << " " << c << ";\n";
    } else {
        src << "property true;\n";
    }

    for (int p = 0; p < np; p++) {
        src << "process P" << p << " {\n";
        int na = 1 + pick(params.max_actions_per_process);
        bool locked = with_lock && pick(2) == 0;
        // mostly properly paired; now and then the release is dropped so
        // blocked shapes show up in the corpus
        int release_at = locked ? 1 + pick(na) : -1;
        bool drop_release = locked && pick(8) == 0;
        int loc = 0;
        auto edge = [&](const std::string& guard, const std::string& stmt, int target) {
            src << "  l" << loc << ": " << guard << " -> " << stmt << " goto l" << target << ";\n";
            loc = target;
        };
        if (locked)
            edge("true", "acquire(mtx);", loc + 1);
        for (int k = 0; k < na; k++) {
            if (k == release_at && !drop_release)
                edge("true", "release(mtx);", loc + 1);
            int v = pick(nv);
            std::ostringstream stmt;
            std::string guard = "true";
            // the first step of a process never blocks, so chains get off
            // the ground; later guards may wait on other processes
            switch (k == 0 ? pick(3) : pick(6)) {
            case 0:
                stmt << "d" << v << " := " << pick(dom) << ";";
                break;
            case 1:
                stmt << "d" << v << " := d" << pick(nv) << ";";
                break;
            case 2:
            case 3:
                guard = "d" + std::to_string(v) + " < " + std::to_string(dom - 1);
                stmt << "d" << v << " := d" << v << " + 1;";
                break;
            default: {
                std::ostringstream g;
                g << "d" << pick(nv) << " " << (pick(4) == 0 ? "=" : "!=") << " " << pick(dom);
                guard = g.str();
                stmt << "d" << v << " := " << pick(dom) << ";";
                break;
            }
            }
            // chains mostly advance; the final edge often closes a full
            // cycle so the process keeps running
            int target;
            if (k == na - 1 && pick(2) == 0)
                target = 0;
            else if (loc > 0 && pick(6) == 0)
                target = pick(loc);
            else
                target = loc + 1;
            edge(guard, stmt.str(), target);
        }
        if (locked && release_at >= na && !drop_release)
            edge("true", "release(mtx);", loc + 1);
        src << "}\n";
    }
    return parse(src.str(), "rnd" + std::to_string(seed));
}

bool exact_commutes_relational(const Model& m, int a, int b, AccordMode mode,
                               std::size_t state_bound) {
    if (m.action(a).pid == m.action(b).pid)
        return false;
    std::vector<State> states = reachable_states(m, state_bound);
    std::unordered_map<State, int, StateHash> index;
    for (std::size_t i = 0; i < states.size(); i++)
        index.emplace(states[i], static_cast<int>(i));

    auto step_relation = [&](int act) {
        std::vector<int> to(states.size(), -1);
        for (std::size_t i = 0; i < states.size(); i++)
            if (action_enabled(m, states[i], act))
                to[i] = index.at(apply(m, states[i], act));
        return to;
    };
    std::vector<int> ra = step_relation(a);
    std::vector<int> rb = step_relation(b);
    auto compose = [&](const std::vector<int>& first, const std::vector<int>& second) {
        std::vector<int> out(states.size(), -1);
        for (std::size_t i = 0; i < states.size(); i++)
            if (first[i] >= 0)
                out[i] = second[static_cast<std::size_t>(first[i])];
        return out;
    };
    std::vector<int> ab = compose(ra, rb);
    std::vector<int> ba = compose(rb, ra);

    switch (mode) {
    case AccordMode::Right:
        for (std::size_t i = 0; i < states.size(); i++)
            if (ab[i] >= 0 && ba[i] != ab[i])
                return false;
        return true;
    case AccordMode::Left:
        for (std::size_t i = 0; i < states.size(); i++)
            if (ba[i] >= 0 && ab[i] != ba[i])
                return false;
        return true;
    case AccordMode::Full:
        return ab == ba;
    case AccordMode::Strong:
        for (std::size_t i = 0; i < states.size(); i++)
            if (ra[i] >= 0 && rb[i] >= 0 && (ab[i] < 0 || ba[i] != ab[i]))
                return false;
        return true;
    }
    return false;
}

SoundnessReport check_strong_preservation(const Model& m) {
    SoundnessReport rep;
    DependencyMatrix dep = static_matrix(m);
    for (const State& q : reachable_states(m)) {
        std::vector<int> en = enabled(m, q);
        for (int seed : en) {
            StubbornResult b = closure_stubborn(m, q, StarMode::Strong, {seed}, dep);
            for (int beta : en) {
                if (b.contains(beta))
                    continue;
                State q2 = apply(m, q, beta);
                if (!validate_stubborn(m, q2, b, dep).empty()) {
                    rep.fail("strong stubborn set not preserved by " + m.action(beta).label +
                             " at " + show_state(m, q));
                    return rep;
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_semi_preservation(const Model& m) {
    SoundnessReport rep;
    DependencyMatrix dep = static_matrix(m);
    auto always = [](const Model&, const State&, const StubbornResult&) { return true; };
    for (const State& q : reachable_states(m)) {
        std::vector<int> en = enabled(m, q);
        for (StarMode star : {StarMode::Left, StarMode::Right}) {
            for (int prot = 0; prot < m.action_count(); prot++) {
                auto b = deletion_minimal(m, q, star, true, {prot}, always, dep);
                if (!b)
                    continue;
                for (int beta : en) {
                    if (b->contains(beta))
                        continue;
                    State q2 = apply(m, q, beta);
                    if (star == StarMode::Right) {
                        bool no_disable = true;
                        for (int g : b->enabled_members(m, q))
                            if (!action_enabled(m, q2, g))
                                no_disable = false;
                        if (!no_disable)
                            continue;  // proviso for the right flavor
                    }
                    if (!validate_stubborn(m, q2, *b, dep).empty()) {
                        rep.fail("semi-stubborn set not preserved by " + m.action(beta).label +
                                 " at " + show_state(m, q));
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_left_mover_preservation(const Model& m) {
    SoundnessReport rep;
    DependencyMatrix dep = static_matrix(m);
    for (const State& q : reachable_states(m)) {
        for (int pid = 0; pid < m.process_count(); pid++) {
            if (!lmv(m, q, pid, dep))
                continue;
            for (auto& [beta, q2] : successors(m, q)) {
                if (m.action(beta).pid == pid)
                    continue;
                if (!lmv(m, q2, pid, dep)) {
                    rep.fail("left-mover property of process " + std::to_string(pid) +
                             " lost after " + m.action(beta).label + " at " + show_state(m, q));
                    return rep;
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_right_mover_preservation(const Model& m) {
    SoundnessReport rep;
    DependencyMatrix dep = static_matrix(m);
    for (const State& q1 : reachable_states(m)) {
        for (auto& [alpha, q2] : successors(m, q1)) {
            if (!rmv(m, q1, alpha, q2, dep))
                continue;
            int pid = m.action(alpha).pid;
            for (auto& [beta, q3] : successors(m, q2)) {
                if (m.action(beta).pid == pid)
                    continue;
                if (!action_enabled(m, q1, beta)) {
                    rep.fail("commuting path missing after right mover " +
                             m.action(alpha).label + " at " + show_state(m, q1));
                    return rep;
                }
                State q4 = apply(m, q1, beta);
                if (!(action_enabled(m, q4, alpha) && apply(m, q4, alpha) == q3)) {
                    rep.fail("right mover " + m.action(alpha).label +
                             " does not commute over " + m.action(beta).label + " at " +
                             show_state(m, q1));
                    return rep;
                }
                if (!rmv(m, q4, alpha, q3, dep)) {
                    rep.fail("right-mover property of " + m.action(alpha).label + " lost after " +
                             m.action(beta).label + " at " + show_state(m, q1));
                    return rep;
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_deletion_minimality(const Model& m) {
    SoundnessReport rep;
    DependencyMatrix dep = static_matrix(m);
    auto always = [](const Model&, const State&, const StubbornResult&) { return true; };
    for (const State& q : reachable_states(m)) {
        for (StarMode star : {StarMode::Left, StarMode::Right, StarMode::Strong}) {
            for (int prot = 0; prot < m.action_count(); prot++) {
                auto b = deletion_minimal(m, q, star, true, {prot}, always, dep);
                if (!b)
                    continue;
                for (int g : b->actions()) {
                    if (g == prot)
                        continue;
                    StubbornResult smaller = *b;
                    smaller.member[static_cast<std::size_t>(g)] = false;
                    if (validate_with_witnesses(m, q, smaller, dep).empty()) {
                        rep.fail("deletion result not minimal: " + m.action(g).label +
                                 " removable at " + show_state(m, q));
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_commutation_soundness(const Model& m, std::size_t state_bound) {
    SoundnessReport rep;
    for (int a = 0; a < m.action_count(); a++) {
        for (int b = 0; b < m.action_count(); b++) {
            if (a == b || m.action(a).pid == m.action(b).pid)
                continue;
            for (int mode = 0; mode < 4; mode++) {
                bool st = static_accords(m, a, b, static_cast<AccordMode>(mode));
                if (st && !exact_commutes(m, a, b, static_cast<AccordMode>(mode), state_bound)) {
                    rep.fail("static relation unsound for " + m.action(a).label + " / " +
                             m.action(b).label + " mode " + std::to_string(mode));
                    return rep;
                }
            }
            if (exact_commutes(m, a, b, AccordMode::Strong, state_bound)) {
                for (const State& q : reachable_states(m, state_bound)) {
                    if (action_enabled(m, q, a) && action_enabled(m, q, b)) {
                        if (!action_enabled(m, apply(m, q, a), b) ||
                            !action_enabled(m, apply(m, q, b), a)) {
                            rep.fail("strong commutation with mutual disabling: " +
                                     m.action(a).label + " / " + m.action(b).label);
                            return rep;
                        }
                    }
                }
            }
        }
    }
    return rep;
}

SoundnessReport check_commutation_agreement(const Model& m, std::size_t state_bound) {
    SoundnessReport rep;
    for (int a = 0; a < m.action_count(); a++)
        for (int b = 0; b < m.action_count(); b++) {
            if (a == b || m.action(a).pid == m.action(b).pid)
                continue;
            for (int mode = 0; mode < 4; mode++) {
                bool one = exact_commutes(m, a, b, static_cast<AccordMode>(mode), state_bound);
                bool two = exact_commutes_relational(m, a, b, static_cast<AccordMode>(mode),
                                                     state_bound);
                if (one != two) {
                    rep.fail("decision procedures disagree on " + m.action(a).label + " / " +
                             m.action(b).label + " mode " + std::to_string(mode));
                    return rep;
                }
            }
        }
    return rep;
}

SoundnessReport check_nes_correctness(const Model& m, int depth) {
    SoundnessReport rep;
    for (const State& q : reachable_states(m)) {
        for (int a = 0; a < m.action_count(); a++) {
            if (action_enabled(m, q, a))
                continue;
            auto candidates = nes_candidates(m, q, a);
            // walk every path of bounded length; the first state enabling
            // `a` must have fired a member of every candidate
            struct Item {
                State s;
                std::vector<int> path;
            };
            std::deque<Item> work{{q, {}}};
            while (!work.empty()) {
                Item it = std::move(work.front());
                work.pop_front();
                for (auto& [b, next] : successors(m, it.s)) {
                    std::vector<int> path = it.path;
                    path.push_back(b);
                    if (action_enabled(m, next, a)) {
                        for (const auto& cand : candidates) {
                            bool hit = false;
                            for (int c : cand)
                                if (std::find(path.begin(), path.end(), c) != path.end())
                                    hit = true;
                            if (!hit) {
                                rep.fail("enabling path misses a candidate NES of " +
                                         m.action(a).label + " from " + show_state(m, q));
                                return rep;
                            }
                        }
                        continue;  // prefix check suffices for longer paths
                    }
                    if (static_cast<int>(path.size()) < depth)
                        work.push_back({next, std::move(path)});
                }
            }
        }
    }
    return rep;
}

namespace {

ExprPtr remap_expr(const ExprPtr& e, const std::vector<int>& var_map) {
    switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
        return e;
    case Expr::Kind::Var:
        return Expr::var_ref(var_map[static_cast<std::size_t>(e->var)], e->name);
    case Expr::Kind::Unary:
        return Expr::unary(e->uop, remap_expr(e->lhs, var_map));
    case Expr::Kind::Binary:
        return Expr::binary(e->bop, remap_expr(e->lhs, var_map), remap_expr(e->rhs, var_map));
    }
    return e;
}

// rebuilds the model without the given action ids / variable indices;
// returns nullopt if the result would be degenerate
std::optional<Model> strip(const Model& m, const std::set<int>& drop_actions,
                           const std::set<int>& drop_vars) {
    for (int v : drop_vars)
        for (std::size_t a = 0; a < m.actions.size(); a++)
            if (!drop_actions.count(static_cast<int>(a))) {
                const auto& reads = m.action_reads[a];
                const auto& writes = m.action_writes[a];
                if (std::find(reads.begin(), reads.end(), v) != reads.end() ||
                    std::find(writes.begin(), writes.end(), v) != writes.end())
                    return std::nullopt;  // a surviving action still uses it
            }
    for (int v : drop_vars)
        if (std::find(m.property_reads.begin(), m.property_reads.end(), v) !=
            m.property_reads.end())
            return std::nullopt;

    Model out;
    out.name = m.name + "_min";
    std::vector<int> var_map(m.vars.size(), -1);
    for (std::size_t v = 0; v < m.vars.size(); v++) {
        if (drop_vars.count(static_cast<int>(v)))
            continue;
        var_map[v] = static_cast<int>(out.vars.size());
        out.vars.push_back(m.vars[v]);
    }
    out.property_y = remap_expr(m.property_y, var_map);
    bool any_action = false;
    for (const auto& p : m.processes) {
        Process np;
        np.pid = p.pid;
        np.name = p.name;
        np.loc_names = p.loc_names;
        np.initial_loc = p.initial_loc;
        for (int aid : p.action_ids) {
            if (drop_actions.count(aid))
                continue;
            ActionDescriptor a = m.actions[static_cast<std::size_t>(aid)];
            a.guard = remap_expr(a.guard, var_map);
            for (auto& u : a.updates) {
                u.var = var_map[static_cast<std::size_t>(u.var)];
                u.rhs = remap_expr(u.rhs, var_map);
            }
            if (a.hint.var >= 0)
                a.hint.var = var_map[static_cast<std::size_t>(a.hint.var)];
            a.id = static_cast<int>(out.actions.size());
            np.action_ids.push_back(a.id);
            out.actions.push_back(std::move(a));
            any_action = true;
        }
        out.processes.push_back(std::move(np));
    }
    if (!any_action)
        return std::nullopt;
    out.finalize();
    return out;
}

}  // namespace

Model minimize_model(const Model& m, const std::function<bool(const Model&)>& still_fails) {
    Model current = m;
    bool shrunk = true;
    while (shrunk) {
        shrunk = false;
        for (int a = current.action_count() - 1; a >= 0; a--) {
            auto candidate = strip(current, {a}, {});
            if (candidate && still_fails(*candidate)) {
                current = std::move(*candidate);
                shrunk = true;
            }
        }
        for (int v = static_cast<int>(current.vars.size()) - 1; v >= 0; v--) {
            auto candidate = strip(current, {}, {v});
            if (candidate && still_fails(*candidate)) {
                current = std::move(*candidate);
                shrunk = true;
            }
        }
    }
    return current;
}

DependencyMatrix broken_matrix(const Model& m) {
    DependencyMatrix d = static_matrix(m);
    // claim that everything commutes: blatantly unsound
    for (auto& bits : d.accords_bits)
        bits.assign(bits.size(), true);
    return d;
}

}  // namespace gclmc
