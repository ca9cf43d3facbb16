#include "gclmc/tr.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <unordered_map>

namespace gclmc {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<int> enabled_of(const Model& m, const State& s, int pid) {
    std::vector<int> out;
    for (int a : m.processes[static_cast<std::size_t>(pid)].action_ids)
        if (action_enabled(m, s, a))
            out.push_back(a);
    return out;
}

}  // namespace

MoverOracle dynamic_movers() {
    MoverOracle o;
    o.mode = MoverOracle::Mode::Dynamic;
    return o;
}

MoverOracle classify_movers_static(const Model& m, const DependencyMatrix& dep) {
    MoverOracle o;
    o.mode = MoverOracle::Mode::Static;
    o.classes.resize(static_cast<std::size_t>(m.action_count()));
    for (int a = 0; a < m.action_count(); a++) {
        bool right = true;
        bool left = true;
        for (int b = 0; b < m.action_count(); b++) {
            if (m.action(b).pid == m.action(a).pid)
                continue;
            right = right && dep.accords(AccordMode::Right, a, b);
            left = left && dep.accords(AccordMode::Left, a, b);
        }
        using C = MoverOracle::MoverClass;
        o.classes[static_cast<std::size_t>(a)] =
            right ? (left ? C::Both : C::Right) : (left ? C::Left : C::Non);
    }
    return o;
}

struct MoverCache {
    const Model& m;
    const DependencyMatrix& dep;
    StubbornAudit* audit = nullptr;
    std::unordered_map<State, std::vector<signed char>, StateHash> lmv_memo;
    std::unordered_map<State, std::unordered_map<int, signed char>, StateHash> rmv_memo;

    MoverCache(const Model& model, const DependencyMatrix& d) : m(model), dep(d) {}

    bool lmv_at(const State& s, int pid) {
        auto& row = lmv_memo[s];
        if (row.empty())
            row.assign(static_cast<std::size_t>(m.process_count()), -1);
        signed char& slot = row[static_cast<std::size_t>(pid)];
        if (slot < 0) {
            StubbornResult witness;
            bool ok = lmv(m, s, pid, dep, &witness);
            if (ok && audit != nullptr)
                audit->record(m, s, witness);
            slot = ok ? 1 : 0;
        }
        return slot == 1;
    }

    bool rmv_at(const State& q, int action, const State& q_next) {
        auto& row = rmv_memo[q];
        auto it = row.find(action);
        if (it == row.end()) {
            StubbornResult witness;
            bool ok = rmv(m, q, action, q_next, dep, &witness);
            if (ok && audit != nullptr)
                audit->record(m, q, witness);
            it = row.emplace(action, ok ? 1 : 0).first;
        }
        return it->second == 1;
    }
};

Phase phase_step(const Model& m, const State& q, Phase h_i, int action, const State& q_next,
                 const MoverOracle& oracle, const VisibilitySets& vis, const DependencyMatrix& dep,
                 MoverCache* cache, StubbornAudit* audit) {
    int pid = m.action(action).pid;
    MoverCache local(m, dep);
    if (cache == nullptr)
        cache = &local;
    if (audit != nullptr && cache->audit == nullptr)
        cache->audit = audit;

    auto right_moves = [&] {
        if (oracle.mode == MoverOracle::Mode::Static)
            return oracle.right_or_both(action);
        return cache->rmv_at(q, action, q_next);
    };
    auto left_moves_after = [&] {
        if (oracle.mode == MoverOracle::Mode::Static) {
            for (int a : enabled_of(m, q_next, pid))
                if (!oracle.left_or_both(a))
                    return false;
            return true;
        }
        return cache->lmv_at(q_next, pid);
    };

    if (h_i != Phase::L && !vis.disabling[static_cast<std::size_t>(action)] && right_moves())
        return Phase::R;
    bool enabling_local_visible = false;
    for (int a : enabled_of(m, q_next, pid))
        if (vis.enabling[static_cast<std::size_t>(a)])
            enabling_local_visible = true;
    if (!enabling_local_visible && left_moves_after()) {
        // a post-phase never steps back into a pre-phase
        return Phase::L;
    }
    return Phase::N;
}

namespace {

struct InnerKey {
    State base;
    Phase h;
    bool operator==(const InnerKey&) const = default;
};

struct InnerKeyHash {
    std::size_t operator()(const InnerKey& k) const {
        return StateHash{}(k.base) * 31 + static_cast<std::size_t>(k.h);
    }
};

struct InnerNode {
    State base;
    Phase h = Phase::N;
    std::vector<int> local;  // enabled actions of the transaction's process
    std::size_t next = 0;
    int index = -1;
    int lowlink = -1;
    bool on_stack = false;
    int scc = -1;
    int parent = -1;
    int parent_action = -1;
};

struct OuterInfo {
    State pred;          // previous external state
    std::vector<int> actions;  // transaction path from pred
    bool has_pred = false;
};

struct TrSearch {
    const Model& m;
    const MoverOracle& oracle;
    const ExplorationOptions& opts;
    DependencyMatrix dep;
    VisibilitySets vis;
    MoverCache cache;

    std::deque<State> outer_queue;
    std::unordered_map<State, OuterInfo, StateHash> outer_seen;
    std::unordered_set<State, StateHash> deadlock_bases;

    // per-transaction scratch
    std::vector<InnerNode> nodes;
    std::unordered_map<InnerKey, int, InnerKeyHash> node_of;
    std::vector<int> tarjan_stack;
    int next_index = 0;
    int next_scc = 0;

    ExplorationResult res;
    Clock::time_point start = Clock::now();

    TrSearch(const Model& model, const MoverOracle& o, const ExplorationOptions& op,
             StubbornAudit* audit)
        : m(model), oracle(o), opts(op),
          dep(op.dep_override != nullptr ? *op.dep_override : static_matrix(model)),
          vis(op.exact_visibility ? visibility_exact(model) : visibility(model)),
          cache(model, dep) {
        cache.audit = audit;
        if (audit != nullptr && audit->dep == nullptr)
            audit->dep = &dep;
    }

    void check_limits() {
        if (res.visited_bases.size() > opts.max_states)
            throw ResourceLimit("state limit exceeded");
        if (opts.timeout_ms > 0 &&
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() >
                opts.timeout_ms)
            throw ResourceLimit("time limit exceeded");
    }

    void touch_base(const State& s) {
        if (res.visited_bases.insert(s).second)
            check_limits();
    }

    void note_deadlock(const State& s) {
        if (enabled(m, s).empty() && deadlock_bases.insert(s).second) {
            res.deadlock_count++;
            if (res.deadlocks.size() < opts.deadlock_list_cap)
                res.deadlocks.push_back(s);
        }
    }

    // New external state: the only phase the transaction search ever
    // modifies is its own process's and it is N here, so the full phase
    // vector is all-N.
    void propagate(const State& q, const State& pred, std::vector<int> actions, bool has_pred) {
        res.outer_all_n_checks++;
        if (outer_seen.count(q))
            return;
        OuterInfo info;
        info.pred = pred;
        info.actions = std::move(actions);
        info.has_pred = has_pred;
        outer_seen.emplace(q, std::move(info));
        outer_queue.push_back(q);
        touch_base(q);
        note_deadlock(q);
    }

    Violation trace_to(const State& outer_base, const std::vector<int>& inner_actions) {
        // stitch the external-state chain to the inner path, then replay
        std::vector<std::vector<int>> segments{inner_actions};
        State cur = outer_base;
        while (true) {
            const OuterInfo& info = outer_seen.at(cur);
            if (!info.has_pred)
                break;
            segments.push_back(info.actions);
            cur = info.pred;
        }
        Violation v;
        State s = m.initial_state();
        for (auto seg = segments.rbegin(); seg != segments.rend(); ++seg) {
            for (int a : *seg) {
                s = apply(m, s, a);
                v.trace.emplace_back(a, s);
            }
        }
        return v;
    }

    std::vector<int> inner_path(int node_id, int last_action) const {
        std::vector<int> rev{last_action};
        int cur = node_id;
        while (cur >= 0 && nodes[static_cast<std::size_t>(cur)].parent >= 0) {
            rev.push_back(nodes[static_cast<std::size_t>(cur)].parent_action);
            cur = nodes[static_cast<std::size_t>(cur)].parent;
        }
        return {rev.rbegin(), rev.rend()};
    }

    int make_node(const State& base, Phase h, int parent, int parent_action, int pid) {
        int id = static_cast<int>(nodes.size());
        InnerNode n;
        n.base = base;
        n.h = h;
        n.local = enabled_of(m, base, pid);
        n.parent = parent;
        n.parent_action = parent_action;
        n.index = n.lowlink = next_index++;
        n.on_stack = true;
        nodes.push_back(std::move(n));
        node_of.emplace(InnerKey{base, h}, id);
        tarjan_stack.push_back(id);
        return id;
    }

    // true when the whole run should stop (violation found)
    bool transaction(const State& origin, int pid) {
        nodes.clear();
        node_of.clear();
        tarjan_stack.clear();
        next_index = 0;
        next_scc = 0;

        if (enabled_of(m, origin, pid).empty())
            return false;
        std::vector<int> dfs{make_node(origin, Phase::N, -1, -1, pid)};
        while (!dfs.empty()) {
            res.peak_queue = std::max(res.peak_queue, outer_queue.size() + dfs.size());
            int v = dfs.back();
            if (nodes[static_cast<std::size_t>(v)].next <
                nodes[static_cast<std::size_t>(v)].local.size()) {
                int action =
                    nodes[static_cast<std::size_t>(v)].local[nodes[static_cast<std::size_t>(v)].next++];
                State q = nodes[static_cast<std::size_t>(v)].base;
                Phase h = nodes[static_cast<std::size_t>(v)].h;
                res.transitions_taken++;
                State succ = apply(m, q, action);
                touch_base(succ);
                if (opts.keep_graph)
                    res.edges.emplace_back(q, action, succ);
                if (!property_holds(m, succ)) {
                    res.violation = trace_to(origin, inner_path(v, action));
                    return true;
                }
                Phase hs = phase_step(m, q, h, action, succ, oracle, vis, dep, &cache);
                if (hs != Phase::N && enabled_of(m, succ, pid).empty()) {
                    // no local continuation: take the always-allowed
                    // external alternative instead of a dead transaction
                    hs = Phase::N;
                    res.forced_terminal++;
                }
                if (hs == Phase::N) {
                    propagate(succ, origin, inner_path(v, action), true);
                    continue;
                }
                if (opts.subsumption && hs == Phase::R && outer_seen.count(succ)) {
                    // a known external state explores the same futures
                    continue;
                }
                auto it = node_of.find(InnerKey{succ, hs});
                if (it != node_of.end()) {
                    InnerNode& w = nodes[static_cast<std::size_t>(it->second)];
                    if (w.on_stack)
                        nodes[static_cast<std::size_t>(v)].lowlink =
                            std::min(nodes[static_cast<std::size_t>(v)].lowlink, w.index);
                    continue;
                }
                dfs.push_back(make_node(succ, hs, v, action, pid));
                continue;
            }
            if (nodes[static_cast<std::size_t>(v)].lowlink ==
                nodes[static_cast<std::size_t>(v)].index)
                close_component(v, origin, pid);
            dfs.pop_back();
            if (!dfs.empty()) {
                InnerNode& p = nodes[static_cast<std::size_t>(dfs.back())];
                p.lowlink = std::min(p.lowlink, nodes[static_cast<std::size_t>(v)].lowlink);
            }
        }
        return false;
    }

    // Pops the component; if it is a bottom component entirely in the
    // post-phase, its root is made external (the alternative N phase is
    // allowed wherever L was).
    void close_component(int v, const State& origin, int pid) {
        std::size_t base = tarjan_stack.size();
        while (base > 0 &&
               nodes[static_cast<std::size_t>(tarjan_stack[base - 1])].index >=
                   nodes[static_cast<std::size_t>(v)].index)
            base--;
        std::vector<int> comp(tarjan_stack.begin() + static_cast<std::ptrdiff_t>(base),
                              tarjan_stack.end());
        bool all_post = true;
        for (int w : comp)
            all_post = all_post && nodes[static_cast<std::size_t>(w)].h == Phase::L;
        bool bottom = all_post;
        if (all_post) {
            for (int w : comp) {
                const InnerNode& wn = nodes[static_cast<std::size_t>(w)];
                for (int action : wn.local) {
                    State succ = apply(m, wn.base, action);
                    Phase hs = phase_step(m, wn.base, wn.h, action, succ, oracle, vis, dep, &cache);
                    if (hs == Phase::N || enabled_of(m, succ, pid).empty()) {
                        bottom = false;  // the component already reaches an external state
                        break;
                    }
                    auto it = node_of.find(InnerKey{succ, hs});
                    if (it == node_of.end() ||
                        nodes[static_cast<std::size_t>(it->second)].scc >= 0 ||
                        nodes[static_cast<std::size_t>(it->second)].index <
                            nodes[static_cast<std::size_t>(v)].index) {
                        bottom = false;
                        break;
                    }
                }
                if (!bottom)
                    break;
            }
        }
        if (all_post && bottom) {
            const InnerNode& root = nodes[static_cast<std::size_t>(v)];
            res.forced_scc_roots++;
            propagate(root.base, origin,
                      root.parent >= 0 ? inner_path(root.parent, root.parent_action)
                                       : std::vector<int>{},
                      root.parent >= 0);
        }
        for (int w : comp) {
            nodes[static_cast<std::size_t>(w)].on_stack = false;
            nodes[static_cast<std::size_t>(w)].scc = next_scc;
        }
        next_scc++;
        tarjan_stack.resize(base);
    }

    bool run() {
        State init = m.initial_state();
        touch_base(init);
        if (!property_holds(m, init)) {
            res.violation = Violation{};
            return true;
        }
        propagate(init, init, {}, false);
        while (!outer_queue.empty()) {
            State q = outer_queue.front();
            outer_queue.pop_front();
            res.external_list.push_back(q);
            for (int pid = 0; pid < m.process_count(); pid++)
                if (transaction(q, pid))
                    return true;
        }
        return false;
    }
};

}  // namespace

ExplorationResult explore_tr(const Model& m, const MoverOracle& oracle,
                             const ExplorationOptions& opts, StubbornAudit* audit) {
    TrSearch search(m, oracle, opts, audit);
    search.res.strategy = oracle.mode == MoverOracle::Mode::Static ? "tr" : "str";
    search.run();
    search.res.states_visited = search.res.visited_bases.size();
    search.res.external_states = search.res.external_list.size();
    if (audit != nullptr) {
        search.res.stubborn_sets_validated = audit->validated;
        search.res.stubborn_violations = audit->violations;
        if (audit->dep == &search.dep)
            audit->dep = nullptr;
    }
    search.res.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - search.start).count();
    return search.res;
}

std::vector<State> reference_rts_externals(const Model& m, const MoverOracle& oracle,
                                           std::size_t state_bound) {
    DependencyMatrix dep = static_matrix(m);
    VisibilitySets vis = visibility(m);
    MoverCache cache(m, dep);

    std::unordered_set<State, StateHash> seen;
    std::deque<State> queue;
    State init = m.initial_state();
    seen.insert(init);
    queue.push_back(init);
    std::vector<State> order;

    while (!queue.empty()) {
        State q0 = queue.front();
        queue.pop_front();
        order.push_back(q0);
        for (int pid = 0; pid < m.process_count(); pid++) {
            // build the whole transaction graph, no pruning
            struct RefNode {
                State base;
                Phase h;
                std::vector<std::pair<int, int>> succ;  // (action, node) for internal successors
            };
            std::vector<RefNode> nodes;
            std::unordered_map<InnerKey, int, InnerKeyHash> ids;
            std::vector<State> endpoints;
            auto intern = [&](const State& s, Phase h) {
                auto it = ids.find(InnerKey{s, h});
                if (it != ids.end())
                    return it->second;
                int id = static_cast<int>(nodes.size());
                nodes.push_back({s, h, {}});
                ids.emplace(InnerKey{s, h}, id);
                if (nodes.size() > state_bound)
                    throw StateSpaceTooLarge("transaction graph exceeds bound");
                return id;
            };
            int start = intern(q0, Phase::N);
            for (int v = 0; v < static_cast<int>(nodes.size()); v++) {
                State base = nodes[static_cast<std::size_t>(v)].base;
                Phase h = nodes[static_cast<std::size_t>(v)].h;
                for (int action : enabled_of(m, base, pid)) {
                    State succ = apply(m, base, action);
                    Phase hs = phase_step(m, base, h, action, succ, oracle, vis, dep, &cache);
                    if (hs != Phase::N && enabled_of(m, succ, pid).empty())
                        hs = Phase::N;
                    if (hs == Phase::N) {
                        endpoints.push_back(succ);
                    } else {
                        int child = intern(succ, hs);  // may grow `nodes`
                        nodes[static_cast<std::size_t>(v)].succ.emplace_back(action, child);
                    }
                }
            }
            // bottom post-phase components contribute их roots; DFS in the
            // same successor order as the on-the-fly search to pick the
            // same roots
            std::vector<int> index(nodes.size(), -1);
            std::vector<int> lowlink(nodes.size(), 0);
            std::vector<bool> on_stack(nodes.size(), false);
            std::vector<int> scc_of(nodes.size(), -1);
            std::vector<int> stack;
            int next_index = 0;
            int next_scc = 0;
            struct Frame {
                int v;
                std::size_t next;
            };
            std::vector<Frame> frames{{start, 0}};
            index[static_cast<std::size_t>(start)] = lowlink[static_cast<std::size_t>(start)] =
                next_index++;
            on_stack[static_cast<std::size_t>(start)] = true;
            stack.push_back(start);
            auto close = [&](int v) {
                std::size_t base_idx = stack.size();
                while (base_idx > 0 &&
                       index[static_cast<std::size_t>(stack[base_idx - 1])] >=
                           index[static_cast<std::size_t>(v)])
                    base_idx--;
                std::vector<int> comp(stack.begin() + static_cast<std::ptrdiff_t>(base_idx),
                                      stack.end());
                bool all_post = true;
                bool bottom = true;
                for (int w : comp) {
                    all_post = all_post && nodes[static_cast<std::size_t>(w)].h == Phase::L;
                    const auto& wn = nodes[static_cast<std::size_t>(w)];
                    if (enabled_of(m, wn.base, pid).size() != wn.succ.size())
                        bottom = false;  // some edge already ended externally
                    for (auto& [a, t] : wn.succ) {
                        (void)a;
                        if (scc_of[static_cast<std::size_t>(t)] >= 0 ||
                            index[static_cast<std::size_t>(t)] < index[static_cast<std::size_t>(v)])
                            bottom = false;
                    }
                }
                if (all_post && bottom)
                    endpoints.push_back(nodes[static_cast<std::size_t>(v)].base);
                for (int w : comp) {
                    on_stack[static_cast<std::size_t>(w)] = false;
                    scc_of[static_cast<std::size_t>(w)] = next_scc;
                }
                next_scc++;
                stack.resize(base_idx);
            };
            while (!frames.empty()) {
                Frame& f = frames.back();
                auto& succ = nodes[static_cast<std::size_t>(f.v)].succ;
                if (f.next < succ.size()) {
                    int t = succ[f.next++].second;
                    if (index[static_cast<std::size_t>(t)] < 0) {
                        index[static_cast<std::size_t>(t)] =
                            lowlink[static_cast<std::size_t>(t)] = next_index++;
                        on_stack[static_cast<std::size_t>(t)] = true;
                        stack.push_back(t);
                        frames.push_back({t, 0});
                    } else if (on_stack[static_cast<std::size_t>(t)]) {
                        lowlink[static_cast<std::size_t>(f.v)] = std::min(
                            lowlink[static_cast<std::size_t>(f.v)],
                            index[static_cast<std::size_t>(t)]);
                    }
                    continue;
                }
                int v = f.v;
                frames.pop_back();
                if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)])
                    close(v);
                if (!frames.empty())
                    lowlink[static_cast<std::size_t>(frames.back().v)] =
                        std::min(lowlink[static_cast<std::size_t>(frames.back().v)],
                                 lowlink[static_cast<std::size_t>(v)]);
            }
            for (const State& e : endpoints) {
                if (seen.insert(e).second) {
                    if (seen.size() > state_bound)
                        throw StateSpaceTooLarge("external set exceeds bound");
                    queue.push_back(e);
                }
            }
        }
    }
    return order;
}

}  // namespace gclmc
