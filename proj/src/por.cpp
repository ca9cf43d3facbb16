#include "gclmc/por.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace gclmc {

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
    State state;
    std::vector<int> por;       // selected actions, ascending
    std::size_t next = 0;       // next successor to expand
    int index = -1;             // Tarjan numbering
    int lowlink = -1;
    bool on_stack = false;
    int scc = -1;               // assigned when the component closes
    bool expanded_full = false; // ignoring-proviso expansion applied
    int parent = -1;            // DFS tree edge for traces
    int parent_action = -1;
};

struct PorSearch {
    const Model& m;
    const ExplorationOptions& opts;
    StubbornAudit* audit;
    DependencyMatrix dep;
    VisibilitySets vis;

    std::vector<Node> nodes;
    std::unordered_map<State, int, StateHash> index_of;
    std::vector<int> tarjan_stack;
    int next_index = 0;
    int next_scc = 0;

    ExplorationResult res;
    Clock::time_point start = Clock::now();

    explicit PorSearch(const Model& model, const ExplorationOptions& o, StubbornAudit* a)
        : m(model), opts(o), audit(a),
          dep(o.dep_override != nullptr ? *o.dep_override : static_matrix(model)),
          vis(o.exact_visibility ? visibility_exact(model) : visibility(model)) {
        if (audit != nullptr && audit->dep == nullptr)
            audit->dep = &dep;
    }

    void check_limits() {
        if (nodes.size() > opts.max_states)
            throw ResourceLimit("state limit exceeded");
        if (opts.timeout_ms > 0 &&
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() >
                opts.timeout_ms)
            throw ResourceLimit("time limit exceeded");
    }

    // Smallest-enabled heuristic over all enabled seeds, then the
    // visibility proviso: a set touching an enabled visible action must
    // contain every visible action (re-closed afterwards).
    std::vector<int> select_por(const State& s) {
        std::vector<int> en = enabled(m, s);
        if (en.empty())
            return {};
        StubbornResult best;
        bool have = false;
        for (int seed : en) {
            StubbornResult r = closure_stubborn(m, s, StarMode::Strong, {seed}, dep,
                                                opts.exhaustive_nes);
            if (!have ||
                r.enabled_members(m, s).size() < best.enabled_members(m, s).size()) {
                best = r;
                have = true;
            }
        }
        bool touches_visible = false;
        for (int a : best.enabled_members(m, s))
            if (vis.visible[static_cast<std::size_t>(a)])
                touches_visible = true;
        if (touches_visible) {
            std::vector<int> seed = best.actions();
            for (int a = 0; a < m.action_count(); a++)
                if (vis.visible[static_cast<std::size_t>(a)])
                    seed.push_back(a);
            best = closure_stubborn(m, s, StarMode::Strong, seed, dep, false);
        }
        if (audit != nullptr)
            audit->record(m, s, best);
        std::vector<int> por;
        for (int a : en)
            if (best.contains(a))
                por.push_back(a);
        return por;
    }

    int intern(const State& s, int parent, int parent_action) {
        auto it = index_of.find(s);
        if (it != index_of.end())
            return it->second;
        int id = static_cast<int>(nodes.size());
        Node n;
        n.state = s;
        n.por = select_por(s);
        n.parent = parent;
        n.parent_action = parent_action;
        nodes.push_back(std::move(n));
        index_of.emplace(s, id);
        res.visited_bases.insert(s);
        check_limits();
        if (nodes[static_cast<std::size_t>(id)].por.empty()) {
            res.deadlock_count++;
            if (res.deadlocks.size() < opts.deadlock_list_cap)
                res.deadlocks.push_back(s);
        }
        return id;
    }

    Violation trace_to(int node_id, int last_action, const State& last_state) {
        std::vector<std::pair<int, State>> rev;
        rev.emplace_back(last_action, last_state);
        int cur = node_id;
        while (cur >= 0 && nodes[static_cast<std::size_t>(cur)].parent >= 0) {
            rev.emplace_back(nodes[static_cast<std::size_t>(cur)].parent_action,
                             nodes[static_cast<std::size_t>(cur)].state);
            cur = nodes[static_cast<std::size_t>(cur)].parent;
        }
        Violation v;
        v.trace.assign(rev.rbegin(), rev.rend());
        return v;
    }

    // Iterative Tarjan over the reduced relation. Returns true when a
    // violation ended the search.
    bool run() {
        State init = m.initial_state();
        if (!property_holds(m, init)) {
            res.violation = Violation{};
            return true;
        }
        int root = intern(init, -1, -1);
        std::vector<int> dfs{root};
        open(root);
        while (!dfs.empty()) {
            res.peak_queue = std::max(res.peak_queue, dfs.size());
            int v = dfs.back();
            Node& n = nodes[static_cast<std::size_t>(v)];
            if (n.next < n.por.size()) {
                int action = n.por[n.next++];
                res.transitions_taken++;
                State succ = apply(m, n.state, action);
                if (opts.keep_graph)
                    res.edges.emplace_back(n.state, action, succ);
                if (!property_holds(m, succ)) {
                    res.violation = trace_to(v, action, succ);
                    return true;
                }
                auto it = index_of.find(succ);
                if (it == index_of.end()) {
                    int w = intern(succ, v, action);
                    open(w);
                    dfs.push_back(w);
                } else {
                    Node& wn = nodes[static_cast<std::size_t>(it->second)];
                    if (wn.on_stack)
                        nodes[static_cast<std::size_t>(v)].lowlink =
                            std::min(nodes[static_cast<std::size_t>(v)].lowlink, wn.index);
                }
                continue;
            }
            // all successors done: close or re-expand
            if (n.lowlink == n.index && !try_close_component(v))
                continue;  // root was re-expanded, keep its frame
            dfs.pop_back();
            if (!dfs.empty()) {
                Node& p = nodes[static_cast<std::size_t>(dfs.back())];
                p.lowlink = std::min(p.lowlink, nodes[static_cast<std::size_t>(v)].lowlink);
            }
        }
        return false;
    }

    void open(int v) {
        Node& n = nodes[static_cast<std::size_t>(v)];
        n.index = n.lowlink = next_index++;
        n.on_stack = true;
        tarjan_stack.push_back(v);
    }

    // Pops the component rooted at v unless the ignoring proviso demands
    // re-expansion: a bottom component where some action is enabled but
    // never selected gets its root fully expanded and the search resumes.
    bool try_close_component(int v) {
        Node& root = nodes[static_cast<std::size_t>(v)];
        std::size_t base = tarjan_stack.size();
        while (base > 0 && nodes[static_cast<std::size_t>(tarjan_stack[base - 1])].index >=
                               root.index)
            base--;
        std::vector<int> comp(tarjan_stack.begin() + static_cast<std::ptrdiff_t>(base),
                              tarjan_stack.end());

        bool bottom = true;
        for (int w : comp) {
            const Node& wn = nodes[static_cast<std::size_t>(w)];
            for (int a : wn.por) {
                State succ = apply(m, wn.state, a);
                int t = index_of.at(succ);
                if (nodes[static_cast<std::size_t>(t)].scc >= 0) {
                    bottom = false;
                    break;
                }
            }
            if (!bottom)
                break;
        }
        if (bottom && !root.expanded_full) {
            std::vector<bool> enabled_in(static_cast<std::size_t>(m.action_count()), false);
            std::vector<bool> selected_in(static_cast<std::size_t>(m.action_count()), false);
            for (int w : comp) {
                const Node& wn = nodes[static_cast<std::size_t>(w)];
                for (int a : enabled(m, wn.state))
                    enabled_in[static_cast<std::size_t>(a)] = true;
                for (int a : wn.por)
                    selected_in[static_cast<std::size_t>(a)] = true;
            }
            bool ignored = false;
            for (std::size_t a = 0; a < enabled_in.size(); a++)
                if (enabled_in[a] && !selected_in[a])
                    ignored = true;
            if (ignored) {
                // keep the already-explored prefix so its edges are not
                // expanded (and counted) a second time
                std::vector<int> extra;
                for (int a : enabled(m, root.state))
                    if (std::find(root.por.begin(), root.por.end(), a) == root.por.end())
                        extra.push_back(a);
                root.next = root.por.size();
                root.por.insert(root.por.end(), extra.begin(), extra.end());
                root.expanded_full = true;
                return false;
            }
        }
        for (int w : comp) {
            nodes[static_cast<std::size_t>(w)].on_stack = false;
            nodes[static_cast<std::size_t>(w)].scc = next_scc;
        }
        next_scc++;
        tarjan_stack.resize(base);
        return true;
    }
};

}  // namespace

ExplorationResult explore_por(const Model& m, const ExplorationOptions& opts,
                              StubbornAudit* audit) {
    PorSearch search(m, opts, audit);
    search.res.strategy = "spor";
    search.run();
    search.res.states_visited = search.res.visited_bases.size();
    search.res.external_states = search.res.states_visited;
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

}  // namespace gclmc
