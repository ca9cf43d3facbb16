#include "gclmc/explore.hpp"

#include <chrono>
#include <deque>

namespace gclmc {

namespace {

using Clock = std::chrono::steady_clock;

struct Deadline {
    Clock::time_point start = Clock::now();
    std::int64_t timeout_ms = 0;

    void check() const {
        if (timeout_ms > 0 &&
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() >
                timeout_ms)
            throw ResourceLimit("time limit exceeded");
    }
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
};

}  // namespace

void StubbornAudit::record(const Model& m, const State& s, const StubbornResult& r) {
    validated++;
    if (dep != nullptr && !validate_stubborn(m, s, r, *dep).empty())
        violations++;
    if (keep_sets)
        sets.emplace_back(s, r);
}

ExplorationResult explore_full(const Model& m, const ExplorationOptions& opts) {
    Deadline deadline{Clock::now(), opts.timeout_ms};
    ExplorationResult res;
    res.strategy = "none";

    std::unordered_map<State, std::pair<State, int>, StateHash> parent;  // child -> (pred, action)
    std::deque<State> queue;
    State init = m.initial_state();
    res.visited_bases.insert(init);
    queue.push_back(init);

    auto build_trace = [&](State bad) {
        Violation v;
        std::vector<std::pair<int, State>> rev;
        State cur = bad;
        while (!(cur == init)) {
            auto it = parent.find(cur);
            rev.emplace_back(it->second.second, cur);
            cur = it->second.first;
        }
        v.trace.assign(rev.rbegin(), rev.rend());
        return v;
    };

    if (!property_holds(m, init)) {
        res.violation = Violation{};
        res.states_visited = 1;
        res.external_states = 1;
        res.wall_ms = deadline.elapsed_ms();
        return res;
    }

    while (!queue.empty()) {
        deadline.check();
        res.peak_queue = std::max(res.peak_queue, queue.size());
        State s = queue.front();
        queue.pop_front();
        auto succs = successors(m, s);
        if (succs.empty()) {
            res.deadlock_count++;
            if (res.deadlocks.size() < opts.deadlock_list_cap)
                res.deadlocks.push_back(s);
        }
        for (auto& [a, next] : succs) {
            res.transitions_taken++;
            if (opts.keep_graph)
                res.edges.emplace_back(s, a, next);
            if (res.visited_bases.insert(next).second) {
                if (res.visited_bases.size() > opts.max_states)
                    throw ResourceLimit("state limit exceeded");
                parent.emplace(next, std::make_pair(s, a));
                if (!property_holds(m, next)) {
                    res.violation = build_trace(next);
                    res.states_visited = res.visited_bases.size();
                    res.external_states = res.states_visited;
                    res.wall_ms = deadline.elapsed_ms();
                    return res;
                }
                queue.push_back(next);
            }
        }
    }
    res.states_visited = res.visited_bases.size();
    res.external_states = res.states_visited;
    res.wall_ms = deadline.elapsed_ms();
    return res;
}

}  // namespace gclmc
