#ifndef GCLMC_EXPLORE_HPP
#define GCLMC_EXPLORE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gclmc/model.hpp"
#include "gclmc/stubborn.hpp"

namespace gclmc {

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DependencyMatrix;

struct ExplorationOptions {
    std::size_t max_states = 10000000;
    std::int64_t timeout_ms = 0;  // 0: no limit
    bool exhaustive_nes = false;  // POR closure flag
    bool subsumption = true;      // transaction-reduction pruning flag
    bool exact_visibility = false;  // refine visibility by enumeration
    bool keep_graph = false;        // record the explored edges
    std::size_t deadlock_list_cap = 4096;
    // test hook: replaces the static commutation relations
    const DependencyMatrix* dep_override = nullptr;
};

struct Violation {
    // (action, state) steps from the initial state; the last state
    // falsifies the property
    std::vector<std::pair<int, State>> trace;
};

struct ExplorationResult {
    std::string strategy;
    std::uint64_t states_visited = 0;
    std::uint64_t transitions_taken = 0;
    std::uint64_t external_states = 0;  // equals states_visited outside transaction reduction
    std::vector<State> deadlocks;       // capped; deadlock_count is the total
    std::uint64_t deadlock_count = 0;
    std::optional<Violation> violation;
    double wall_ms = 0.0;
    std::size_t peak_queue = 0;

    // validation extras (not part of the serialized record)
    std::unordered_set<State, StateHash> visited_bases;
    std::vector<State> external_list;
    // reduced/full edges as (source, action, target); filled when keep_graph
    std::vector<std::tuple<State, int, State>> edges;
    std::uint64_t stubborn_sets_validated = 0;
    std::uint64_t stubborn_violations = 0;
    // transaction-reduction bookkeeping
    std::uint64_t forced_terminal = 0;   // states made external for lack of local successors
    std::uint64_t forced_scc_roots = 0;  // roots of bottom post-phase components made external
    std::uint64_t outer_all_n_checks = 0;

    bool violated() const { return violation.has_value(); }
};

// Exhaustive reachability in deterministic BFS order: every state, every
// deadlock, the first property violation.
ExplorationResult explore_full(const Model& m, const ExplorationOptions& opts = {});

// Audit hook shared by the reduced explorers: every stubborn set produced
// during a run can be re-validated on the spot.
struct StubbornAudit {
    const DependencyMatrix* dep = nullptr;
    std::uint64_t validated = 0;
    std::uint64_t violations = 0;
    // (state, set) pairs kept for the preservation checks
    std::vector<std::pair<State, StubbornResult>> sets;
    bool keep_sets = false;

    void record(const Model& m, const State& s, const StubbornResult& r);
};

}  // namespace gclmc

#endif
