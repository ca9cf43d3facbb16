#ifndef GCLMC_MODEL_HPP
#define GCLMC_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gclmc/expr.hpp"

namespace gclmc {

struct VarDecl {
    std::string name;
    std::int32_t lo = 0;
    std::int32_t hi = 0;
    std::int32_t init = 0;
};

struct Update {
    int var = -1;
    ExprPtr rhs;
};

// Lock sugar survives desugaring so the static mover rules can see it.
struct ActionHint {
    enum class Kind { Plain, Acquire, Release };
    Kind kind = Kind::Plain;
    int var = -1;  // the lock variable for Acquire/Release
};

// One guarded command of one process: a single CFG edge whose statements
// execute atomically.
struct ActionDescriptor {
    int id = -1;  // global index, also the position in Model::actions
    int pid = -1;
    int source_loc = -1;
    int target_loc = -1;
    ExprPtr guard;  // includes any desugared lock guard
    std::vector<Update> updates;
    ActionHint hint;
    std::string label;  // printable form, e.g. "x := 1" or "acquire(m)"
};

struct Process {
    int pid = -1;
    std::string name;
    std::vector<std::string> loc_names;
    int initial_loc = 0;
    std::vector<int> action_ids;  // into Model::actions, textual order
};

// Global valuation plus per-process program counters. Value equality is
// structural, so identical states hash identically.
struct State {
    std::vector<std::int32_t> vals;
    std::vector<std::int32_t> pcs;

    bool operator==(const State&) const = default;
};

struct StateHash {
    std::size_t operator()(const State& s) const {
        std::size_t h = 1469598103934665603ull;
        auto mix = [&h](std::int32_t v) {
            h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
            h *= 1099511628211ull;
        };
        for (auto v : s.vals)
            mix(v);
        mix(-1);
        for (auto v : s.pcs)
            mix(v);
        return h;
    }
};

// Local transaction phase of one process: external, pre-phase (right
// moving) or post-phase (left moving). Subsumption orders R below L below N.
enum class Phase : std::uint8_t { R = 0, L = 1, N = 2 };

inline bool phase_le(Phase a, Phase b) {
    return static_cast<int>(a) <= static_cast<int>(b);
}

inline char phase_char(Phase p) {
    switch (p) {
    case Phase::R: return 'R';
    case Phase::L: return 'L';
    case Phase::N: return 'N';
    }
    return '?';
}

struct PhasedState {
    State base;
    std::vector<Phase> phases;

    bool operator==(const PhasedState&) const = default;
};

struct PhasedStateHash {
    std::size_t operator()(const PhasedState& s) const {
        std::size_t h = StateHash{}(s.base);
        for (auto p : s.phases)
            h = h * 1099511628211ull + static_cast<std::size_t>(p);
        return h;
    }
};

// A concurrent transition system over bounded integer variables. Immutable
// after construction; all operations on it are pure.
struct Model {
    std::string name;
    std::vector<VarDecl> vars;
    std::vector<Process> processes;
    std::vector<ActionDescriptor> actions;  // flat, grouped by pid then textual order
    ExprPtr property_y;

    // derived, filled by finalize()
    std::vector<std::vector<int>> action_reads;   // sorted var indices per action
    std::vector<std::vector<int>> action_writes;  // sorted var indices per action
    std::vector<int> property_reads;

    int var_index(const std::string& n) const;
    const ActionDescriptor& action(int id) const { return actions[static_cast<std::size_t>(id)]; }
    int process_count() const { return static_cast<int>(processes.size()); }
    int action_count() const { return static_cast<int>(actions.size()); }

    State initial_state() const;
    // actions of `pid` whose target is `loc`
    std::vector<int> actions_targeting(int pid, int loc) const;

    // checks the structural invariants and computes footprints;
    // throws ModelError on violation
    void finalize();
};

// Core successor semantics.
std::int64_t evaluate(const Model& m, const ExprPtr& e, const State& s);
bool action_enabled(const Model& m, const State& s, int action);
std::vector<int> enabled(const Model& m, const State& s);  // ascending action ids
State apply(const Model& m, const State& s, int action);   // throws ActionDisabled / DomainOverflow
std::vector<std::pair<int, State>> successors(const Model& m, const State& s);

inline bool property_holds(const Model& m, const State& s) {
    return evaluate_bool(m.property_y, s.vals);
}

}  // namespace gclmc

#endif
