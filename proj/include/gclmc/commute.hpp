#ifndef GCLMC_COMMUTE_HPP
#define GCLMC_COMMUTE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "gclmc/model.hpp"

namespace gclmc {

// The four commutation relations between actions of distinct processes:
// right-commute (the first action can be delayed past the second), left
// (prioritized), strong (commutes wherever both are enabled, neither
// disables the other) and full.
enum class AccordMode { Right = 0, Left = 1, Strong = 2, Full = 3 };

// Per-mode answers to "does a certainly commute with b". Same-process
// pairs never accord (shared program counter). The static matrix is a
// sound under-approximation of the exact one: it never says "commutes"
// where the exact relation says "does not".
struct DependencyMatrix {
    bool exact = false;
    int action_count = 0;
    std::array<std::vector<bool>, 4> accords_bits;

    bool accords(AccordMode mode, int a, int b) const {
        return accords_bits[static_cast<std::size_t>(mode)]
                           [static_cast<std::size_t>(a) * static_cast<std::size_t>(action_count) +
                            static_cast<std::size_t>(b)];
    }
    // dependent in the sense of the stubborn-set closure: same process or
    // commutation not certain
    bool dependent(AccordMode mode, int a, int b) const { return !accords(mode, a, b); }
};

// Static approximation from footprints and lock hints.
bool static_accords(const Model& m, int a, int b, AccordMode mode);
DependencyMatrix static_matrix(const Model& m);

// Exact relation decided over the reachable states (actions are
// deterministic, so the relational definitions reduce to square checks).
// Throws StateSpaceTooLarge beyond the bound.
bool exact_commutes(const Model& m, int a, int b, AccordMode mode, std::size_t state_bound = 1000000);
DependencyMatrix exact_matrix(const Model& m, std::size_t state_bound = 1000000);

// Candidate necessary enabling sets for an action disabled at `s`:
// if the guard is false, all actions writing a guard variable; if the
// program counter is elsewhere, all actions of the same process entering
// the source location. Both when both causes hold. Throws NotDisabled.
std::vector<std::vector<int>> nes_candidates(const Model& m, const State& s, int action);

struct VisibilitySets {
    std::vector<bool> enabling;   // may turn the property from false to true
    std::vector<bool> disabling;  // may turn it from true to false
    std::vector<bool> visible;    // union

    bool any_visible() const {
        for (bool b : visible)
            if (b)
                return true;
        return false;
    }
};

// Static over-approximation: writers of property variables are both
// enabling and disabling.
VisibilitySets visibility(const Model& m);
// Exact per-action refinement by state-space enumeration.
VisibilitySets visibility_exact(const Model& m, std::size_t state_bound = 1000000);

// Reachable states in deterministic BFS order (shared helper; also the
// cache behind the exact relations).
std::vector<State> reachable_states(const Model& m, std::size_t state_bound = 1000000);

}  // namespace gclmc

#endif
