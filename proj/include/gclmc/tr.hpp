#ifndef GCLMC_TR_HPP
#define GCLMC_TR_HPP

#include "gclmc/explore.hpp"

namespace gclmc {

// How the phase rules decide movability: dynamically through semi-stubborn
// sets, or from the per-action static classification.
struct MoverOracle {
    enum class Mode { Dynamic, Static };
    enum class MoverClass : std::uint8_t { Both, Left, Right, Non };

    Mode mode = Mode::Dynamic;
    std::vector<MoverClass> classes;  // static mode only

    bool right_or_both(int a) const {
        auto c = classes[static_cast<std::size_t>(a)];
        return c == MoverClass::Right || c == MoverClass::Both;
    }
    bool left_or_both(int a) const {
        auto c = classes[static_cast<std::size_t>(a)];
        return c == MoverClass::Left || c == MoverClass::Both;
    }
};

MoverOracle dynamic_movers();
// An action is a right (left) mover when it statically right (left)
// commutes with every action of every other process. Classifying as a
// non-mover is always safe.
MoverOracle classify_movers_static(const Model& m, const DependencyMatrix& dep);

// Caches the dynamic mover queries of one exploration.
struct MoverCache;

// Phase of the acting process after taking `action` from `q` with current
// phase `h_i`:
//   R  if h_i is not L, the action moves right and cannot disable the property
//   L  if the successor left-moves and no enabling visible local action waits
//   N  otherwise
Phase phase_step(const Model& m, const State& q, Phase h_i, int action, const State& q_next,
                 const MoverOracle& oracle, const VisibilitySets& vis, const DependencyMatrix& dep,
                 MoverCache* cache = nullptr, StubbornAudit* audit = nullptr);

// Transaction reduction per the two-level search: an outer queue of
// external (all-N) states and, per state and process, an inner Tarjan
// search of that process's transaction; internal states are pruned by
// phase subsumption and the roots of bottom post-phase components are
// forced external.
ExplorationResult explore_tr(const Model& m, const MoverOracle& oracle,
                             const ExplorationOptions& opts = {}, StubbornAudit* audit = nullptr);

// Independent recomputation of the reduced transaction system's external
// states: plain graph construction per transaction followed by an SCC
// pass, no subsumption. Used to cross-check explore_tr.
std::vector<State> reference_rts_externals(const Model& m, const MoverOracle& oracle,
                                           std::size_t state_bound = 100000);

}  // namespace gclmc

#endif
