#ifndef GCLMC_POR_HPP
#define GCLMC_POR_HPP

#include "gclmc/explore.hpp"

namespace gclmc {

// Stubborn-set partial-order reduction preserving deadlocks and the
// invariant. Strong stubborn sets are chosen per state by closing every
// enabled seed and keeping the set with the fewest enabled actions; the
// visibility proviso widens sets that touch enabled visible actions, and
// the ignoring proviso re-expands the root of any bottom SCC that never
// selects one of its enabled actions.
ExplorationResult explore_por(const Model& m, const ExplorationOptions& opts = {},
                              StubbornAudit* audit = nullptr);

}  // namespace gclmc

#endif
