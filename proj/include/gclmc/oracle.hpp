#ifndef GCLMC_ORACLE_HPP
#define GCLMC_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gclmc/explore.hpp"
#include "gclmc/tr.hpp"

namespace gclmc {

// ---- soundness of a reduced run against the exhaustive one ----

struct SoundnessReport {
    bool pass = true;
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void fail(std::string msg) {
        pass = false;
        failures.push_back(std::move(msg));
    }
};

// Checks reduced base states against the full reachable set, verdict
// equivalence, and (for deadlock-preserving strategies) deadlock-set
// equality. For transaction reduction, pruned deadlocks become a note.
SoundnessReport check_soundness(const Model& m, const ExplorationResult& full,
                                const ExplorationResult& reduced);

// ---- the reduction theorem's premise, checked by enumeration ----

// The transaction system of a model, enumerated without any reduction:
// every phased state reachable under the per-process phase rules, with the
// external alternative taken where a transaction cannot continue.
struct TransactionGraph {
    struct Edge {
        int from = 0;
        int to = 0;
        int action = 0;
        int pid = 0;
    };
    std::vector<PhasedState> states;
    std::vector<Edge> edges;
    int initial = 0;
};

TransactionGraph build_transaction_graph(const Model& m, const MoverOracle& oracle,
                                         std::size_t state_bound = 10000);

struct PremiseReport {
    // the nine premise conditions of the reduction theorem, in order:
    // 1 phase partition, 2 remote-phase invariance, 3 no post-to-pre step,
    // 4 pre-entry right-commutes, 5 post-exit left-commutes,
    // 6 post phases terminate locally, 7 phase abstraction is per-process,
    // 8 pre-entry preserves the property, 9 post-exit preserves its negation
    std::vector<bool> item_pass;
    std::vector<std::string> counterexamples;  // aligned with item_pass

    bool all_pass() const {
        for (bool b : item_pass)
            if (!b)
                return false;
        return true;
    }
};

PremiseReport check_reduction_premise(const Model& m, const TransactionGraph& g);

// Structural companion to the premise: every post-phase state lies on a
// path of the process's own steps starting at a state external for that
// process (transactions do not appear out of thin air).
SoundnessReport check_post_phase_actuation(const Model& m, const TransactionGraph& g);

// ---- random models for differential testing ----

struct RandomModelParams {
    int max_processes = 3;
    int max_actions_per_process = 4;
    int max_vars = 3;
    int max_domain = 3;  // domain size, values 0..max_domain-1
    bool lock_sugar = true;
    bool random_property = true;
};

Model random_model(std::uint64_t seed, const RandomModelParams& params = {});

// ---- second, independent commutation decision procedure ----

// Materializes the per-action step relations over the reachable states and
// decides each mode by relation algebra (inclusion / equality, with
// totality on the co-enabled domain for the strong relation).
bool exact_commutes_relational(const Model& m, int a, int b, AccordMode mode,
                               std::size_t state_bound = 1000000);

// ---- preservation properties of stubborn sets and movers ----

// Strong stubborn sets stay stubborn after a non-member step.
SoundnessReport check_strong_preservation(const Model& m);
// Semi-stubborn sets stay semi-stubborn after non-member steps (for the
// right flavor: when the step disables no member).
SoundnessReport check_semi_preservation(const Model& m);
// The dynamic left-mover predicate survives remote steps.
SoundnessReport check_left_mover_preservation(const Model& m);
// The dynamic right-mover predicate survives moving over remote steps.
SoundnessReport check_right_mover_preservation(const Model& m);
// Deletion results are single-deletion minimal under their witnesses.
SoundnessReport check_deletion_minimality(const Model& m);
// Static commutation never contradicts the exact relation; strong
// commutation implies mutual non-disabling.
SoundnessReport check_commutation_soundness(const Model& m, std::size_t state_bound = 10000);
// Both exact decision procedures agree on every pair and mode.
SoundnessReport check_commutation_agreement(const Model& m, std::size_t state_bound = 1000);
// Every candidate NES intersects every enabling path (паths up to `depth`).
SoundnessReport check_nes_correctness(const Model& m, int depth = 8);

// ---- counterexample shrinking ----

// Greedily removes actions, then variables, while `still_fails` keeps
// failing; returns the smallest model found.
Model minimize_model(const Model& m, const std::function<bool(const Model&)>& still_fails);

// test hook: corrupts the static relations so the validation suites must
// catch the unsoundness
DependencyMatrix broken_matrix(const Model& m);

}  // namespace gclmc

#endif
