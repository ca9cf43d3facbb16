#ifndef GCLMC_STUBBORN_HPP
#define GCLMC_STUBBORN_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gclmc/commute.hpp"
#include "gclmc/model.hpp"

namespace gclmc {

// Which commutation the D1 closure demands of enabled members.
enum class StarMode { Right, Left, Strong };

inline AccordMode accord_of(StarMode s) {
    switch (s) {
    case StarMode::Right: return AccordMode::Right;
    case StarMode::Left: return AccordMode::Left;
    case StarMode::Strong: return AccordMode::Strong;
    }
    return AccordMode::Strong;
}

// A computed (semi-)stubborn set:
//   D0  unless semi: intersects the enabled set when it is nonempty
//   D1  enabled members carry all their star-dependent actions
//   D2  disabled members carry a necessary enabling set
struct StubbornResult {
    std::vector<bool> member;
    StarMode star = StarMode::Strong;
    bool semi = false;
    std::map<int, std::vector<int>> nes_witness;  // disabled member -> chosen NES

    bool contains(int a) const { return member[static_cast<std::size_t>(a)]; }
    std::vector<int> actions() const;
    std::vector<int> enabled_members(const Model& m, const State& s) const;
};

// Smallest D1/D2 fixpoint over the seed. NES candidates are chosen
// greedily (fewest newly added enabled actions, then fewest new actions,
// then lowest ids); exhaustive_nes instead branches over every candidate
// and keeps the result with the fewest enabled members.
StubbornResult closure_stubborn(const Model& m, const State& s, StarMode star,
                                std::vector<int> seed, const DependencyMatrix& dep,
                                bool exhaustive_nes = false);

// Starts from the full action set and repeatedly deletes non-protected
// actions, cascading members whose D1/D2 support breaks, until no single
// deletion survives. Returns a set satisfying the caller's constraint or
// nullopt if the procedure cannot reach one.
std::optional<StubbornResult> deletion_minimal(
    const Model& m, const State& s, StarMode star, bool semi,
    const std::vector<int>& protected_actions,
    const std::function<bool(const Model&, const State&, const StubbornResult&)>& constraint,
    const DependencyMatrix& dep);

struct StubbornViolation {
    enum class Kind { D0, D1, D2 } kind;
    int action = -1;  // the member at fault (unused for D0)
    int other = -1;   // D1: the dependent action missing from the set
    std::string detail;
};

// Re-derives D0 (unless semi), D1 and D2 from scratch; D2 is checked
// against fresh NES candidates, independent of the recorded witnesses.
std::vector<StubbornViolation> validate_stubborn(const Model& m, const State& s,
                                                 const StubbornResult& candidate,
                                                 const DependencyMatrix& dep);

// Like validate_stubborn but holds the candidate to its own recorded
// witnesses (used for minimality checks).
std::vector<StubbornViolation> validate_with_witnesses(const Model& m, const State& s,
                                                       const StubbornResult& candidate,
                                                       const DependencyMatrix& dep);

// Dynamic movers. lmv: some semi-left-stubborn set's enabled part is
// exactly the process's enabled part. rmv: some semi-right-stubborn set
// contains the action as its only enabled member and stays inside the
// process at the successor.
bool lmv(const Model& m, const State& s, int pid, const DependencyMatrix& dep,
         StubbornResult* witness = nullptr);
bool rmv(const Model& m, const State& q, int action, const State& q_next,
         const DependencyMatrix& dep, StubbornResult* witness = nullptr);

}  // namespace gclmc

#endif
