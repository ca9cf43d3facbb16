#include "gclmc/stubborn.hpp"

#include <algorithm>
#include <deque>

namespace gclmc {

std::vector<int> StubbornResult::actions() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < member.size(); i++)
        if (member[i])
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> StubbornResult::enabled_members(const Model& m, const State& s) const {
    std::vector<int> out;
    for (int a : actions())
        if (action_enabled(m, s, a))
            out.push_back(a);
    return out;
}

namespace {

struct ClosureState {
    const Model& m;
    const State& s;
    StarMode star;
    const DependencyMatrix& dep;
};

int count_new_enabled(const ClosureState& cs, const std::vector<bool>& member,
                      const std::vector<int>& candidate) {
    int n = 0;
    for (int a : candidate)
        if (!member[static_cast<std::size_t>(a)] && action_enabled(cs.m, cs.s, a))
            n++;
    return n;
}

// One worklist pass closing the seed under D1 and D2 with a fixed NES
// choice policy; used both by the greedy closure and by each branch of the
// exhaustive search.
StubbornResult close_with_policy(
    const ClosureState& cs, std::vector<int> seed,
    const std::function<std::size_t(const std::vector<std::vector<int>>&, const std::vector<bool>&)>&
        pick) {
    StubbornResult r;
    r.star = cs.star;
    r.member.assign(static_cast<std::size_t>(cs.m.action_count()), false);
    std::deque<int> work;
    auto add = [&](int a) {
        if (!r.member[static_cast<std::size_t>(a)]) {
            r.member[static_cast<std::size_t>(a)] = true;
            work.push_back(a);
        }
    };
    for (int a : seed)
        add(a);
    AccordMode mode = accord_of(cs.star);
    while (!work.empty()) {
        int a = work.front();
        work.pop_front();
        if (action_enabled(cs.m, cs.s, a)) {
            for (int b = 0; b < cs.m.action_count(); b++)
                if (b != a && cs.dep.dependent(mode, a, b))
                    add(b);
        } else {
            auto candidates = nes_candidates(cs.m, cs.s, a);
            std::size_t chosen = pick(candidates, r.member);
            r.nes_witness[a] = candidates[chosen];
            for (int b : candidates[chosen])
                add(b);
        }
    }
    return r;
}

// fewest newly added enabled actions, ties by lowest action ids
std::size_t greedy_pick(const ClosureState& cs, const std::vector<std::vector<int>>& candidates,
                        const std::vector<bool>& member) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); i++) {
        int en_i = count_new_enabled(cs, member, candidates[i]);
        int en_b = count_new_enabled(cs, member, candidates[best]);
        if (en_i < en_b || (en_i == en_b && candidates[i] < candidates[best]))
            best = i;
    }
    return best;
}

}  // namespace

StubbornResult closure_stubborn(const Model& m, const State& s, StarMode star,
                                std::vector<int> seed, const DependencyMatrix& dep,
                                bool exhaustive_nes) {
    ClosureState cs{m, s, star, dep};
    if (seed.empty()) {
        std::vector<int> en = enabled(m, s);
        if (en.empty())
            throw ModelError("closure needs a seed or an enabled action");
        seed.push_back(en.front());
    }
    if (!exhaustive_nes) {
        return close_with_policy(cs, seed, [&](const auto& cands, const auto& member) {
            return greedy_pick(cs, cands, member);
        });
    }

    // exhaustive mode: branch over NES choices by fixing the k-th decision
    // and closing greedily below it; keeps the set with fewest enabled
    // members (ties: fewer members)
    StubbornResult best = closure_stubborn(m, s, star, seed, dep, false);
    auto score = [&](const StubbornResult& r) {
        return std::make_pair(r.enabled_members(m, s).size(), r.actions().size());
    };
    std::deque<std::vector<std::size_t>> branch_queue;
    branch_queue.push_back({});
    std::size_t explored = 0;
    while (!branch_queue.empty() && explored < 4096) {
        std::vector<std::size_t> fixed = branch_queue.front();
        branch_queue.pop_front();
        explored++;
        std::size_t decision = 0;
        std::size_t fanout = 0;
        auto pick = [&](const std::vector<std::vector<int>>& cands,
                        const std::vector<bool>& member) -> std::size_t {
            std::size_t idx = decision < fixed.size() ? fixed[decision]
                                                      : greedy_pick(cs, cands, member);
            if (decision == fixed.size())
                fanout = cands.size();
            decision++;
            if (idx >= cands.size())
                idx = 0;
            return idx;
        };
        StubbornResult r = close_with_policy(cs, seed, pick);
        if (score(r) < score(best))
            best = r;
        // enqueue the alternatives of the first free decision
        if (fixed.size() < decision && fanout > 1) {
            for (std::size_t alt = 0; alt < fanout; alt++) {
                auto next = fixed;
                next.push_back(alt);
                branch_queue.push_back(next);
            }
        }
    }
    return best;
}

namespace {

// Removes `removed` and everything whose D1/D2 support collapses with it.
// Returns false if a protected action is lost or D0 breaks (when !semi).
bool repair_after_delete(const Model& m, const State& s, StarMode star,
                         const DependencyMatrix& dep, bool semi,
                         const std::vector<bool>& is_protected, std::vector<bool>& member) {
    AccordMode mode = accord_of(star);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < m.action_count(); a++) {
            if (!member[static_cast<std::size_t>(a)])
                continue;
            bool ok = true;
            if (action_enabled(m, s, a)) {
                for (int b = 0; b < m.action_count() && ok; b++)
                    if (b != a && dep.dependent(mode, a, b) &&
                        !member[static_cast<std::size_t>(b)])
                        ok = false;
            } else {
                ok = false;
                for (const auto& cand : nes_candidates(m, s, a)) {
                    bool subset = true;
                    for (int b : cand)
                        if (!member[static_cast<std::size_t>(b)]) {
                            subset = false;
                            break;
                        }
                    if (subset) {
                        ok = true;
                        break;
                    }
                }
            }
            if (!ok) {
                if (is_protected[static_cast<std::size_t>(a)])
                    return false;
                member[static_cast<std::size_t>(a)] = false;
                changed = true;
            }
        }
    }
    for (std::size_t a = 0; a < member.size(); a++)
        if (is_protected[a] && !member[a])
            return false;
    if (!semi) {
        std::vector<int> en = enabled(m, s);
        if (!en.empty()) {
            bool any = false;
            for (int a : en)
                if (member[static_cast<std::size_t>(a)])
                    any = true;
            if (!any)
                return false;
        }
    }
    return true;
}

}  // namespace

std::optional<StubbornResult> deletion_minimal(
    const Model& m, const State& s, StarMode star, bool semi,
    const std::vector<int>& protected_actions,
    const std::function<bool(const Model&, const State&, const StubbornResult&)>& constraint,
    const DependencyMatrix& dep) {
    std::size_t n = static_cast<std::size_t>(m.action_count());
    std::vector<bool> member(n, true);
    std::vector<bool> is_protected(n, false);
    std::vector<bool> protected_pid(static_cast<std::size_t>(m.process_count()), false);
    for (int a : protected_actions) {
        is_protected[static_cast<std::size_t>(a)] = true;
        protected_pid[static_cast<std::size_t>(m.action(a).pid)] = true;
    }

    // deletion order: enabled actions remote to the protected processes
    // first, then everything else, each bucket by descending id
    std::vector<int> order;
    for (int pass = 0; pass < 2; pass++) {
        for (int a = m.action_count() - 1; a >= 0; a--) {
            bool remote_enabled = action_enabled(m, s, a) &&
                                  !protected_pid[static_cast<std::size_t>(m.action(a).pid)];
            if ((pass == 0) == remote_enabled)
                order.push_back(a);
        }
    }

    bool deleted = true;
    while (deleted) {
        deleted = false;
        for (int victim : order) {
            if (!member[static_cast<std::size_t>(victim)] ||
                is_protected[static_cast<std::size_t>(victim)])
                continue;
            std::vector<bool> attempt = member;
            attempt[static_cast<std::size_t>(victim)] = false;
            if (repair_after_delete(m, s, star, dep, semi, is_protected, attempt)) {
                member = std::move(attempt);
                deleted = true;
            }
        }
    }

    StubbornResult r;
    r.member = member;
    r.star = star;
    r.semi = semi;
    for (int a = 0; a < m.action_count(); a++) {
        if (!member[static_cast<std::size_t>(a)] || action_enabled(m, s, a))
            continue;
        for (const auto& cand : nes_candidates(m, s, a)) {
            bool subset = true;
            for (int b : cand)
                if (!member[static_cast<std::size_t>(b)])
                    subset = false;
            if (subset) {
                r.nes_witness[a] = cand;
                break;
            }
        }
    }
    if (!constraint(m, s, r))
        return std::nullopt;
    return r;
}

namespace {

std::vector<StubbornViolation> validate_impl(const Model& m, const State& s,
                                             const StubbornResult& c, const DependencyMatrix& dep,
                                             bool use_witnesses) {
    std::vector<StubbornViolation> out;
    std::vector<int> en = enabled(m, s);
    if (!c.semi && !en.empty()) {
        bool any = false;
        for (int a : en)
            if (c.contains(a))
                any = true;
        if (!any)
            out.push_back({StubbornViolation::Kind::D0, -1, -1, "no enabled member"});
    }
    AccordMode mode = accord_of(c.star);
    for (int a : c.actions()) {
        if (action_enabled(m, s, a)) {
            for (int b = 0; b < m.action_count(); b++)
                if (b != a && dep.dependent(mode, a, b) && !c.contains(b))
                    out.push_back({StubbornViolation::Kind::D1, a, b,
                                   m.action(a).label + " misses dependent " + m.action(b).label});
        } else {
            bool ok = false;
            if (use_witnesses) {
                auto it = c.nes_witness.find(a);
                if (it != c.nes_witness.end()) {
                    ok = true;
                    for (int b : it->second)
                        if (!c.contains(b))
                            ok = false;
                }
            } else {
                for (const auto& cand : nes_candidates(m, s, a)) {
                    bool subset = true;
                    for (int b : cand)
                        if (!c.contains(b))
                            subset = false;
                    if (subset)
                        ok = true;
                }
            }
            if (!ok)
                out.push_back({StubbornViolation::Kind::D2, a, -1,
                               "no necessary enabling set inside for " + m.action(a).label});
        }
    }
    return out;
}

}  // namespace

std::vector<StubbornViolation> validate_stubborn(const Model& m, const State& s,
                                                 const StubbornResult& candidate,
                                                 const DependencyMatrix& dep) {
    return validate_impl(m, s, candidate, dep, false);
}

std::vector<StubbornViolation> validate_with_witnesses(const Model& m, const State& s,
                                                       const StubbornResult& candidate,
                                                       const DependencyMatrix& dep) {
    return validate_impl(m, s, candidate, dep, true);
}

bool lmv(const Model& m, const State& s, int pid, const DependencyMatrix& dep,
         StubbornResult* witness) {
    // the whole process stays in the set, not just its enabled part:
    // otherwise a remote step could enable a local action outside the
    // witness and the property would not survive remote steps
    const std::vector<int>& protected_actions =
        m.processes[static_cast<std::size_t>(pid)].action_ids;
    auto constraint = [pid](const Model& mm, const State& ss, const StubbornResult& r) {
        for (int a : r.enabled_members(mm, ss))
            if (mm.action(a).pid != pid)
                return false;
        for (int a : enabled(mm, ss))
            if (mm.action(a).pid == pid && !r.contains(a))
                return false;
        return true;
    };
    auto r = deletion_minimal(m, s, StarMode::Left, true, protected_actions, constraint, dep);
    if (r && witness)
        *witness = *r;
    return r.has_value();
}

bool rmv(const Model& m, const State& q, int action, const State& q_next,
         const DependencyMatrix& dep, StubbornResult* witness) {
    int pid = m.action(action).pid;
    auto constraint = [action, pid, &q_next](const Model& mm, const State& ss,
                                             const StubbornResult& r) {
        auto en = r.enabled_members(mm, ss);
        if (en.size() != 1 || en[0] != action)
            return false;
        for (int a : r.actions())
            if (mm.action(a).pid != pid && action_enabled(mm, q_next, a))
                return false;
        return true;
    };
    auto r = deletion_minimal(m, q, StarMode::Right, true, {action}, constraint, dep);
    if (r && witness)
        *witness = *r;
    return r.has_value();
}

}  // namespace gclmc
