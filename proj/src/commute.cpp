#include "gclmc/commute.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace gclmc {

namespace {

bool sorted_intersects(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j])
            return true;
        if (a[i] < b[j])
            i++;
        else
            j++;
    }
    return false;
}

bool disjoint_footprints(const Model& m, int a, int b) {
    const auto& ra = m.action_reads[static_cast<std::size_t>(a)];
    const auto& wa = m.action_writes[static_cast<std::size_t>(a)];
    const auto& rb = m.action_reads[static_cast<std::size_t>(b)];
    const auto& wb = m.action_writes[static_cast<std::size_t>(b)];
    return !sorted_intersects(wa, wb) && !sorted_intersects(wa, rb) && !sorted_intersects(ra, wb);
}

bool is_lock_op(const ActionDescriptor& a) {
    return a.hint.kind != ActionHint::Kind::Plain;
}

}  // namespace

bool static_accords(const Model& m, int a, int b, AccordMode mode) {
    const auto& da = m.action(a);
    const auto& db = m.action(b);
    if (da.pid == db.pid)
        return false;  // shared program counter
    if (disjoint_footprints(m, a, b))
        return true;
    // lock discipline: an acquire never enables another operation on the
    // same lock, a release never disables one
    if (is_lock_op(da) && is_lock_op(db) && da.hint.var == db.hint.var) {
        if (mode == AccordMode::Right && da.hint.kind == ActionHint::Kind::Acquire)
            return true;
        if (mode == AccordMode::Left && da.hint.kind == ActionHint::Kind::Release)
            return true;
    }
    return false;
}

DependencyMatrix static_matrix(const Model& m) {
    DependencyMatrix d;
    d.exact = false;
    d.action_count = m.action_count();
    std::size_t n = static_cast<std::size_t>(d.action_count);
    for (auto& bits : d.accords_bits)
        bits.assign(n * n, false);
    for (int a = 0; a < d.action_count; a++)
        for (int b = 0; b < d.action_count; b++)
            if (a != b)
                for (int mode = 0; mode < 4; mode++)
                    d.accords_bits[static_cast<std::size_t>(mode)]
                                  [static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] =
                        static_accords(m, a, b, static_cast<AccordMode>(mode));
    return d;
}

std::vector<State> reachable_states(const Model& m, std::size_t state_bound) {
    std::vector<State> order;
    std::unordered_set<State, StateHash> seen;
    std::deque<State> queue;
    State init = m.initial_state();
    seen.insert(init);
    queue.push_back(init);
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        order.push_back(s);
        if (order.size() > state_bound)
            throw StateSpaceTooLarge("reachable set exceeds bound");
        for (auto& [a, next] : successors(m, s)) {
            (void)a;
            if (seen.insert(next).second)
                queue.push_back(next);
        }
    }
    return order;
}

namespace {

// Square check at one state for the deterministic semantics. For
// right-commutation of a with b: whenever a;b runs from q, b;a must run
// from q and reach the same state.
bool right_square_ok(const Model& m, const State& q, int a, int b) {
    if (!action_enabled(m, q, a))
        return true;
    State qa = apply(m, q, a);
    if (!action_enabled(m, qa, b))
        return true;
    State qab = apply(m, qa, b);
    if (!action_enabled(m, q, b))
        return false;
    State qb = apply(m, q, b);
    if (!action_enabled(m, qb, a))
        return false;
    return apply(m, qb, a) == qab;
}

// Strong commutation: wherever both are enabled, neither disables the
// other and the two orders converge.
bool strong_square_ok(const Model& m, const State& q, int a, int b) {
    if (!action_enabled(m, q, a) || !action_enabled(m, q, b))
        return true;
    State qa = apply(m, q, a);
    State qb = apply(m, q, b);
    if (!action_enabled(m, qa, b) || !action_enabled(m, qb, a))
        return false;
    return apply(m, qa, b) == apply(m, qb, a);
}

}  // namespace

bool exact_commutes(const Model& m, int a, int b, AccordMode mode, std::size_t state_bound) {
    if (m.action(a).pid == m.action(b).pid)
        return false;
    const std::vector<State> states = reachable_states(m, state_bound);
    for (const State& q : states) {
        switch (mode) {
        case AccordMode::Right:
            if (!right_square_ok(m, q, a, b))
                return false;
            break;
        case AccordMode::Left:
            if (!right_square_ok(m, q, b, a))
                return false;
            break;
        case AccordMode::Full:
            if (!right_square_ok(m, q, a, b) || !right_square_ok(m, q, b, a))
                return false;
            break;
        case AccordMode::Strong:
            if (!strong_square_ok(m, q, a, b))
                return false;
            break;
        }
    }
    return true;
}

DependencyMatrix exact_matrix(const Model& m, std::size_t state_bound) {
    DependencyMatrix d;
    d.exact = true;
    d.action_count = m.action_count();
    std::size_t n = static_cast<std::size_t>(d.action_count);
    for (auto& bits : d.accords_bits)
        bits.assign(n * n, false);
    const std::vector<State> states = reachable_states(m, state_bound);
    for (int a = 0; a < d.action_count; a++) {
        for (int b = 0; b < d.action_count; b++) {
            if (a == b || m.action(a).pid == m.action(b).pid)
                continue;
            bool right = true;
            bool left = true;
            bool strong = true;
            for (const State& q : states) {
                right = right && right_square_ok(m, q, a, b);
                left = left && right_square_ok(m, q, b, a);
                strong = strong && strong_square_ok(m, q, a, b);
                if (!right && !left && !strong)
                    break;
            }
            std::size_t idx = static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b);
            d.accords_bits[static_cast<std::size_t>(AccordMode::Right)][idx] = right;
            d.accords_bits[static_cast<std::size_t>(AccordMode::Left)][idx] = left;
            d.accords_bits[static_cast<std::size_t>(AccordMode::Strong)][idx] = strong;
            d.accords_bits[static_cast<std::size_t>(AccordMode::Full)][idx] = right && left;
        }
    }
    return d;
}

std::vector<std::vector<int>> nes_candidates(const Model& m, const State& s, int action) {
    if (action_enabled(m, s, action))
        throw NotDisabled("action is enabled: " + m.action(action).label);
    const auto& a = m.action(action);
    bool pc_inactive = s.pcs[static_cast<std::size_t>(a.pid)] != a.source_loc;
    bool guard_false = !evaluate_bool(a.guard, s.vals);

    std::vector<std::vector<int>> out;
    if (guard_false) {
        // everything that can change a guard variable
        std::vector<int> guard_reads = a.guard->read_set();
        std::vector<int> writers;
        for (int b = 0; b < m.action_count(); b++)
            if (sorted_intersects(m.action_writes[static_cast<std::size_t>(b)], guard_reads))
                writers.push_back(b);
        out.push_back(std::move(writers));
    }
    if (pc_inactive)
        out.push_back(m.actions_targeting(a.pid, a.source_loc));
    return out;
}

VisibilitySets visibility(const Model& m) {
    VisibilitySets v;
    std::size_t n = static_cast<std::size_t>(m.action_count());
    v.enabling.assign(n, false);
    v.disabling.assign(n, false);
    v.visible.assign(n, false);
    for (std::size_t a = 0; a < n; a++) {
        if (sorted_intersects(m.action_writes[a], m.property_reads)) {
            v.enabling[a] = true;
            v.disabling[a] = true;
            v.visible[a] = true;
        }
    }
    return v;
}

VisibilitySets visibility_exact(const Model& m, std::size_t state_bound) {
    VisibilitySets v;
    std::size_t n = static_cast<std::size_t>(m.action_count());
    v.enabling.assign(n, false);
    v.disabling.assign(n, false);
    v.visible.assign(n, false);
    for (const State& q : reachable_states(m, state_bound)) {
        bool y_before = property_holds(m, q);
        for (auto& [a, next] : successors(m, q)) {
            bool y_after = property_holds(m, next);
            if (!y_before && y_after)
                v.enabling[static_cast<std::size_t>(a)] = true;
            if (y_before && !y_after)
                v.disabling[static_cast<std::size_t>(a)] = true;
        }
    }
    for (std::size_t a = 0; a < n; a++)
        v.visible[a] = v.enabling[a] || v.disabling[a];
    return v;
}

}  // namespace gclmc
