#include "gclmc/model.hpp"

#include <algorithm>
#include <set>

namespace gclmc {

int Model::var_index(const std::string& n) const {
    for (std::size_t i = 0; i < vars.size(); i++)
        if (vars[i].name == n)
            return static_cast<int>(i);
    return -1;
}

State Model::initial_state() const {
    State s;
    s.vals.reserve(vars.size());
    for (const auto& v : vars)
        s.vals.push_back(v.init);
    s.pcs.reserve(processes.size());
    for (const auto& p : processes)
        s.pcs.push_back(p.initial_loc);
    return s;
}

std::vector<int> Model::actions_targeting(int pid, int loc) const {
    std::vector<int> out;
    for (int a : processes[static_cast<std::size_t>(pid)].action_ids)
        if (action(a).target_loc == loc)
            out.push_back(a);
    return out;
}

void Model::finalize() {
    std::set<std::string> names;
    for (const auto& v : vars) {
        if (!names.insert(v.name).second)
            throw ModelError("duplicate variable name: " + v.name);
        if (v.lo > v.hi || v.init < v.lo || v.init > v.hi)
            throw ModelError("initializer outside declared domain: " + v.name);
    }
    for (std::size_t i = 0; i < processes.size(); i++) {
        if (processes[i].pid != static_cast<int>(i))
            throw ModelError("process ids must be dense");
    }
    for (const auto& a : actions) {
        const auto& proc = processes[static_cast<std::size_t>(a.pid)];
        int locs = static_cast<int>(proc.loc_names.size());
        if (a.source_loc < 0 || a.source_loc >= locs || a.target_loc < 0 || a.target_loc >= locs)
            throw ModelError("action location outside its process");
        std::set<int> targets;
        for (const auto& u : a.updates)
            if (!targets.insert(u.var).second)
                throw ModelError("variable assigned twice in one action: " + a.label);
    }

    action_reads.assign(actions.size(), {});
    action_writes.assign(actions.size(), {});
    for (std::size_t i = 0; i < actions.size(); i++) {
        std::set<int> reads;
        std::set<int> writes;
        for (int v : actions[i].guard->read_set())
            reads.insert(v);
        for (const auto& u : actions[i].updates) {
            writes.insert(u.var);
            for (int v : u.rhs->read_set())
                reads.insert(v);
        }
        action_reads[i].assign(reads.begin(), reads.end());
        action_writes[i].assign(writes.begin(), writes.end());
    }
    property_reads = property_y->read_set();
}

std::int64_t evaluate(const Model&, const ExprPtr& e, const State& s) {
    return evaluate(e, s.vals);
}

bool action_enabled(const Model& m, const State& s, int action) {
    const auto& a = m.action(action);
    if (s.pcs[static_cast<std::size_t>(a.pid)] != a.source_loc)
        return false;
    return evaluate_bool(a.guard, s.vals);
}

std::vector<int> enabled(const Model& m, const State& s) {
    std::vector<int> out;
    for (int a = 0; a < m.action_count(); a++)
        if (action_enabled(m, s, a))
            out.push_back(a);
    return out;
}

State apply(const Model& m, const State& s, int action) {
    if (!action_enabled(m, s, action))
        throw ActionDisabled("action disabled: " + m.action(action).label);
    const auto& a = m.action(action);
    State next = s;
    // left-to-right, each reading the pre-state of the whole action would be
    // wrong: updates see earlier updates of the same action
    for (const auto& u : a.updates) {
        std::int64_t v = evaluate(u.rhs, next.vals);
        const auto& decl = m.vars[static_cast<std::size_t>(u.var)];
        if (v < decl.lo || v > decl.hi)
            throw DomainOverflow("update leaves domain of " + decl.name + " in " + a.label);
        next.vals[static_cast<std::size_t>(u.var)] = static_cast<std::int32_t>(v);
    }
    next.pcs[static_cast<std::size_t>(a.pid)] = a.target_loc;
    return next;
}

std::vector<std::pair<int, State>> successors(const Model& m, const State& s) {
    std::vector<std::pair<int, State>> out;
    for (int a : enabled(m, s))
        out.emplace_back(a, apply(m, s, a));
    return out;
}

}  // namespace gclmc
