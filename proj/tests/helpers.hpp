#ifndef GCLMC_TEST_HELPERS_HPP
#define GCLMC_TEST_HELPERS_HPP

#include <set>
#include <string>
#include <vector>

#include "gclmc/gcl.hpp"
#include "gclmc/model.hpp"

namespace gclmc::test {

// the unique action whose label contains `needle`, e.g. "P0/acquire(m)"
inline int action_by_label(const Model& m, const std::string& needle) {
    int found = -1;
    for (const auto& a : m.actions) {
        if (a.label.find(needle) != std::string::npos) {
            if (found >= 0)
                throw std::runtime_error("ambiguous action label: " + needle);
            found = a.id;
        }
    }
    if (found < 0)
        throw std::runtime_error("no action labelled: " + needle);
    return found;
}

inline State state_after(const Model& m, const std::vector<std::string>& labels) {
    State s = m.initial_state();
    for (const auto& l : labels)
        s = apply(m, s, action_by_label(m, l));
    return s;
}

inline std::set<int> as_set(const std::vector<int>& v) {
    return {v.begin(), v.end()};
}

inline std::set<std::vector<std::int32_t>> state_keys(const std::vector<State>& states) {
    std::set<std::vector<std::int32_t>> out;
    for (const auto& s : states) {
        auto k = s.vals;
        k.insert(k.end(), s.pcs.begin(), s.pcs.end());
        out.insert(k);
    }
    return out;
}

}  // namespace gclmc::test

#endif
