#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gclmc/gcl.hpp"
#include "gclmc/oracle.hpp"
#include "gclmc/por.hpp"
#include "gclmc/tr.hpp"

namespace {

using gclmc::ExplorationOptions;
using gclmc::ExplorationResult;
using gclmc::Model;

constexpr int kExitHolds = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

Model load_model(const std::string& path) {
    if (std::filesystem::exists(path))
        return gclmc::parse_file(path);
    if (gclmc::is_reference_model_name(path))
        return gclmc::reference_model(path);
    throw gclmc::ParseError(gclmc::SourceSpan{path, 0, 0, 0},
                            "no such file or built-in model");
}

ExplorationResult run_strategy(const Model& m, const std::string& strategy,
                               const ExplorationOptions& opts) {
    if (strategy == "none")
        return gclmc::explore_full(m, opts);
    if (strategy == "spor")
        return gclmc::explore_por(m, opts);
    if (strategy == "tr") {
        auto oracle = gclmc::classify_movers_static(m, gclmc::static_matrix(m));
        return gclmc::explore_tr(m, oracle, opts);
    }
    if (strategy == "str")
        return gclmc::explore_tr(m, gclmc::dynamic_movers(), opts);
    throw CLI::ValidationError("--strategy", "unknown strategy " + strategy);
}

double percent(std::uint64_t part, std::uint64_t whole) {
    if (whole == 0)
        return 100.0;
    // round half up to one decimal
    double raw = 1000.0 * static_cast<double>(part) / static_cast<double>(whole);
    return std::floor(raw + 0.5) / 10.0;
}

nlohmann::json result_json(const std::string& model_name, const ExplorationResult& r) {
    return nlohmann::json{{"model", model_name},
                          {"strategy", r.strategy},
                          {"states", r.states_visited},
                          {"transitions", r.transitions_taken},
                          {"external_states", r.external_states},
                          {"deadlocks", r.deadlock_count},
                          {"violated", r.violated()},
                          {"time_ms", r.wall_ms}};
}

void print_trace(const Model& m, const gclmc::Violation& v) {
    std::cout << "counterexample (" << v.trace.size() << " steps):\n";
    for (const auto& [action, state] : v.trace) {
        std::cout << "  " << m.action(action).label << " ->";
        for (std::size_t i = 0; i < m.vars.size(); i++)
            std::cout << " " << m.vars[i].name << "=" << state.vals[i];
        std::cout << "\n";
    }
    if (v.trace.empty())
        std::cout << "  (the initial state already violates the property)\n";
}

void print_result_text(const Model& m, const ExplorationResult& r) {
    if (r.violated()) {
        std::cout << "verdict: property violated\n";
        print_trace(m, *r.violation);
    } else {
        std::cout << "verdict: property holds\n";
    }
    std::cout << "strategy:        " << r.strategy << "\n"
              << "states:          " << r.states_visited << "\n"
              << "transitions:     " << r.transitions_taken << "\n"
              << "external states: " << r.external_states << "\n"
              << "deadlocks:       " << r.deadlock_count << "\n"
              << std::fixed << std::setprecision(1) << "time:            " << r.wall_ms
              << " ms\n";
}

int cmd_check(const std::string& path, const std::string& strategy, const std::string& property,
              const std::string& format, const ExplorationOptions& opts) {
    Model m = load_model(path);
    if (!property.empty())
        m.property_y = gclmc::parse_property(m, property);
    m.finalize();
    ExplorationResult r = run_strategy(m, strategy, opts);
    if (format == "json") {
        std::cout << result_json(m.name, r).dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "model,strategy,states,transitions,external_states,deadlocks,violated,"
                     "time_ms\n"
                  << m.name << "," << r.strategy << "," << r.states_visited << ","
                  << r.transitions_taken << "," << r.external_states << "," << r.deadlock_count
                  << "," << (r.violated() ? 1 : 0) << "," << std::fixed << std::setprecision(1)
                  << r.wall_ms << "\n";
    } else {
        print_result_text(m, r);
    }
    return r.violated() ? kExitViolated : kExitHolds;
}

// transaction reduction stores only external states, so those are the
// counts the comparison reports
std::uint64_t stored_states(const ExplorationResult& r) {
    return r.strategy == "tr" || r.strategy == "str" ? r.external_states : r.states_visited;
}

int cmd_compare(const std::string& path, std::vector<std::string> strategies,
                const std::string& property, const std::string& format,
                const ExplorationOptions& opts) {
    Model m = load_model(path);
    if (!property.empty())
        m.property_y = gclmc::parse_property(m, property);
    m.finalize();
    if (strategies.empty())
        strategies = {"none", "tr", "str", "spor"};
    // the baseline always runs, whether or not it was requested
    ExplorationResult baseline = gclmc::explore_full(m, opts);
    std::vector<ExplorationResult> rows;
    for (const auto& s : strategies)
        rows.push_back(s == "none" ? baseline : run_strategy(m, s, opts));

    bool any_violation = false;
    for (const auto& r : rows)
        any_violation = any_violation || r.violated();

    if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json row = result_json(m.name, r);
            row["states"] = stored_states(r);
            row["states_pct"] = percent(stored_states(r), baseline.states_visited);
            row["transitions_pct"] = percent(r.transitions_taken, baseline.transitions_taken);
            arr.push_back(row);
        }
        std::cout << arr.dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "model,strategy,states,states_pct,transitions,transitions_pct,"
                     "external_states,deadlocks,violated,time_ms\n";
        for (const auto& r : rows)
            std::cout << m.name << "," << r.strategy << "," << stored_states(r) << ","
                      << std::fixed << std::setprecision(1)
                      << percent(stored_states(r), baseline.states_visited) << ","
                      << r.transitions_taken << ","
                      << percent(r.transitions_taken, baseline.transitions_taken) << ","
                      << r.external_states << "," << r.deadlock_count << ","
                      << (r.violated() ? 1 : 0) << "," << r.wall_ms << "\n";
    } else {
        std::cout << std::left << std::setw(8) << "strategy" << std::right << std::setw(10)
                  << "states" << std::setw(9) << "st%" << std::setw(12) << "transitions"
                  << std::setw(9) << "tr%" << std::setw(10) << "external" << std::setw(10)
                  << "deadlocks" << std::setw(10) << "time_ms" << "\n";
        for (const auto& r : rows) {
            std::cout << std::left << std::setw(8) << r.strategy << std::right << std::setw(10)
                      << stored_states(r) << std::setw(9) << std::fixed << std::setprecision(1)
                      << percent(stored_states(r), baseline.states_visited) << std::setw(12)
                      << r.transitions_taken << std::setw(9)
                      << percent(r.transitions_taken, baseline.transitions_taken) << std::setw(10)
                      << r.external_states << std::setw(10) << r.deadlock_count << std::setw(10)
                      << std::setprecision(1) << r.wall_ms << "\n";
        }
        if (any_violation)
            std::cout << "note: the property is violated; counts cover the search up to the "
                         "counterexample\n";
    }
    return any_violation ? kExitViolated : kExitHolds;
}

int cmd_validate(std::uint64_t seed_begin, std::uint64_t seed_end, bool inject_fault,
                 const ExplorationOptions& opts) {
    using namespace gclmc;
    int failures = 0;
    auto report = [&failures](const std::string& what, const SoundnessReport& rep) {
        for (const auto& n : rep.notes)
            std::cout << "    note: " << n << "\n";
        if (rep.pass) {
            std::cout << "  ok   " << what << "\n";
        } else {
            failures++;
            std::cout << "  FAIL " << what << "\n";
            for (const auto& f : rep.failures)
                std::cout << "       " << f << "\n";
        }
    };

    const std::vector<std::string> reference = {"prog1", "prog2", "lockpair", "deadlock2",
                                                "indep(3,4)"};
    std::cout << "reference models:\n";
    for (const auto& name : reference) {
        Model m = reference_model(name);
        ExplorationResult full = explore_full(m, opts);
        report(name + ": stubborn preservation", check_strong_preservation(m));
        report(name + ": semi-stubborn preservation", check_semi_preservation(m));
        report(name + ": left movers survive remote steps", check_left_mover_preservation(m));
        report(name + ": right movers survive moving", check_right_mover_preservation(m));
        report(name + ": deletion minimality", check_deletion_minimality(m));
        report(name + ": static vs exact commutation", check_commutation_soundness(m));
        report(name + ": commutation procedures agree", check_commutation_agreement(m));
        report(name + ": enabling sets intersect enabling paths", check_nes_correctness(m));
        for (const char* strat : {"tr", "str", "spor"}) {
            ExplorationResult red = run_strategy(m, strat, opts);
            report(name + ": soundness of " + strat, check_soundness(m, full, red));
        }
        TransactionGraph g = build_transaction_graph(m, dynamic_movers());
        PremiseReport prem = check_reduction_premise(m, g);
        SoundnessReport prep;
        for (std::size_t i = 0; i < prem.item_pass.size(); i++)
            if (!prem.item_pass[i])
                prep.fail("premise item " + std::to_string(i + 1) + ": " +
                          prem.counterexamples[i]);
        report(name + ": reduction premise (9 items)", prep);
        report(name + ": post phases are actuated", check_post_phase_actuation(m, g));
    }

    if (inject_fault) {
        // test hook: explore on top of a deliberately unsound commutation
        // relation; the soundness check has to flag it
        Model dl = reference_model("deadlock2");
        ExplorationResult full = explore_full(dl, opts);
        DependencyMatrix broken = broken_matrix(dl);
        ExplorationOptions o = opts;
        o.dep_override = &broken;
        report("fault injection is caught", check_soundness(dl, full, explore_por(dl, o)));
    }

    std::cout << "random models, seeds " << seed_begin << ".." << seed_end << ":\n";
    RandomModelParams params;
    int differential_failures = 0;
    int commutation_failures = 0;
    int mover_failures = 0;
    for (std::uint64_t seed = seed_begin; seed <= seed_end; seed++) {
        Model m = random_model(seed, params);
        SoundnessReport rep;
        try {
            ExplorationResult full = explore_full(m, opts);
            for (const char* strat : {"tr", "str", "spor"}) {
                ExplorationResult red = run_strategy(m, strat, opts);
                SoundnessReport one = check_soundness(m, full, red);
                if (!one.pass) {
                    rep.pass = false;
                    for (auto& f : one.failures)
                        rep.failures.push_back(std::string(strat) + ": " + f);
                }
            }
            if (!check_commutation_soundness(m).pass)
                commutation_failures++;
            if (full.states_visited <= 1000 && !check_commutation_agreement(m).pass)
                commutation_failures++;
            if (seed < seed_begin + 10 && !check_left_mover_preservation(m).pass)
                mover_failures++;
        } catch (const ResourceLimit& e) {
            rep.fail(std::string("resource limit: ") + e.what());
        }
        if (!rep.pass) {
            differential_failures++;
            std::cout << "  FAIL seed " << seed << "\n";
            for (const auto& f : rep.failures)
                std::cout << "       " << f << "\n";
            auto still_fails = [&](const Model& cand) {
                try {
                    ExplorationResult full2 = explore_full(cand, opts);
                    for (const char* strat : {"tr", "str", "spor"})
                        if (!check_soundness(cand, full2, run_strategy(cand, strat, opts)).pass)
                            return true;
                } catch (...) {
                    return false;
                }
                return false;
            };
            Model small = minimize_model(m, still_fails);
            std::cout << "       minimized counterexample:\n" << pretty_print(small);
        }
    }
    if (differential_failures == 0)
        std::cout << "  ok   differential comparison on " << (seed_end - seed_begin + 1)
                  << " random models\n";
    failures += differential_failures;
    if (commutation_failures == 0) {
        std::cout << "  ok   commutation relations sound and in agreement on random models\n";
    } else {
        failures += commutation_failures;
        std::cout << "  FAIL commutation checks on " << commutation_failures
                  << " random model(s)\n";
    }
    if (mover_failures == 0) {
        std::cout << "  ok   left movers survive remote steps on sampled random models\n";
    } else {
        failures += mover_failures;
        std::cout << "  FAIL left-mover preservation on " << mover_failures
                  << " sampled random model(s)\n";
    }

    std::cout << (failures == 0 ? "validation passed\n" : "validation FAILED\n");
    return failures == 0 ? kExitHolds : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicit-state reachability checker for guarded-command models"};
    app.require_subcommand(1);

    std::string model_path;
    std::string strategy = "str";
    std::string property;
    std::string format = "text";
    ExplorationOptions opts;
    std::uint64_t max_states = 10000000;
    std::int64_t timeout_ms = 0;
    bool exhaustive_nes = false;
    bool no_subsumption = false;
    bool exact_visibility = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", format)->check(CLI::IsMember({"text", "csv", "json"}));
        cmd->add_option("--max-states", max_states);
        cmd->add_option("--timeout-ms", timeout_ms);
        cmd->add_option("--property", property);
        cmd->add_flag("--exhaustive-nes", exhaustive_nes);
        cmd->add_flag("--no-subsumption", no_subsumption);
        cmd->add_flag("--exact-visibility", exact_visibility);
    };

    auto* check = app.add_subcommand("check", "explore one model under one strategy");
    check->add_option("model", model_path)->required();
    check->add_option("--strategy", strategy)
        ->check(CLI::IsMember({"none", "tr", "str", "spor"}));
    add_common(check);

    std::string strategies_arg = "none,tr,str,spor";
    auto* compare = app.add_subcommand("compare", "run several strategies and tabulate");
    compare->add_option("model", model_path)->required();
    compare->add_option("--strategies", strategies_arg, "comma-separated subset of none,tr,str,spor");
    add_common(compare);

    std::uint64_t seed_begin = 0;
    std::uint64_t seed_end = 99;
    std::string seeds_arg;
    bool inject_fault = false;
    auto* validate = app.add_subcommand("validate", "run the validation suites");
    validate->add_option("--seeds", seeds_arg, "seed range, e.g. 0..99");
    validate->add_flag("--inject-fault", inject_fault)->group("");  // hidden test hook
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    opts.max_states = max_states;
    opts.timeout_ms = timeout_ms;
    opts.exhaustive_nes = exhaustive_nes;
    opts.subsumption = !no_subsumption;
    opts.exact_visibility = exact_visibility;

    try {
        if (check->parsed())
            return cmd_check(model_path, strategy, property, format, opts);
        if (compare->parsed()) {
            std::vector<std::string> strategies;
            std::stringstream ss(strategies_arg);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) {
                    if (item != "none" && item != "tr" && item != "str" && item != "spor") {
                        std::cerr << "unknown strategy: " << item << "\n";
                        return kExitUsage;
                    }
                    strategies.push_back(item);
                }
            return cmd_compare(model_path, strategies, property, format, opts);
        }
        if (validate->parsed()) {
            if (!seeds_arg.empty()) {
                auto dots = seeds_arg.find("..");
                if (dots == std::string::npos) {
                    seed_begin = seed_end = std::stoull(seeds_arg);
                } else {
                    seed_begin = std::stoull(seeds_arg.substr(0, dots));
                    seed_end = std::stoull(seeds_arg.substr(dots + 2));
                }
            }
            return cmd_validate(seed_begin, seed_end, inject_fault, opts);
        }
    } catch (const gclmc::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const gclmc::ResourceLimit& e) {
        std::cerr << "resource bound exceeded: " << e.what() << "\n";
        return kExitResource;
    } catch (const gclmc::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
