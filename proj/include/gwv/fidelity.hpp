#pragma once

// Generated rules against their printed forms, and numeric soundness of rules.

#include "gwv/catalog.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/rewrite/verify.hpp"

#include <string>
#include <vector>

namespace gwv {

struct FidelityCheck {
    std::string name;      // catalog entry holding the printed form
    int genus = -1;        // -1 for the C1/C2 definitional checks
    int arity = 0;
    bool ok = false;
    std::string residual;  // canonical difference when !ok
};

/// Printed T-elimination equations keyed by the rule they transcribe.
inline const std::vector<std::tuple<std::string, int, int>>& printed_rules() {
    static const std::vector<std::tuple<std::string, int, int>> v{
        {"eq5", 0, 4}, {"eq6", 0, 5}, {"eq7", 0, 6}, {"eq8", 1, 2}, {"eq9", 1, 3}, {"eq10", 1, 4}};
    return v;
}

/// Exact canonical comparison: the expansion of each printed equation (lhs - rhs)
/// equals the generated rule's equation; C1 and C2 expand to their explicit forms.
inline std::vector<FidelityCheck> check_rule_fidelity() {
    std::vector<FidelityCheck> out;
    auto record = [&](FidelityCheck c, const rewrite::TensorPoly& diff) {
        c.ok = diff.is_zero();
        if (!c.ok) c.residual = expr::print_canonical(diff);
        out.push_back(std::move(c));
    };
    for (const auto& [name, g, k] : printed_rules()) {
        const auto& st = catalog::identity(name);
        auto printed = rewrite::expand_definitional(st.lhs) - rewrite::expand_definitional(st.rhs);
        record({name, g, k}, printed - rewrite::make_rule(g, k).equation());
    }
    for (const char* name : {"C1_explicit", "C2_explicit"}) {
        const auto& st = catalog::identity(name);
        record({name, -1, st.name == "C1_explicit" ? 5 : 6}, rewrite::difference(st));
    }
    return out;
}

struct SoundnessCheck {
    int genus = 0;
    int arity = 0;
    bool ok = false;
    Rational first_nonzero;
    unsigned states = 0;
};

/// Each rule's equation evaluated in the point model at `states` random points.
inline std::vector<SoundnessCheck> check_rule_soundness(const rewrite::RuleSet& rules, unsigned states = 20,
                                                        std::uint64_t seed = 11) {
    std::vector<SoundnessCheck> out;
    for (const auto& [gk, rule] : rules.rules) {
        SoundnessCheck c{gk.first, gk.second, true, Rational(0), states};
        auto eq = rule.equation();
        std::set<expr::SlotId> slots;
        for (const auto& [k, m] : eq)
            for (const auto& f : m.factors)
                for (const auto& a : f.args)
                    if (!a.is_dummy()) slots.insert(a.id);
        for (unsigned i = 0; i < states && c.ok; ++i) {
            auto s = oracle::make_state(oracle::trial_seed(seed, i), {slots.begin(), slots.end()}, {});
            Rational v = oracle::eval_poly(eq, s);
            if (!v.is_zero()) {
                c.ok = false;
                c.first_nonzero = v;
            }
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace gwv
