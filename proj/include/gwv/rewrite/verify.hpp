#pragma once

#include "gwv/expr/print.hpp"
#include "gwv/report.hpp"
#include "gwv/rewrite/membership.hpp"

#include <chrono>
#include <functional>
#include <string>

namespace gwv::rewrite {

struct VerifyConfig {
    MembershipBounds bounds;
};

inline bool uses_tensor(const expr::SExpr& e, const std::string& name);
inline bool uses_tensor(const expr::VExpr& v, const std::string& name) {
    for (const auto& k : v->kids)
        if (uses_tensor(k, name)) return true;
    for (const auto& c : v->coeffs)
        if (uses_tensor(c, name)) return true;
    return false;
}
inline bool uses_tensor(const expr::SExpr& e, const std::string& name) {
    if (e->kind == SKind::Named && e->name == name) return true;
    for (const auto& v : e->vargs)
        if (uses_tensor(v, name)) return true;
    for (const auto& k : e->kids)
        if (uses_tensor(k, name)) return true;
    return false;
}

/// Transcription remarks attached to reports of statements using G or rho22.
inline std::vector<std::string> transcription_notes(const IdentityStatement& st) {
    std::vector<std::string> notes;
    auto uses = [&](const std::string& n) {
        if (st.vector) return uses_tensor(st.vlhs, n) || uses_tensor(st.vrhs, n);
        return uses_tensor(st.lhs, n) || uses_tensor(st.rhs, n);
    };
    if (uses("G")) notes.push_back("G: the symbol v_{g(4)} in the 1/24 term is read as the slot W_{g(4)}");
    if (uses("rho22"))
        notes.push_back("rho22: the macro term 3<<T(W.V)>>_2 is read as T applied to the quantum product W.V");
    if (!st.note.empty()) notes.push_back(st.note);
    return notes;
}

/// Rules whose use is licensed by the modulus (rho0 and rho1 derivative orders).
inline RuleSet ruleset_for_modulus(const std::vector<ModulusEntry>& modulus) {
    RuleSet rs;
    rs.max_arity_g0 = 2;
    rs.max_arity_g1 = 0;
    for (const auto& m : modulus) {
        if (m.name == "rho0")
            for (int o = m.min_order; o <= m.max_order; ++o) {
                rs.rules.emplace(std::make_pair(0, o + 3), make_rule(0, o + 3));
                rs.max_arity_g0 = std::max(rs.max_arity_g0, o + 3);
            }
        if (m.name == "rho1")
            for (int o = m.min_order; o <= m.max_order; ++o) {
                rs.rules.emplace(std::make_pair(1, o + 1), make_rule(1, o + 1));
                rs.max_arity_g1 = std::max(rs.max_arity_g1, o + 1);
            }
    }
    return rs;
}
inline RuleSet ruleset_for_modulus(const IdentityStatement& st) { return ruleset_for_modulus(st.modulus); }

inline std::vector<Generator> generators_for(const std::vector<ModulusEntry>& modulus) {
    std::vector<Generator> gens;
    for (const auto& m : modulus)
        for (int o = m.min_order; o <= m.max_order; ++o) gens.push_back(make_generator(m.name, o));
    return gens;
}

/// Membership of `target` in the ideal generated by `modulus`. The raw span of
/// generator instances is tried first, so that the certificate expands to the
/// target itself; failing that, target and instances are compared after
/// reduction by the TRR rules the modulus licenses.
inline MembershipResult ideal_membership(const TensorPoly& target, const std::vector<ModulusEntry>& modulus,
                                         const MembershipBounds& bounds = {}) {
    if (target.is_zero()) {
        MembershipResult r;
        r.member = true;
        return r;
    }
    MembershipBounds raw_bounds = bounds;
    raw_bounds.max_rounds = 1;
    MembershipEngine raw(generators_for(modulus), std::make_shared<const RuleSet>(), raw_bounds);
    MembershipResult r = raw.run(target);
    if (r.member) return r;
    auto rules = std::make_shared<const RuleSet>(ruleset_for_modulus(modulus));
    MembershipEngine eng(generators_for(modulus), rules, bounds);
    TensorPoly reduced = eng.reduce(target);
    r = eng.run(reduced);
    r.modulo_rules = true;
    return r;
}

inline std::string modulus_string(const std::vector<ModulusEntry>& mod) {
    if (mod.empty()) return "{}";
    std::string s = "{";
    for (std::size_t i = 0; i < mod.size(); ++i) {
        s += (i ? ", " : "") + mod[i].name + ": " + std::to_string(mod[i].min_order);
        if (mod[i].max_order != mod[i].min_order) s += "-" + std::to_string(mod[i].max_order);
    }
    return s + "}";
}

/// lhs - rhs as a pure polynomial (vector identities through a probe correlator).
inline TensorPoly difference(const IdentityStatement& st) {
    if (st.vector) return expand_vector(st.vlhs) - expand_vector(st.vrhs);
    return expand_definitional(st.lhs) - expand_definitional(st.rhs);
}

/// Symbolic verification: zero after expansion and licensed TRR reduction, or
/// an ideal-membership certificate that survives independent re-expansion.
inline Report verify_identity(const IdentityStatement& st, const VerifyConfig& cfg = {}) {
    auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.identity = st.name;
    rep.mode = "symbolic";
    rep.path = "none";
    rep.notes = transcription_notes(st);
    rep.engine_config["modulus"] = modulus_string(st.modulus);
    rep.engine_config["max_rounds"] = std::to_string(cfg.bounds.max_rounds);
    rep.engine_config["max_columns"] = std::to_string(cfg.bounds.max_columns);
    auto finish = [&]() {
        rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    };
    try {
        TensorPoly d = difference(st);
        if (d.is_zero()) {
            rep.outcome = Outcome::Pass;
            rep.path = "syntactic-zero";
            return finish();
        }
        auto rules = std::make_shared<const RuleSet>(ruleset_for_modulus(st));
        std::string rl;
        for (const auto& [gk, r] : rules->rules)
            rl += (rl.empty() ? "" : " ") + std::string("g") + std::to_string(gk.first) + "k" + std::to_string(gk.second);
        rep.engine_config["rules"] = rl.empty() ? "none" : rl;

        MembershipEngine engine(generators_for(st.modulus), rules, cfg.bounds);
        TensorPoly target = engine.reduce(d);
        if (target.is_zero()) {
            rep.outcome = Outcome::Pass;
            rep.path = "syntactic-zero";
            rep.notes.push_back("difference vanishes after TRR reduction");
            return finish();
        }
        MembershipResult mr = engine.run(target);
        rep.engine_config["columns"] = std::to_string(mr.columns);
        rep.engine_config["rounds"] = std::to_string(mr.rounds);
        if (mr.member) {
            TensorPoly check = expand_certificate(mr.certificate, rules);
            rep.certificate_entries = mr.certificate.entries.size();
            if (check == target) {
                rep.outcome = Outcome::Pass;
                rep.path = "certificate";
            } else {
                rep.outcome = Outcome::Fail;
                rep.path = "certificate";
                TensorPoly diff = check - target;
                rep.residual_terms = diff.size();
                rep.residual = expr::print_canonical(diff);
                rep.notes.push_back("certificate re-expansion does not reproduce the target");
            }
            return finish();
        }
        rep.outcome = Outcome::Fail;
        rep.residual_terms = mr.residual.size();
        rep.residual = expr::print_canonical(mr.residual);
        if (mr.bounds_exhausted) rep.notes.push_back("bounds exhausted before membership was decided");
        else rep.notes.push_back("target is outside the span of all discovered generator instances");
        return finish();
    } catch (const std::exception& e) {
        rep.outcome = Outcome::Error;
        rep.error = e.what();
        return finish();
    }
}

}  // namespace gwv::rewrite
