#pragma once

// T-elimination rules generated from the genus-0 and genus-1 recursion
// relations by covariant differentiation, and the directed reducer.

#include "gwv/rewrite/expand.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace gwv::rewrite {

/// <<tau_+(W1) W2 .. Wk>>_g  ->  rhs(W1..Wk). The rhs is a pure polynomial over
/// the formal slots W1..Wk and carries no tau_+ on W1.
struct RewriteRule {
    int genus = 0;
    int arity = 0;
    TensorPoly rhs;
    std::string base;  // "rho0" or "rho1"
    int order = 0;     // number of covariant derivatives of the base

    /// The rule as a vanishing polynomial: lhs - rhs.
    TensorPoly equation() const {
        TensorPoly p;
        Correlator lead{genus, {}};
        auto slots = tensors::detail::formal_slots(arity);
        for (int i = 0; i < arity; ++i) lead.args.push_back(Arg::slot(slots[i], i == 0 ? 1 : 0));
        p.add(Monomial{Rational(1), {lead}});
        p.add(rhs, Rational(-1));
        return p;
    }
};

class ArityOverflow : public expr::ExprError {
public:
    using expr::ExprError::ExprError;
};

inline RewriteRule make_rule(int genus, int arity) {
    auto slots = tensors::detail::formal_slots(arity);
    TensorPoly base;
    std::vector<SlotId> dirs;
    RewriteRule r;
    r.genus = genus;
    r.arity = arity;
    if (genus == 0) {
        if (arity < 3) throw expr::ExprError("genus-0 rules start at arity 3");
        base = tensor_body("rho0");
        // rho0(W1, W2, W3) -> rho0(W1, W_{k-1}, W_k); derivatives along W2..W_{k-2}
        TensorPoly moved;
        for (const auto& [k, m] : base) {
            Monomial x = m;
            for (auto& f : x.factors)
                for (auto& a : f.args)
                    if (!a.is_dummy()) {
                        if (a.id == slots[1]) a.id = slots[arity - 2];
                        else if (a.id == slots[2]) a.id = slots[arity - 1];
                    }
            moved.add(x);
        }
        base = moved;
        for (int i = 1; i < arity - 2; ++i) dirs.push_back(slots[i]);
        r.base = "rho0";
        r.order = arity - 3;
    } else if (genus == 1) {
        if (arity < 1) throw expr::ExprError("genus-1 rules start at arity 1");
        base = tensor_body("rho1");
        for (int i = 1; i < arity; ++i) dirs.push_back(slots[i]);
        r.base = "rho1";
        r.order = arity - 1;
    } else {
        throw expr::ExprError("rules exist only for genus 0 and 1");
    }
    TensorPoly eq = derive_covariant(base, dirs);
    // lead term has coefficient 1; everything else is the rule's right side
    Correlator lead{genus, {}};
    for (int i = 0; i < arity; ++i) lead.args.push_back(Arg::slot(slots[i], i == 0 ? 1 : 0));
    TensorPoly leadp(Monomial{Rational(1), {lead}});
    const auto& [lk, lm] = *leadp.begin();
    if (eq.coeff(lk) != Rational(1)) throw expr::ExprError("rule generation: unexpected leading coefficient");
    r.rhs = leadp - eq;
    for (const auto& [k, m] : r.rhs)
        for (const auto& f : m.factors)
            for (const auto& a : f.args)
                if (a.shift > 0) throw expr::ExprError("rule generation: shifted argument in right side");
    return r;
}

struct RuleSet {
    int max_arity_g0 = 7;
    int max_arity_g1 = 5;
    std::map<std::pair<int, int>, RewriteRule> rules;  // (genus, arity)

    const RewriteRule* find(int genus, int arity) const {
        auto it = rules.find({genus, arity});
        return it == rules.end() ? nullptr : &it->second;
    }
};

inline RuleSet build_ruleset(int max_arity_g0 = 7, int max_arity_g1 = 5) {
    if (max_arity_g0 < 3 || max_arity_g1 < 1) throw expr::ExprError("rule arity bounds too small");
    RuleSet rs;
    rs.max_arity_g0 = max_arity_g0;
    rs.max_arity_g1 = max_arity_g1;
    for (int k = 3; k <= max_arity_g0; ++k) rs.rules.emplace(std::make_pair(0, k), make_rule(0, k));
    for (int k = 1; k <= max_arity_g1; ++k) rs.rules.emplace(std::make_pair(1, k), make_rule(1, k));
    return rs;
}

/// Rules available from the derivatives of rho0 and rho1 up to the given
/// orders; -1 means the generator is absent.
inline RuleSet ruleset_for_orders(int max_order_rho0, int max_order_rho1) {
    RuleSet rs;
    rs.max_arity_g0 = max_order_rho0 + 3;
    rs.max_arity_g1 = max_order_rho1 + 1;
    for (int k = 3; k <= rs.max_arity_g0; ++k) rs.rules.emplace(std::make_pair(0, k), make_rule(0, k));
    for (int k = 1; k <= rs.max_arity_g1; ++k) rs.rules.emplace(std::make_pair(1, k), make_rule(1, k));
    return rs;
}

/// A factor is reducible when it is genus 0 of arity >= 3 or genus 1, and
/// carries a shifted argument.
inline bool reducible(const Correlator& f) {
    if (f.genus == 0 ? f.arity() < 3 : f.genus != 1) return false;
    for (const auto& a : f.args)
        if (a.shift > 0) return true;
    return false;
}

/// Applies the rule to factor `fi` of the canonical monomial `m`.
inline TensorPoly apply_rule(const RewriteRule& rule, const Monomial& m, std::size_t fi) {
    const Correlator& f = m.factors[fi];
    std::vector<Arg> roles;
    std::size_t dist = f.args.size();
    for (std::size_t i = 0; i < f.args.size(); ++i)
        if (f.args[i].shift > 0) {
            dist = i;
            break;
        }
    Arg x = f.args[dist];
    x.shift -= 1;
    roles.push_back(x);
    for (std::size_t i = 0; i < f.args.size(); ++i)
        if (i != dist) roles.push_back(f.args[i]);

    std::vector<Correlator> rest;
    for (std::size_t i = 0; i < m.factors.size(); ++i)
        if (i != fi) rest.push_back(m.factors[i]);
    std::int32_t off = expr::max_dummy_id(m.factors) + 1;
    auto slots = tensors::detail::formal_slots(rule.arity);

    TensorPoly out;
    for (const auto& [k, t] : rule.rhs) {
        Monomial inst{m.coeff * t.coeff, rest};
        for (Correlator c : t.factors) {
            for (auto& a : c.args) {
                if (a.is_dummy()) {
                    a.id += off;
                    continue;
                }
                auto it = std::find(slots.begin(), slots.end(), a.id);
                Arg b = roles[it - slots.begin()];
                b.shift += a.shift;
                a = b;
            }
            inst.factors.push_back(std::move(c));
        }
        out.add(inst);
    }
    return out;
}

/// Directed TRR reduction with memoization per canonical unit monomial.
class Reducer {
public:
    /// A strict reducer throws ArityOverflow on a reducible factor without a
    /// rule; a lenient one leaves such factors in place.
    explicit Reducer(std::shared_ptr<const RuleSet> rules, bool strict = true)
        : rules_(std::move(rules)), strict_(strict) {}

    TensorPoly reduce(const TensorPoly& p) {
        TensorPoly out;
        for (const auto& [k, m] : p) out.add(reduce_unit(k, m), m.coeff);
        return out;
    }

    int max_order_used(int genus) const {
        auto it = used_.find(genus);
        return it == used_.end() ? -1 : it->second;
    }
    std::size_t memo_size() const { return memo_.size(); }

private:
    std::shared_ptr<const RuleSet> rules_;
    bool strict_;
    std::map<expr::Key, TensorPoly> memo_;
    std::map<int, int> used_;

    const TensorPoly& reduce_unit(const expr::Key& k, const Monomial& m) {
        if (auto it = memo_.find(k); it != memo_.end()) return it->second;
        Monomial unit{Rational(1), m.factors};
        TensorPoly result;
        std::size_t fi = 0;
        const RewriteRule* rule = nullptr;
        for (; fi < unit.factors.size(); ++fi) {
            const Correlator& f = unit.factors[fi];
            if (!reducible(f)) continue;
            rule = rules_->find(f.genus, static_cast<int>(f.arity()));
            if (rule) break;
            if (strict_)
                throw ArityOverflow("arity overflow: no rule for " + describe(f) + " (genus " +
                                    std::to_string(f.genus) + ", arity " + std::to_string(f.arity()) + ")");
        }
        if (!rule) {
            result.add_canonical(k, unit);
        } else {
            auto& u = used_[rule->genus];
            u = std::max(u, rule->order);
            TensorPoly step = apply_rule(*rule, unit, fi);
            for (const auto& [sk, sm] : step) result.add(reduce_unit(sk, sm), sm.coeff);
        }
        return memo_.emplace(k, std::move(result)).first->second;
    }

    static std::string describe(const Correlator& f) {
        std::string s = "<<";
        for (const auto& a : f.args) {
            std::string b = a.is_dummy() ? "g" + std::to_string(a.id) : expr::slot_name(a.id);
            for (int i = 0; i < a.shift; ++i) b = "tau+(" + b + ")";
            s += " " + b;
        }
        return s + " >>_" + std::to_string(f.genus);
    }
};

inline TensorPoly trr_reduce(const TensorPoly& p, const RuleSet& rules) {
    Reducer r(std::make_shared<const RuleSet>(rules));
    return r.reduce(p);
}

}  // namespace gwv::rewrite
