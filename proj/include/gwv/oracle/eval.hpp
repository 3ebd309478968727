#pragma once

// Exact evaluation of expression trees and pure polynomials in the point model.
// Covariant derivatives are directional derivatives of the flat connection,
// computed with nilpotent infinitesimals: the point is t + delta where delta
// carries one epsilon per enclosing nabla.

#include "gwv/expr/tree.hpp"
#include "gwv/oracle/point.hpp"
#include "gwv/tensors.hpp"

#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwv::oracle {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rational polynomial in nilpotent epsilons (eps_i^2 = 0), keyed by bitmask.
class Dual {
public:
    Dual() = default;
    Dual(const Rational& r) {  // NOLINT(google-explicit-constructor)
        if (!r.is_zero()) c_[0] = r;
    }

    bool is_zero() const { return c_.empty(); }
    Rational real() const {
        auto it = c_.find(0);
        return it == c_.end() ? Rational(0) : it->second;
    }
    std::uint32_t support() const {
        std::uint32_t m = 0;
        for (const auto& [k, v] : c_) m |= k;
        return m;
    }
    const std::map<std::uint32_t, Rational>& terms() const { return c_; }

    void add(std::uint32_t mask, const Rational& v) {
        if (v.is_zero()) return;
        auto [it, fresh] = c_.emplace(mask, v);
        if (!fresh) {
            it->second += v;
            if (it->second.is_zero()) c_.erase(it);
        }
    }
    static Dual eps(int bit) {
        Dual d;
        d.c_[1u << bit] = Rational(1);
        return d;
    }
    /// Coefficient of eps_bit, as a dual in the remaining epsilons.
    Dual part(int bit) const {
        Dual d;
        const std::uint32_t b = 1u << bit;
        for (const auto& [k, v] : c_)
            if (k & b) d.add(k & ~b, v);
        return d;
    }

    Dual& operator+=(const Dual& o) {
        for (const auto& [k, v] : o.c_) add(k, v);
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        for (const auto& [k, v] : o.c_) add(k, -v);
        return *this;
    }
    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r;
        for (const auto& [ka, va] : a.c_)
            for (const auto& [kb, vb] : b.c_)
                if (!(ka & kb)) r.add(ka | kb, va * vb);
        return r;
    }
    friend bool operator==(const Dual& a, const Dual& b) { return a.c_ == b.c_; }

private:
    std::map<std::uint32_t, Rational> c_;
};

using DualVec = std::map<int, Dual>;

namespace detail {

inline void add_into(DualVec& acc, const DualVec& x, const Dual& c = Dual(Rational(1))) {
    for (const auto& [n, v] : x) {
        Dual p = v * c;
        if (p.is_zero()) continue;
        auto& slot = acc[n];
        slot += p;
        if (slot.is_zero()) acc.erase(n);
    }
}

inline DualVec lift(const LevelVec& v) {
    DualVec d;
    for (const auto& [n, x] : v)
        if (!x.is_zero()) d[n] = Dual(x);
    return d;
}

inline DualVec tau0() { return DualVec{{0, Dual(Rational(1))}}; }

}  // namespace detail

/// Evaluates expressions at one state. Correlator values at the base point are
/// memoized per instance.
class Evaluator {
public:
    explicit Evaluator(const PointState& state) : state_(state) { state_.check_policy(); }

    Rational scalar(const expr::SExpr& e) {
        Frame f;
        Dual d = eval(e, f, 0);
        if (d.support() != 0) throw EvalError("internal: infinitesimal survived evaluation");
        return d.real();
    }

    LevelVec vector(const expr::VExpr& v) {
        Frame f;
        LevelVec out;
        for (const auto& [n, d] : eval(v, f, 0))
            if (!d.real().is_zero()) out[n] = d.real();
        return out;
    }

    /// Value of a pure polynomial: dummies are tau_0 (N = 1), a slot carrying
    /// shift s is its vector raised s levels.
    Rational poly(const expr::TensorPoly& p) {
        Rational total;
        for (const auto& [k, m] : p) {
            Rational prod = m.coeff;
            for (const auto& f : m.factors) {
                std::vector<DualVec> args;
                for (const auto& a : f.args) {
                    LevelVec base;
                    if (a.is_dummy()) base[0] = Rational(1);
                    else {
                        auto it = state_.slots.find(a.id);
                        if (it == state_.slots.end()) throw EvalError("unbound slot " + expr::slot_name(a.id));
                        base = it->second;
                    }
                    LevelVec sh;
                    for (const auto& [n, x] : base) sh[n + a.shift] = x;
                    args.push_back(detail::lift(sh));
                }
                prod *= correlator(f.genus, args, DualVec{}).real();
                if (prod.is_zero()) break;
            }
            total += prod;
        }
        return total;
    }

    const PointState& state() const { return state_; }

private:
    const PointState& state_;
    std::map<std::pair<int, std::vector<int>>, Rational> memo_;

    // slot environment of a named-tensor body, and the current perturbation
    struct Frame {
        const std::map<expr::SlotId, DualVec>* env = nullptr;
        DualVec delta;
    };

    Rational base_value(int g, std::vector<int> levels) {
        std::sort(levels.begin(), levels.end());
        auto key = std::make_pair(g, levels);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Rational v = correlator_value(g, levels, state_);
        return memo_.emplace(std::move(key), v).first->second;
    }

    /// <<X1 .. Xk>>_g at t + delta, by Taylor expansion in delta.
    Dual correlator(int g, const std::vector<DualVec>& args, const DualVec& delta) {
        Dual total;
        std::uint32_t dm = 0;
        for (const auto& [n, d] : delta) dm |= d.support();
        const int max_j = std::popcount(dm);
        Rational inv_fact(1);
        for (int j = 0; j <= max_j; ++j) {
            if (j > 0) inv_fact /= Rational(j);
            std::vector<const DualVec*> all;
            for (const auto& a : args) all.push_back(&a);
            for (int i = 0; i < j; ++i) all.push_back(&delta);
            // extras from t on levels >= 2 only raise the degree budget
            const long bound = state_.low_support() ? std::numeric_limits<long>::max()
                                                    : 3L * g - 3 + static_cast<long>(all.size());
            std::vector<int> lv;
            Dual part;
            std::function<void(std::size_t, long, const Dual&)> rec = [&](std::size_t i, long sum,
                                                                       const Dual& w) {
                if (i == all.size()) {
                    Rational x = base_value(g, lv);
                    if (!x.is_zero()) part += w * Dual(x);
                    return;
                }
                for (const auto& [n, c] : *all[i]) {
                    if (n < 0) continue;
                    if (sum + n > bound) break;
                    Dual w2 = w * c;
                    if (w2.is_zero()) continue;
                    lv.push_back(n);
                    rec(i + 1, sum + n, w2);
                    lv.pop_back();
                }
            };
            rec(0, 0, Dual(Rational(1)));
            Dual scaled;
            for (const auto& [k, v] : part.terms()) scaled.add(k, v * inv_fact);
            total += scaled;
        }
        return total;
    }

    DualVec eval(const expr::VExpr& v, Frame& f, int depth) {
        using expr::VKind;
        switch (v->kind) {
            case VKind::Slot: {
                if (f.env) {
                    auto it = f.env->find(v->slot);
                    if (it != f.env->end()) return it->second;
                }
                auto it = state_.slots.find(v->slot);
                if (it == state_.slots.end()) throw EvalError("unbound slot " + expr::slot_name(v->slot));
                return detail::lift(it->second);
            }
            case VKind::Gamma: return detail::tau0();
            case VKind::TauPlus: {
                DualVec out;
                for (auto& [n, d] : eval(v->kids[0], f, depth)) out[n + 1] = d;
                return out;
            }
            case VKind::TauMinus: {
                DualVec out;
                for (auto& [n, d] : eval(v->kids[0], f, depth))
                    if (n > 0) out[n - 1] = d;
                return out;
            }
            case VKind::T: {
                DualVec x = eval(v->kids[0], f, depth);
                DualVec out;
                for (auto& [n, d] : x) out[n + 1] = d;
                Dual c = correlator(0, {x, detail::tau0()}, f.delta);
                detail::add_into(out, detail::tau0(), Dual(Rational(-1)) * c);
                return out;
            }
            case VKind::Bullet: {
                DualVec a = eval(v->kids[0], f, depth), b = eval(v->kids[1], f, depth);
                Dual c = correlator(0, {a, b, detail::tau0()}, f.delta);
                DualVec out;
                detail::add_into(out, detail::tau0(), c);
                return out;
            }
            case VKind::Lin: {
                DualVec out;
                for (std::size_t i = 0; i < v->kids.size(); ++i) {
                    Dual c = eval(v->coeffs[i], f, depth);
                    if (c.is_zero()) continue;
                    detail::add_into(out, eval(v->kids[i], f, depth), c);
                }
                return out;
            }
            case VKind::String: {
                // S = -sum_m t~_m tau_{m-1}, t~_1 = t_1 - 1
                DualVec tt = detail::lift(state_.t);
                detail::add_into(tt, f.delta);
                DualVec out{{0, Dual(Rational(1))}};
                for (const auto& [m, x] : tt)
                    if (m >= 1) detail::add_into(out, DualVec{{m - 1, x}}, Dual(Rational(-1)));
                return out;
            }
        }
        throw EvalError("unknown vector node");
    }

    Dual eval(const expr::SExpr& e, Frame& f, int depth) {
        using expr::SKind;
        switch (e->kind) {
            case SKind::Const: return Dual(e->value);
            case SKind::Corr: {
                std::vector<DualVec> args;
                for (const auto& a : e->vargs) args.push_back(eval(a, f, depth));
                return correlator(e->genus, args, f.delta);
            }
            case SKind::Sum: {
                Dual s;
                for (const auto& k : e->kids) s += eval(k, f, depth);
                return s;
            }
            case SKind::Prod: {
                Dual p(Rational(1));
                for (const auto& k : e->kids) {
                    p = p * eval(k, f, depth);
                    if (p.is_zero()) break;
                }
                return p;
            }
            case SKind::Scale: return Dual(e->value) * eval(e->kids[0], f, depth);
            case SKind::Nabla: {
                if (depth >= 31) throw EvalError("nabla nesting too deep");
                DualVec dir = eval(e->vargs[0], f, depth);
                Frame inner{f.env, f.delta};
                detail::add_into(inner.delta, dir, Dual::eps(depth));
                return eval(e->kids[0], inner, depth + 1).part(depth);
            }
            case SKind::Named: {
                const auto& def = tensors::definition(e->name);
                if (static_cast<int>(e->vargs.size()) != def.arity)
                    throw EvalError(e->name + " expects " + std::to_string(def.arity) + " arguments");
                // tensorial: arguments are frozen at their values at the current point
                std::map<expr::SlotId, DualVec> env;
                auto slots = tensors::detail::formal_slots(def.arity);
                for (int i = 0; i < def.arity; ++i) env[slots[i]] = eval(e->vargs[i], f, depth);
                Frame inner{&env, f.delta};
                return eval(def.body, inner, depth);
            }
        }
        throw EvalError("unknown scalar node");
    }
};

inline Rational eval_expr(const expr::SExpr& e, const PointState& s) { return Evaluator(s).scalar(e); }
inline LevelVec eval_vector(const expr::VExpr& v, const PointState& s) { return Evaluator(s).vector(v); }
inline Rational eval_poly(const expr::TensorPoly& p, const PointState& s) { return Evaluator(s).poly(p); }

}  // namespace gwv::oracle
