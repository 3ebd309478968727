#pragma once

// Definitional expansion: ExprTree -> pure-correlator TensorPoly.
//
// T(X) = tau_+X - <<X g^d>>_0 g_d, X . Y = <<X Y g^d>>_0 g_d, and nabla along a
// parallel basic vector inserts it into each correlator (Leibniz). Every
// construct is function-linear in its vector arguments except nabla, whose
// body is differentiated. Named tensors are expanded once over formal slots
// and then substituted tensorially.

#include "gwv/expr/poly.hpp"
#include "gwv/expr/tree.hpp"
#include "gwv/tensors.hpp"

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace gwv::rewrite {

using expr::Arg;
using expr::Correlator;
using expr::Monomial;
using expr::SExpr;
using expr::SKind;
using expr::SlotId;
using expr::TensorPoly;
using expr::VExpr;
using expr::VKind;

/// Inserts `b` into each factor in turn (Leibniz rule).
inline void derive_into(const std::vector<Correlator>& fs, const Rational& c, const Arg& b,
                        std::vector<Monomial>& out) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
        Monomial m{c, fs};
        m.factors[i].args.push_back(b);
        out.push_back(std::move(m));
    }
}

/// Covariant derivative of a pure polynomial along a parallel basic vector.
inline TensorPoly derive(const TensorPoly& p, const Arg& b) {
    TensorPoly r;
    std::vector<Monomial> tmp;
    Arg bb = b;
    if (bb.is_dummy()) throw expr::ExprError("derive: direction must be closed");
    for (const auto& [k, m] : p) {
        tmp.clear();
        derive_into(m.factors, m.coeff, bb, tmp);
        for (const auto& t : tmp) r.add(t);
    }
    return r;
}

/// Covariant derivative along a fresh parallel slot.
inline TensorPoly derive_covariant(const TensorPoly& p, SlotId dir) { return derive(p, Arg::slot(dir)); }

inline TensorPoly derive_covariant(const TensorPoly& p, const std::vector<SlotId>& dirs) {
    TensorPoly r = p;
    for (SlotId d : dirs) r = derive_covariant(r, d);
    return r;
}

const TensorPoly& tensor_body(const std::string& name);

class Expander {
public:
    struct VTerm {
        Rational coeff;
        std::vector<Correlator> factors;  // scalar coefficient function
        Arg basic;
    };
    using Raw = std::vector<Monomial>;
    using Vec = std::vector<VTerm>;
    using Env = std::map<char, std::int32_t>;

    TensorPoly scalar(const SExpr& e) {
        expr::check_closed(e);
        Env env;
        return close(expand(e, env));
    }

    /// Componentwise image of a vector field: each basic b becomes <<b>>_probe.
    TensorPoly vector(const VExpr& v, int probe_genus = 99) {
        Env env;
        auto use = expr::index_use(v);
        if (!use.free.empty()) throw expr::DummyPairingError("vector expression has an unpaired dummy index");
        bind_here(v, env, {});
        Vec x = vexpand(v, env);
        Raw r;
        for (auto& t : x) {
            Monomial m{t.coeff, std::move(t.factors)};
            m.factors.push_back(Correlator{probe_genus, {t.basic}});
            r.push_back(std::move(m));
        }
        return close(r);
    }

private:
    std::int32_t next_ = 1000;
    std::unordered_map<const void*, std::set<char>> free_cache_;

    std::int32_t fresh() { return next_++; }

    const std::set<char>& free_letters(const void* key, const std::function<expr::IndexUse()>& f) {
        auto it = free_cache_.find(key);
        if (it != free_cache_.end()) return it->second;
        std::set<char> s;
        for (auto [c, v] : f().free) s.insert(c);
        return free_cache_[key] = std::move(s);
    }
    const std::set<char>& free_of(const SExpr& e) {
        return free_letters(e.get(), [&] { return expr::index_use(e); });
    }
    const std::set<char>& free_of(const VExpr& v) {
        return free_letters(v.get(), [&] { return expr::index_use(v); });
    }

    // Assigns fresh ids to letters contracted at this node (free in some child
    // but not free in the node itself).
    template <class Node>
    void bind_here(const Node& n, Env& env, const std::set<char>& node_free) {
        std::set<char> seen;
        auto visit = [&](const std::set<char>& child_free) {
            for (char c : child_free)
                if (!node_free.count(c) && !seen.count(c)) {
                    seen.insert(c);
                    env[c] = fresh();
                }
        };
        for (const auto& k : n->kids) visit(free_of(k));
        if constexpr (std::is_same_v<Node, SExpr>) {
            for (const auto& v : n->vargs) visit(free_of(v));
        } else {
            for (const auto& c : n->coeffs) visit(free_of(c));
        }
    }

    Raw offset_copy(const TensorPoly& p) {
        Raw r;
        std::int32_t base = next_;
        std::int32_t top = -1;
        for (const auto& [k, m] : p) {
            Monomial x = m;
            for (auto& f : x.factors)
                for (auto& a : f.args)
                    if (a.is_dummy()) {
                        top = std::max(top, a.id);
                        a.id += base;
                    }
            r.push_back(std::move(x));
        }
        next_ += top + 1;
        return r;
    }

    static TensorPoly close(const Raw& r) {
        TensorPoly p;
        for (const auto& m : r) p.add(m);
        return p;
    }

    // Merges like terms when the result has no open dummies.
    Raw compress(Raw r, bool closed) {
        if (!closed || r.size() < 2) return r;
        return offset_copy(close(r));
    }

    static Raw multiply(const Raw& a, const Raw& b) {
        Raw r;
        r.reserve(a.size() * b.size());
        for (const auto& x : a)
            for (const auto& y : b) {
                Monomial m{x.coeff * y.coeff, x.factors};
                m.factors.insert(m.factors.end(), y.factors.begin(), y.factors.end());
                r.push_back(std::move(m));
            }
        return r;
    }

    // All combinations of one term from each vector: (coeff, factors, basics).
    struct Combo {
        Rational coeff;
        std::vector<Correlator> factors;
        std::vector<Arg> basics;
    };
    static std::vector<Combo> combos(const std::vector<Vec>& vs) {
        std::vector<Combo> out{Combo{Rational(1), {}, {}}};
        for (const auto& v : vs) {
            std::vector<Combo> next;
            next.reserve(out.size() * v.size());
            for (const auto& c : out)
                for (const auto& t : v) {
                    Combo n{c.coeff * t.coeff, c.factors, c.basics};
                    n.factors.insert(n.factors.end(), t.factors.begin(), t.factors.end());
                    n.basics.push_back(t.basic);
                    next.push_back(std::move(n));
                }
            out = std::move(next);
        }
        return out;
    }

    Raw expand(const SExpr& e, const Env& outer) {
        Env env = outer;
        switch (e->kind) {
            case SKind::Const:
                if (e->value.is_zero()) return {};
                return {Monomial{e->value, {}}};
            case SKind::Sum: {
                Raw r;
                for (const auto& k : e->kids) {
                    Raw x = expand(k, env);
                    r.insert(r.end(), std::make_move_iterator(x.begin()), std::make_move_iterator(x.end()));
                }
                return compress(std::move(r), free_of(e).empty());
            }
            case SKind::Scale: {
                Raw r = expand(e->kids[0], env);
                for (auto& m : r) m.coeff *= e->value;
                return r;
            }
            default:
                break;
        }
        bind_here(e, env, free_of(e));
        switch (e->kind) {
            case SKind::Prod: {
                Raw r{Monomial{Rational(1), {}}};
                for (const auto& k : e->kids) {
                    r = multiply(r, expand(k, env));
                    if (r.empty()) return r;
                }
                return compress(std::move(r), free_of(e).empty());
            }
            case SKind::Corr: {
                std::vector<Vec> vs;
                for (const auto& a : e->vargs) vs.push_back(vexpand(a, env));
                Raw r;
                for (auto& c : combos(vs)) {
                    Monomial m{c.coeff, std::move(c.factors)};
                    m.factors.push_back(Correlator{e->genus, std::move(c.basics)});
                    r.push_back(std::move(m));
                }
                return r;
            }
            case SKind::Nabla: {
                Vec dir = vexpand(e->vargs[0], env);
                Raw body = expand(e->kids[0], env);
                Raw r;
                for (const auto& t : dir) {
                    Raw d;
                    for (const auto& m : body) derive_into(m.factors, m.coeff * t.coeff, t.basic, d);
                    for (auto& m : d) {
                        m.factors.insert(m.factors.end(), t.factors.begin(), t.factors.end());
                        r.push_back(std::move(m));
                    }
                }
                return compress(std::move(r), free_of(e).empty());
            }
            case SKind::Named: {
                const TensorPoly& body = tensor_body(e->name);
                std::vector<Vec> vs;
                for (const auto& a : e->vargs) vs.push_back(vexpand(a, env));
                auto slots = tensors::detail::formal_slots(static_cast<int>(vs.size()));
                Raw r;
                for (auto& c : combos(vs)) {
                    Raw inst = offset_copy(body);
                    for (auto& m : inst) {
                        m.coeff *= c.coeff;
                        for (auto& f : m.factors)
                            for (auto& a : f.args) {
                                if (a.is_dummy()) continue;
                                auto it = std::find(slots.begin(), slots.end(), a.id);
                                if (it == slots.end()) throw expr::ExprError("tensor body has a stray slot");
                                Arg b = c.basics[it - slots.begin()];
                                b.shift += a.shift;
                                a = b;
                            }
                        m.factors.insert(m.factors.end(), c.factors.begin(), c.factors.end());
                        r.push_back(std::move(m));
                    }
                }
                return compress(std::move(r), free_of(e).empty());
            }
            default:
                throw expr::ExprError("expand: unexpected node");
        }
    }

    Vec vexpand(const VExpr& v, const Env& outer) {
        Env env = outer;
        switch (v->kind) {
            case VKind::Slot: return {VTerm{Rational(1), {}, Arg::slot(v->slot)}};
            case VKind::Gamma: {
                auto it = env.find(v->letter);
                if (it == env.end()) throw expr::DummyPairingError(std::string("dummy index '") + v->letter + "' is not bound");
                return {VTerm{Rational(1), {}, Arg::dummy(it->second, v->raised)}};
            }
            case VKind::TauMinus:
            case VKind::String:
                throw expr::ExprError("tau- and S are numeric-only constructs");
            default:
                break;
        }
        bind_here(v, env, free_of(v));
        switch (v->kind) {
            case VKind::TauPlus: {
                Vec x = vexpand(v->kids[0], env);
                for (auto& t : x) t.basic.shift += 1;
                return x;
            }
            case VKind::T: {
                Vec x = vexpand(v->kids[0], env);
                Vec r;
                for (auto& t : x) {
                    VTerm a = t;
                    a.basic.shift += 1;
                    r.push_back(std::move(a));
                    std::int32_t d = fresh();
                    VTerm b{-t.coeff, t.factors, Arg::dummy(d, false)};
                    b.factors.push_back(Correlator{0, {t.basic, Arg::dummy(d, true)}});
                    r.push_back(std::move(b));
                }
                return r;
            }
            case VKind::Bullet: {
                Vec x = vexpand(v->kids[0], env);
                Vec y = vexpand(v->kids[1], env);
                Vec r;
                for (const auto& s : x)
                    for (const auto& t : y) {
                        std::int32_t d = fresh();
                        VTerm n{s.coeff * t.coeff, s.factors, Arg::dummy(d, false)};
                        n.factors.insert(n.factors.end(), t.factors.begin(), t.factors.end());
                        n.factors.push_back(Correlator{0, {s.basic, t.basic, Arg::dummy(d, true)}});
                        r.push_back(std::move(n));
                    }
                return r;
            }
            case VKind::Lin: {
                Vec r;
                for (std::size_t i = 0; i < v->kids.size(); ++i) {
                    Raw c = expand(v->coeffs[i], env);
                    Vec x = vexpand(v->kids[i], env);
                    for (const auto& m : c)
                        for (const auto& t : x) {
                            VTerm n{m.coeff * t.coeff, m.factors, t.basic};
                            n.factors.insert(n.factors.end(), t.factors.begin(), t.factors.end());
                            r.push_back(std::move(n));
                        }
                }
                return r;
            }
            default:
                throw expr::ExprError("expand: unexpected vector node");
        }
    }
};

/// Pure-correlator normal form of a closed scalar expression.
inline TensorPoly expand_definitional(const SExpr& e) {
    Expander x;
    return x.scalar(e);
}

/// Pure form of a closed vector expression, wrapped componentwise in a probe correlator.
inline TensorPoly expand_vector(const VExpr& v, int probe_genus = 99) {
    Expander x;
    return x.vector(v, probe_genus);
}

/// Expansion of a named tensor over its formal slots W1..Wn; cached.
inline const TensorPoly& tensor_body(const std::string& name) {
    static std::recursive_mutex mu;
    static std::map<std::string, TensorPoly> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    const auto& def = tensors::definition(name);
    TensorPoly p = expand_definitional(def.body);
    return cache.emplace(name, std::move(p)).first->second;
}

}  // namespace gwv::rewrite
