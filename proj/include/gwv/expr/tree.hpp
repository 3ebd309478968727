#pragma once

// Pre-normalization expression trees for scalar tensors and vector fields.

#include "gwv/expr/poly.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gwv::expr {

struct VNode;
struct SNode;
using VExpr = std::shared_ptr<const VNode>;
using SExpr = std::shared_ptr<const SNode>;

enum class VKind { Slot, Gamma, TauPlus, TauMinus, T, Bullet, Lin, String };

struct VNode {
    VKind kind;
    SlotId slot = 0;     // Slot
    char letter = 0;     // Gamma
    bool raised = false; // Gamma
    std::vector<VExpr> kids;
    std::vector<SExpr> coeffs;  // Lin: coeffs[i] multiplies kids[i]
};

enum class SKind { Const, Corr, Sum, Prod, Scale, Nabla, Named };

struct SNode {
    SKind kind;
    int genus = 0;            // Corr
    Rational value{0};        // Const, Scale
    std::string name;         // Named
    std::vector<VExpr> vargs; // Corr args, Named args, Nabla direction
    std::vector<SExpr> kids;  // Sum, Prod, Scale (1), Nabla body (1)
};

// ---------------------------------------------------------------------------
// Builders

namespace build {

inline VExpr slot(SlotId s) { return std::make_shared<const VNode>(VNode{VKind::Slot, s, 0, false, {}, {}}); }
inline VExpr slot(const std::string& name) { return slot(slot_id(name)); }
inline VExpr gamma(char letter, bool raised) {
    return std::make_shared<const VNode>(VNode{VKind::Gamma, 0, letter, raised, {}, {}});
}
inline VExpr tau_plus(VExpr v) { return std::make_shared<const VNode>(VNode{VKind::TauPlus, 0, 0, false, {std::move(v)}, {}}); }
inline VExpr tau_minus(VExpr v) { return std::make_shared<const VNode>(VNode{VKind::TauMinus, 0, 0, false, {std::move(v)}, {}}); }
inline VExpr T(VExpr v) { return std::make_shared<const VNode>(VNode{VKind::T, 0, 0, false, {std::move(v)}, {}}); }
inline VExpr bullet(VExpr a, VExpr b) {
    return std::make_shared<const VNode>(VNode{VKind::Bullet, 0, 0, false, {std::move(a), std::move(b)}, {}});
}
inline VExpr string_field() { return std::make_shared<const VNode>(VNode{VKind::String, 0, 0, false, {}, {}}); }
inline VExpr lin(std::vector<SExpr> coeffs, std::vector<VExpr> vecs) {
    return std::make_shared<const VNode>(VNode{VKind::Lin, 0, 0, false, std::move(vecs), std::move(coeffs)});
}

inline SExpr constant(const Rational& v) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Const;
    n->value = v;
    return n;
}
inline SExpr corr(int genus, std::vector<VExpr> args) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Corr;
    n->genus = genus;
    n->vargs = std::move(args);
    return n;
}
inline SExpr sum(std::vector<SExpr> kids) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Sum;
    n->kids = std::move(kids);
    return n;
}
inline SExpr prod(std::vector<SExpr> kids) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Prod;
    n->kids = std::move(kids);
    return n;
}
inline SExpr scale(const Rational& c, SExpr e) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Scale;
    n->value = c;
    n->kids = {std::move(e)};
    return n;
}
inline SExpr nabla(VExpr dir, SExpr body) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Nabla;
    n->vargs = {std::move(dir)};
    n->kids = {std::move(body)};
    return n;
}
inline SExpr named(std::string name, std::vector<VExpr> args) {
    auto n = std::make_shared<SNode>();
    n->kind = SKind::Named;
    n->name = std::move(name);
    n->vargs = std::move(args);
    return n;
}
inline SExpr diff(SExpr a, SExpr b) { return sum({std::move(a), scale(Rational(-1), std::move(b))}); }

}  // namespace build

// ---------------------------------------------------------------------------
// Named-tensor vocabulary (bodies live in gwv/tensors.hpp).

/// Arity of a named tensor, or -1 if the name is unknown.
inline int tensor_arity(const std::string& name) {
    static const std::map<std::string, int> fixed = {
        {"rho0", 3}, {"C0", 4}, {"rho1", 1}, {"G", 4},  {"rho21", 1},
        {"rho22", 2}, {"rho23", 3}, {"A1", 1}, {"A2", 2}, {"B", 3},
    };
    if (auto it = fixed.find(name); it != fixed.end()) return it->second;
    if (name.size() >= 2 && name[0] == 'C' && name.size() <= 3 &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::stoi(name.substr(1)) + 4;
    return -1;
}

// ---------------------------------------------------------------------------
// Structural equality

bool equal(const VExpr& a, const VExpr& b);
bool equal(const SExpr& a, const SExpr& b);

inline bool equal(const VExpr& a, const VExpr& b) {
    if (a->kind != b->kind || a->slot != b->slot || a->letter != b->letter || a->raised != b->raised ||
        a->kids.size() != b->kids.size() || a->coeffs.size() != b->coeffs.size())
        return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    for (std::size_t i = 0; i < a->coeffs.size(); ++i)
        if (!equal(a->coeffs[i], b->coeffs[i])) return false;
    return true;
}

inline bool equal(const SExpr& a, const SExpr& b) {
    if (a->kind != b->kind || a->genus != b->genus || a->value != b->value || a->name != b->name ||
        a->vargs.size() != b->vargs.size() || a->kids.size() != b->kids.size())
        return false;
    for (std::size_t i = 0; i < a->vargs.size(); ++i)
        if (!equal(a->vargs[i], b->vargs[i])) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Printing (grammar syntax; Lin nodes have no surface syntax)

std::string to_string(const VExpr& v);
std::string to_string(const SExpr& e);

namespace detail {

inline std::string print_term(const SExpr& e);

inline std::string print_factor(const SExpr& e) {
    switch (e->kind) {
        case SKind::Corr: {
            std::string s = "<<";
            for (const auto& a : e->vargs) s += " " + to_string(a);
            return s + " >>_" + std::to_string(e->genus);
        }
        case SKind::Nabla:
            return "nabla[" + to_string(e->vargs[0]) + "](" + to_string(e->kids[0]) + ")";
        case SKind::Named: {
            std::string s = e->name + "(";
            for (std::size_t i = 0; i < e->vargs.size(); ++i) s += (i ? ", " : "") + to_string(e->vargs[i]);
            return s + ")";
        }
        default:
            return "(" + to_string(e) + ")";
    }
}

inline std::string print_product(const SExpr& e) {
    if (e->kind != SKind::Prod) return print_factor(e);
    std::string s;
    for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? " * " : "") + print_factor(e->kids[i]);
    return s;
}

// A term as it appears in a sum; `first` controls how a negative sign is rendered.
inline std::string print_signed_term(const SExpr& e, bool first) {
    auto join = [&](bool negative, const std::string& body) {
        if (first) return (negative ? "-" : "") + body;
        return (negative ? " - " : " + ") + body;
    };
    if (e->kind == SKind::Const) {
        if (e->value.sign() < 0) return join(true, (-e->value).str());
        return join(false, e->value.str());
    }
    if (e->kind == SKind::Scale) {
        const Rational& c = e->value;
        const SExpr& k = e->kids[0];
        // A scaled product whose product is itself a Const/Scale/Sum must be parenthesized.
        std::string body = (k->kind == SKind::Prod) ? print_product(k) : print_factor(k);
        if (c.sign() < 0) {
            Rational a = -c;
            return join(true, a.is_one() ? body : a.str() + " * " + body);
        }
        return join(false, c.str() + " * " + body);
    }
    return join(false, print_product(e));
}

}  // namespace detail

inline std::string to_string(const VExpr& v) {
    switch (v->kind) {
        case VKind::Slot: return slot_name(v->slot);
        case VKind::Gamma: return std::string(v->raised ? "g^" : "g_") + v->letter;
        case VKind::TauPlus: return "tau+(" + to_string(v->kids[0]) + ")";
        case VKind::TauMinus: return "tau-(" + to_string(v->kids[0]) + ")";
        case VKind::T: return "T(" + to_string(v->kids[0]) + ")";
        case VKind::Bullet: return "bullet(" + to_string(v->kids[0]) + ", " + to_string(v->kids[1]) + ")";
        case VKind::String: return "S";
        case VKind::Lin: {
            std::string s = "lin{";
            for (std::size_t i = 0; i < v->kids.size(); ++i)
                s += (i ? "; " : "") + to_string(v->coeffs[i]) + " : " + to_string(v->kids[i]);
            return s + "}";
        }
    }
    return "?";
}

inline std::string to_string(const SExpr& e) {
    if (e->kind == SKind::Sum) {
        if (e->kids.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
            const SExpr& k = e->kids[i];
            // nested sums are always parenthesized so that grouping survives a round trip
            if (k->kind == SKind::Sum)
                s += (i ? " + " : "") + detail::print_factor(k);
            else
                s += detail::print_signed_term(k, i == 0);
        }
        return s;
    }
    return detail::print_signed_term(e, true);
}

// ---------------------------------------------------------------------------
// Dummy-index discipline: every letter is used exactly twice per product,
// once raised and once lowered; sum branches must agree on free letters.

struct IndexUse {
    std::map<char, int> free;  // letter -> +1 raised / -1 lowered
    std::set<char> bound;
};

namespace detail {

inline void merge_into(IndexUse& acc, const IndexUse& x) {
    for (char c : x.bound) {
        if (acc.bound.count(c) || acc.free.count(c))
            throw DummyPairingError(std::string("dummy index '") + c + "' used more than twice");
        acc.bound.insert(c);
    }
    for (auto [c, v] : x.free) {
        if (acc.bound.count(c))
            throw DummyPairingError(std::string("dummy index '") + c + "' used more than twice");
        auto it = acc.free.find(c);
        if (it == acc.free.end()) {
            acc.free[c] = v;
            continue;
        }
        if (it->second == v)
            throw DummyPairingError(std::string("dummy index '") + c + "' contracted with equal variance");
        acc.free.erase(it);
        acc.bound.insert(c);
    }
}

}  // namespace detail

inline IndexUse index_use(const VExpr& v);
inline IndexUse index_use(const SExpr& e);

inline IndexUse index_use(const VExpr& v) {
    IndexUse u;
    switch (v->kind) {
        case VKind::Gamma: u.free[v->letter] = v->raised ? 1 : -1; return u;
        case VKind::Lin: {
            // each summand coeff*vec is one product; all summands must agree
            bool first = true;
            IndexUse out;
            for (std::size_t i = 0; i < v->kids.size(); ++i) {
                IndexUse t = index_use(v->coeffs[i]);
                detail::merge_into(t, index_use(v->kids[i]));
                if (first) out = t, first = false;
                else if (t.free != out.free)
                    throw DummyPairingError("linear combination branches disagree on free indices");
                else
                    out.bound.insert(t.bound.begin(), t.bound.end());
            }
            return out;
        }
        default:
            for (const auto& k : v->kids) detail::merge_into(u, index_use(k));
            return u;
    }
}

inline IndexUse index_use(const SExpr& e) {
    IndexUse u;
    switch (e->kind) {
        case SKind::Const: return u;
        case SKind::Sum: {
            bool first = true;
            for (const auto& k : e->kids) {
                IndexUse t = index_use(k);
                if (first) u = t, first = false;
                else if (t.free != u.free)
                    throw DummyPairingError("sum branches disagree on free dummy indices");
                else
                    u.bound.insert(t.bound.begin(), t.bound.end());
            }
            return u;
        }
        default:
            for (const auto& v : e->vargs) detail::merge_into(u, index_use(v));
            for (const auto& k : e->kids) detail::merge_into(u, index_use(k));
            return u;
    }
}

/// Throws DummyPairingError unless every dummy in `e` is properly contracted.
inline void check_closed(const SExpr& e) {
    IndexUse u = index_use(e);
    if (!u.free.empty())
        throw DummyPairingError(std::string("dummy index '") + u.free.begin()->first + "' used only once");
}

// ---------------------------------------------------------------------------
// Free slots, substitution, symmetrization

inline void collect_slots(const VExpr& v, std::set<SlotId>& out);
inline void collect_slots(const SExpr& e, std::set<SlotId>& out);

inline void collect_slots(const VExpr& v, std::set<SlotId>& out) {
    if (v->kind == VKind::Slot) out.insert(v->slot);
    for (const auto& k : v->kids) collect_slots(k, out);
    for (const auto& c : v->coeffs) collect_slots(c, out);
}
inline void collect_slots(const SExpr& e, std::set<SlotId>& out) {
    for (const auto& v : e->vargs) collect_slots(v, out);
    for (const auto& k : e->kids) collect_slots(k, out);
}

inline bool contains_numeric_only(const VExpr& v);
inline bool contains_numeric_only(const SExpr& e);
inline bool contains_numeric_only(const VExpr& v) {
    if (v->kind == VKind::TauMinus || v->kind == VKind::String) return true;
    for (const auto& k : v->kids)
        if (contains_numeric_only(k)) return true;
    for (const auto& c : v->coeffs)
        if (contains_numeric_only(c)) return true;
    return false;
}
inline bool contains_numeric_only(const SExpr& e) {
    for (const auto& v : e->vargs)
        if (contains_numeric_only(v)) return true;
    for (const auto& k : e->kids)
        if (contains_numeric_only(k)) return true;
    return false;
}

using Binding = std::map<SlotId, VExpr>;

namespace detail {

struct Renamer {
    std::set<char> taken;         // letters used by the bindings
    std::map<char, char> rename;  // body letter -> fresh letter

    char fresh_for(char c) {
        if (auto it = rename.find(c); it != rename.end()) return it->second;
        if (!taken.count(c)) {
            rename[c] = c;
            taken.insert(c);
            return c;
        }
        for (char x = 'a'; x <= 'z'; ++x)
            if (!taken.count(x)) {
                rename[c] = x;
                taken.insert(x);
                return x;
            }
        throw ExprError("substitute: out of dummy letters");
    }
};

inline void collect_letters(const VExpr& v, std::set<char>& out) {
    if (v->kind == VKind::Gamma) out.insert(v->letter);
    for (const auto& k : v->kids) collect_letters(k, out);
    for (const auto& c : v->coeffs) {
        std::function<void(const SExpr&)> rec = [&](const SExpr& e) {
            for (const auto& a : e->vargs) collect_letters(a, out);
            for (const auto& k : e->kids) rec(k);
        };
        rec(c);
    }
}

inline VExpr subst(const VExpr& v, const Binding& b, Renamer& r);
inline SExpr subst(const SExpr& e, const Binding& b, Renamer& r);

inline VExpr subst(const VExpr& v, const Binding& b, Renamer& r) {
    switch (v->kind) {
        case VKind::Slot: {
            auto it = b.find(v->slot);
            if (it == b.end()) throw ExprError("substitute: unbound slot " + slot_name(v->slot));
            return it->second;
        }
        case VKind::Gamma: return build::gamma(r.fresh_for(v->letter), v->raised);
        default: {
            auto n = std::make_shared<VNode>(*v);
            for (auto& k : n->kids) k = subst(k, b, r);
            for (auto& c : n->coeffs) c = subst(c, b, r);
            return n;
        }
    }
}

inline SExpr subst(const SExpr& e, const Binding& b, Renamer& r) {
    auto n = std::make_shared<SNode>(*e);
    for (auto& v : n->vargs) v = subst(v, b, r);
    for (auto& k : n->kids) k = subst(k, b, r);
    return n;
}

}  // namespace detail

/// Capture-avoiding substitution of slots by vector expressions. Dummy letters
/// of `e` that clash with letters carried by the bindings are renamed.
/// Bound expressions are inserted verbatim (their own letters stay free so the
/// caller can contract them). tau_- and S are rejected.
inline SExpr substitute(const SExpr& e, const Binding& binding) {
    std::set<SlotId> slots;
    collect_slots(e, slots);
    detail::Renamer r;
    for (SlotId s : slots) {
        auto it = binding.find(s);
        if (it == binding.end()) throw ExprError("substitute: unbound slot " + slot_name(s));
        if (contains_numeric_only(it->second))
            throw ExprError("substitute: tau- and S are numeric-only constructs");
        detail::collect_letters(it->second, r.taken);
    }
    return detail::subst(e, binding, r);
}

/// Sum over all permutations of `slots` applied to `e`.
inline SExpr symmetrize(const SExpr& e, const std::vector<SlotId>& slots) {
    std::set<SlotId> distinct(slots.begin(), slots.end());
    if (distinct.size() != slots.size()) throw ExprError("symmetrize: slots must be distinct");
    std::set<SlotId> all;
    collect_slots(e, all);
    std::vector<int> perm(slots.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<SExpr> terms;
    do {
        Binding b;
        for (SlotId s : all) b[s] = build::slot(s);
        for (std::size_t i = 0; i < slots.size(); ++i) b[slots[i]] = build::slot(slots[perm[i]]);
        detail::Renamer r;
        // a permutation of slots never changes letters; identity renaming
        terms.push_back(detail::subst(e, b, r));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return build::sum(std::move(terms));
}

}  // namespace gwv::expr
