#pragma once

// Membership of a reduced polynomial in the algebraic ideal spanned by
// cofactor * (instance of a generator), decided by exact sparse elimination
// over a span grown from the monomials of the target.

#include "gwv/rewrite/rules.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gwv::rewrite {

/// A generator of the ideal: a named tensor differentiated `order` times,
/// as a pure polynomial over its formal slots.
struct Generator {
    std::string name;
    int order = 0;
    int arity = 0;
    TensorPoly tmpl;
};

inline Generator make_generator(const std::string& name, int order) {
    Generator g{name, order, expr::tensor_arity(name), tensor_body(name)};
    if (g.arity < 0) throw expr::ExprError("unknown generator: " + name);
    auto slots = tensors::detail::formal_slots(g.arity + order);
    for (int i = 0; i < order; ++i) g.tmpl = derive_covariant(g.tmpl, slots[g.arity + i]);
    g.arity += order;
    return g;
}

struct CertificateEntry {
    std::string generator;
    int order = 0;
    std::vector<Arg> args;               // value of slot W1..Wn
    std::vector<Correlator> cofactor;
    Rational coeff;
};

struct Certificate {
    std::vector<CertificateEntry> entries;
};

struct MembershipBounds {
    int max_rounds = 3;
    std::size_t max_columns = 60000;
};

struct MembershipResult {
    bool member = false;
    bool bounds_exhausted = false;
    Certificate certificate;
    TensorPoly residual;
    std::size_t columns = 0;
    int rounds = 0;
    bool modulo_rules = false;  // certificate equals the target only after TRR reduction
};

/// cofactor * gen(args), not yet reduced.
inline TensorPoly instantiate(const Generator& g, const std::vector<Arg>& args, const std::vector<Correlator>& cofactor) {
    std::int32_t off = expr::max_dummy_id(cofactor);
    for (const auto& a : args)
        if (a.is_dummy()) off = std::max(off, a.id);
    off += 1;
    auto slots = tensors::detail::formal_slots(g.arity);
    TensorPoly out;
    for (const auto& [k, t] : g.tmpl) {
        Monomial m{t.coeff, cofactor};
        for (Correlator c : t.factors) {
            for (auto& a : c.args) {
                if (a.is_dummy()) {
                    a.id += off;
                    continue;
                }
                auto it = std::find(slots.begin(), slots.end(), a.id);
                if (it == slots.end()) throw expr::ExprError("generator template has a stray slot");
                Arg b = args[it - slots.begin()];
                b.shift += a.shift;
                a = b;
            }
            m.factors.push_back(std::move(c));
        }
        out.add(m);
    }
    return out;
}

namespace detail {

// Enumerates embeddings of a template monomial into a target monomial.
// Template slots bind to target arguments (absorbing the template's shift);
// template dummies must land on both ends of one target dummy with shift 0.
class Embedder {
public:
    Embedder(const std::vector<Correlator>& tmpl, const std::vector<Correlator>& target, int nslots,
             const std::vector<SlotId>& slots)
        : t_(tmpl), g_(target), nslots_(nslots), slots_(slots) {
        for (std::size_t f = 0; f < g_.size(); ++f)
            for (std::size_t p = 0; p < g_[f].args.size(); ++p)
                if (g_[f].args[p].is_dummy()) ends_[g_[f].args[p].id].push_back({int(f), int(p)});
    }

    template <class F>
    void run(F&& emit) {
        used_f_.assign(g_.size(), false);
        binding_.assign(nslots_, Arg{});
        bound_.assign(nslots_, false);
        match_factor(0, emit);
    }

private:
    using Pos = std::pair<int, int>;
    const std::vector<Correlator>& t_;
    const std::vector<Correlator>& g_;
    int nslots_;
    const std::vector<SlotId>& slots_;
    std::map<std::int32_t, std::vector<Pos>> ends_;
    std::vector<bool> used_f_;
    std::vector<Arg> binding_;
    std::vector<bool> bound_;
    std::map<std::int32_t, Pos> tdummy_;  // template dummy -> target position of its first end
    std::vector<bool> used_p_;

    Pos partner(Pos p) const {
        const auto& e = ends_.at(g_[p.first].args[p.second].id);
        return e[0] == p ? e[1] : e[0];
    }

    template <class F>
    void match_factor(std::size_t ti, F& emit) {
        if (ti == t_.size()) {
            std::vector<int> cof;
            for (std::size_t f = 0; f < g_.size(); ++f)
                if (!used_f_[f]) cof.push_back(int(f));
            emit(binding_, cof);
            return;
        }
        const Correlator& tf = t_[ti];
        for (std::size_t gf = 0; gf < g_.size(); ++gf) {
            if (used_f_[gf] || g_[gf].genus != tf.genus || g_[gf].args.size() != tf.args.size()) continue;
            used_f_[gf] = true;
            std::vector<bool> taken(tf.args.size(), false);
            match_arg(ti, gf, 0, taken, emit);
            used_f_[gf] = false;
        }
    }

    template <class F>
    void match_arg(std::size_t ti, std::size_t gf, std::size_t ai, std::vector<bool>& taken, F& emit) {
        const Correlator& tf = t_[ti];
        if (ai == tf.args.size()) {
            match_factor(ti + 1, emit);
            return;
        }
        const Arg& ta = tf.args[ai];
        const auto& gargs = g_[gf].args;
        for (std::size_t p = 0; p < gargs.size(); ++p) {
            if (taken[p]) continue;
            // skip duplicate target arguments (identical bindings)
            bool dup = false;
            for (std::size_t q = 0; q < p; ++q)
                if (!taken[q] && gargs[q] == gargs[p] && !gargs[p].is_dummy()) dup = true;
            if (dup) continue;
            const Arg& ga = gargs[p];
            Pos here{int(gf), int(p)};
            if (ta.is_dummy()) {
                if (!ga.is_dummy() || ga.shift != 0 || ta.shift != 0) continue;
                auto it = tdummy_.find(ta.id);
                if (it == tdummy_.end()) {
                    tdummy_[ta.id] = here;
                    taken[p] = true;
                    match_arg(ti, gf, ai + 1, taken, emit);
                    taken[p] = false;
                    tdummy_.erase(ta.id);
                } else {
                    if (partner(it->second) != here) continue;
                    taken[p] = true;
                    match_arg(ti, gf, ai + 1, taken, emit);
                    taken[p] = false;
                }
            } else {
                if (ga.shift < ta.shift) continue;
                // a template slot never binds to an end of a dummy that a template dummy owns
                if (ga.is_dummy()) {
                    Pos pp = partner(here);
                    bool owned = false;
                    for (auto& [d, pos] : tdummy_)
                        if (pos == pp) owned = true;
                    if (owned) continue;
                }
                int si = int(std::find(slots_.begin(), slots_.end(), ta.id) - slots_.begin());
                Arg b = ga;
                b.shift -= ta.shift;
                binding_[si] = b;
                bound_[si] = true;
                taken[p] = true;
                match_arg(ti, gf, ai + 1, taken, emit);
                taken[p] = false;
                bound_[si] = false;
            }
        }
    }
};

struct IntVec {
    std::map<int, Integer> v;  // row -> entry
    std::map<std::size_t, Rational> combo;  // column -> multiplier
    Rational alpha{1};  // v = alpha * target + sum(combo * column); alpha only for targets
};

inline Integer content(const std::map<int, Integer>& v) {
    Integer g = 0;
    for (const auto& [r, x] : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

// Fraction-free sparse elimination; each basis vector's pivot is its smallest row.
class SparseSolver {
public:
    void add_column(std::size_t col, std::map<int, Integer> v, const Rational& scale) {
        IntVec x;
        x.v = std::move(v);
        x.combo[col] = scale;
        reduce(x, false);
        if (x.v.empty()) return;
        int p = x.v.begin()->first;
        basis_.emplace(p, std::move(x));
    }

    // Reduces `target`; returns true when it lies in the span.
    bool solve(IntVec& target) {
        reduce(target, true);
        return target.v.empty();
    }

    std::size_t rank() const { return basis_.size(); }

private:
    std::map<int, IntVec> basis_;

    void reduce(IntVec& x, bool track_alpha) {
        auto it = x.v.begin();
        while (it != x.v.end()) {
            auto b = basis_.find(it->first);
            if (b == basis_.end()) {
                ++it;
                continue;
            }
            int row = it->first;
            const IntVec& bv = b->second;
            const Integer& bp = bv.v.begin()->second;
            Integer g;
            mpz_gcd(g.get_mpz_t(), bp.get_mpz_t(), it->second.get_mpz_t());
            Integer a = bp / g;   // multiplies x
            Integer c = it->second / g;  // multiplies bv
            for (auto& [r, e] : x.v) e *= a;
            for (const auto& [r, e] : bv.v) {
                auto [j, ins] = x.v.try_emplace(r, 0);
                j->second -= c * e;
                if (j->second == 0) x.v.erase(j);
            }
            Rational ra{a, Integer(1)}, rc{c, Integer(1)};
            for (auto& [k, q] : x.combo) q *= ra;
            for (const auto& [k, q] : bv.combo) {
                auto [j, ins] = x.combo.try_emplace(k, Rational(0));
                j->second -= q * rc;
                if (j->second.is_zero()) x.combo.erase(j);
            }
            if (track_alpha) x.alpha *= ra;
            Integer ct = content(x.v);
            if (ct > 1) {
                for (auto& [r, e] : x.v) e /= ct;
                Rational rct{ct, Integer(1)};
                for (auto& [k, q] : x.combo) q /= rct;
                if (track_alpha) x.alpha /= rct;
            }
            it = x.v.upper_bound(row);
        }
    }
};

}  // namespace detail

/// Decides target in span{ reduce(cofactor * gen(args)) } over instances found
/// by embedding generator monomials into monomials of the growing support.
class MembershipEngine {
public:
    MembershipEngine(std::vector<Generator> gens, std::shared_ptr<const RuleSet> rules, MembershipBounds bounds)
        : gens_(std::move(gens)), reducer_(std::move(rules), false), bounds_(bounds) {}

    TensorPoly reduce(const TensorPoly& p) { return reducer_.reduce(p); }

    MembershipResult run(const TensorPoly& target) {
        MembershipResult res;
        if (target.is_zero()) {
            res.member = true;
            return res;
        }
        std::vector<std::pair<expr::Key, Monomial>> frontier(target.begin(), target.end());
        std::set<expr::Key> visited;
        for (auto& [k, m] : frontier) visited.insert(k);
        detail::IntVec t = to_int(target);
        t.combo.clear();
        for (int round = 1; round <= bounds_.max_rounds; ++round) {
            res.rounds = round;
            // collect new instances
            std::map<expr::Key, Pending> found;
            for (const auto& [k, m] : frontier) discover(m, found);
            frontier.clear();
            bool capped = false;
            for (auto& [key, pend] : found) {
                if (cols_.size() >= bounds_.max_columns) {
                    capped = true;
                    break;
                }
                std::size_t id = cols_.size();
                TensorPoly col = reducer_.reduce(instantiate(gens_[pend.gen], pend.args, pend.cofactor));
                cols_.push_back(Column{pend.gen, pend.args, pend.cofactor});
                if (col.is_zero()) continue;
                Rational scale;
                auto iv = to_int(col, &scale);
                solver_.add_column(id, std::move(iv.v), scale);
                for (const auto& [ck, cm] : col)
                    if (visited.insert(ck).second) frontier.emplace_back(ck, cm);
            }
            detail::IntVec attempt = t;
            if (solver_.solve(attempt)) {
                res.member = true;
                for (const auto& [c, q] : attempt.combo) {
                    Rational coeff = -q / attempt.alpha;
                    const Column& col = cols_[c];
                    res.certificate.entries.push_back(
                        CertificateEntry{gens_[col.gen].name, gens_[col.gen].order, col.args, col.cofactor, coeff});
                }
                res.columns = cols_.size();
                return res;
            }
            res.residual = from_int(attempt);
            if (capped) {
                res.bounds_exhausted = true;
                break;
            }
            if (frontier.empty()) break;
            if (round == bounds_.max_rounds) res.bounds_exhausted = true;
        }
        res.columns = cols_.size();
        return res;
    }

    std::size_t columns() const { return cols_.size(); }

private:
    struct Pending {
        std::size_t gen;
        std::vector<Arg> args;
        std::vector<Correlator> cofactor;
    };
    struct Column {
        std::size_t gen;
        std::vector<Arg> args;
        std::vector<Correlator> cofactor;
    };

    std::vector<Generator> gens_;
    Reducer reducer_;
    MembershipBounds bounds_;
    detail::SparseSolver solver_;
    std::vector<Column> cols_;
    std::set<expr::Key> seen_instances_;
    std::map<expr::Key, int> rows_;
    std::vector<Monomial> row_mono_;

    int row(const expr::Key& k, const Monomial& m) {
        auto [it, ins] = rows_.try_emplace(k, int(row_mono_.size()));
        if (ins) row_mono_.push_back(Monomial{Rational(1), m.factors});
        return it->second;
    }

    // Integer vector proportional to p; *scale receives the factor (p = vec / scale... inverse tracked).
    detail::IntVec to_int(const TensorPoly& p, Rational* scale = nullptr) {
        Integer l = 1;
        for (const auto& [k, m] : p) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.coeff.denominator().get_mpz_t());
        detail::IntVec x;
        for (const auto& [k, m] : p) {
            Rational c = m.coeff * Rational(l, Integer(1));
            x.v[row(k, m)] = c.numerator();
        }
        // integer vector = l * p
        if (scale) *scale = Rational(l, Integer(1));
        x.alpha = Rational(l, Integer(1));
        return x;
    }

    TensorPoly from_int(const detail::IntVec& x) {
        TensorPoly p;
        for (const auto& [r, e] : x.v) {
            Monomial m = row_mono_[r];
            m.coeff = Rational(e, Integer(1)) / x.alpha;
            p.add(m);
        }
        return p;
    }

    void discover(const Monomial& m, std::map<expr::Key, Pending>& out) {
        for (std::size_t gi = 0; gi < gens_.size(); ++gi) {
            const Generator& g = gens_[gi];
            auto slots = tensors::detail::formal_slots(g.arity);
            for (const auto& [tk, tm] : g.tmpl) {
                if (tm.factors.size() > m.factors.size()) continue;
                detail::Embedder e(tm.factors, m.factors, g.arity, slots);
                e.run([&](const std::vector<Arg>& binding, const std::vector<int>& cof) {
                    std::vector<Correlator> cofactor;
                    for (int f : cof) cofactor.push_back(m.factors[f]);
                    std::vector<Correlator> marked = cofactor;
                    for (int i = 0; i < g.arity; ++i) marked.push_back(Correlator{-1000 - i, {binding[i]}});
                    auto canon = expr::canonical_factors(marked);
                    expr::Key key = expr::encode(canon);
                    key.insert(key.begin(), {std::int32_t(gi), -7});
                    if (seen_instances_.count(key)) return;
                    seen_instances_.insert(key);
                    // rebuild args and cofactor from the canonical marked form
                    Pending p{gi, std::vector<Arg>(g.arity), {}};
                    for (const auto& c : canon) {
                        if (c.genus <= -1000)
                            p.args[-1000 - c.genus] = c.args[0];
                        else
                            p.cofactor.push_back(c);
                    }
                    out.emplace(std::move(key), std::move(p));
                });
            }
        }
    }
};

/// Expands a certificate independently of the solver and returns the
/// reduced sum of its entries.
inline TensorPoly expand_certificate(const Certificate& cert, std::shared_ptr<const RuleSet> rules) {
    Reducer r(std::move(rules), false);
    std::map<std::pair<std::string, int>, Generator> gens;
    TensorPoly sum;
    for (const auto& e : cert.entries) {
        auto key = std::make_pair(e.generator, e.order);
        auto it = gens.find(key);
        if (it == gens.end()) it = gens.emplace(key, make_generator(e.generator, e.order)).first;
        sum.add(r.reduce(instantiate(it->second, e.args, e.cofactor)), e.coeff);
    }
    return sum;
}

}  // namespace gwv::rewrite
