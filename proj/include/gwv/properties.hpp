#pragma once

// Randomized invariants of the canonical monomial form.

#include "gwv/expr/parse.hpp"
#include "gwv/expr/print.hpp"
#include "gwv/oracle/eval.hpp"
#include "gwv/rewrite/expand.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace gwv {

/// A valid random monomial: 1-3 factors of genus 0-2, slots drawn from
/// W1 W2 W3 V, up to three dummy pairs, shifts up to 2.
inline expr::Monomial random_monomial(std::mt19937_64& rng) {
    using expr::Arg;
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    static const expr::SlotId slots[] = {expr::slot_id("W1"), expr::slot_id("W2"), expr::slot_id("W3"),
                                         expr::slot_id("V")};
    expr::Monomial m;
    m.coeff = Rational(pick(-9, 9) | 1, pick(1, 9));
    int nf = pick(1, 3);
    for (int f = 0; f < nf; ++f) {
        expr::Correlator c;
        c.genus = pick(0, 2);
        int ns = pick(0, 3);
        for (int i = 0; i < ns; ++i) c.args.push_back(Arg::slot(slots[pick(0, 3)], pick(0, 2)));
        m.factors.push_back(std::move(c));
    }
    int nd = pick(0, 3);
    for (int d = 0; d < nd; ++d) {
        m.factors[pick(0, nf - 1)].args.push_back(Arg::dummy(d, false, pick(0, 1)));
        m.factors[pick(0, nf - 1)].args.push_back(Arg::dummy(d, true, pick(0, 1)));
    }
    for (auto& f : m.factors)
        if (f.args.empty()) f.args.push_back(Arg::slot(slots[0]));
    return m;
}

struct PropertyResult {
    std::string name;
    unsigned cases = 0;
    unsigned failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0 && cases > 0; }
};

namespace detail {

inline expr::Key key_of(const expr::Monomial& m) { return expr::encode(expr::canonical_factors(m.factors)); }

inline void tally(PropertyResult& r, bool ok, const expr::Monomial& m) {
    ++r.cases;
    if (ok) return;
    if (r.failures++ == 0) r.first_failure = expr::factors_to_string(m.factors);
}

}  // namespace detail

/// Idempotence, argument and factor permutation invariance, and dummy
/// relabel invariance over `count` random monomials.
inline std::vector<PropertyResult> check_canonical_properties(unsigned count = 1000, std::uint64_t seed = 2024) {
    std::mt19937_64 rng(seed);
    PropertyResult idem{"canonicalization idempotence"}, perm{"argument/factor permutation invariance"},
        relabel{"dummy relabel invariance"};
    for (unsigned i = 0; i < count; ++i) {
        auto m = random_monomial(rng);
        auto key = detail::key_of(m);

        auto once = expr::canonicalize(m);
        auto twice = expr::canonicalize(once);
        detail::tally(idem, detail::key_of(once) == key && expr::encode(twice.factors) ==
                                                               expr::encode(once.factors),
                      m);

        auto p = m;
        for (auto& f : p.factors) std::shuffle(f.args.begin(), f.args.end(), rng);
        std::shuffle(p.factors.begin(), p.factors.end(), rng);
        detail::tally(perm, detail::key_of(p) == key, m);

        auto r = m;
        std::vector<std::int32_t> ids(8);
        std::iota(ids.begin(), ids.end(), 0);
        std::shuffle(ids.begin(), ids.end(), rng);
        for (auto& f : r.factors)
            for (auto& a : f.args)
                if (a.is_dummy()) a.id = 40 + 3 * ids[a.id];
        detail::tally(relabel, detail::key_of(r) == key, m);
    }
    return {idem, perm, relabel};
}

/// parse(print_canonical(p)) expands back to p, and merging like terms keeps
/// point values: summing monomials one at a time equals the merged value.
inline std::vector<PropertyResult> check_polynomial_properties(unsigned count = 100, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    PropertyResult trip{"parse/print round trip"}, lin{"linearity of assembly"};
    std::vector<expr::SlotId> slots{expr::slot_id("W1"), expr::slot_id("W2"), expr::slot_id("W3"),
                                    expr::slot_id("V")};
    for (unsigned i = 0; i < count; ++i) {
        std::vector<expr::Monomial> ms;
        for (int j = 0; j < 3; ++j) ms.push_back(random_monomial(rng));
        ms.push_back(ms[0]);  // a like term to merge
        expr::TensorPoly p;
        for (const auto& m : ms) p.add(m);

        auto back = rewrite::expand_definitional(expr::parse(expr::print_canonical(p)));
        detail::tally(trip, back == p, ms[0]);

        auto s = oracle::random_state(seed * 1000 + i, slots);
        oracle::Evaluator ev(s);
        Rational sum(0);
        for (const auto& m : ms) {
            expr::TensorPoly single;
            single.add(m);
            sum += ev.poly(single);
        }
        detail::tally(lin, sum == ev.poly(p), ms[0]);
    }
    return {trip, lin};
}

}  // namespace gwv
