#pragma once

// Points of the big phase space of the point target (N = 1, eta = 1) and the
// correlation functions there.

#include "gwv/expr/poly.hpp"
#include "gwv/oracle/intersection.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwv::oracle {

/// Finite vector over descendant levels: level -> coefficient of tau_level.
using LevelVec = std::map<int, Rational>;

class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PointState {
    LevelVec t;                            // coordinates t_n
    std::map<expr::SlotId, LevelVec> slots;
    int truncation = -1;                   // max extra insertions; required when t touches levels 0 or 1
    std::uint64_t seed = 0;

    void set_slot(const std::string& name, LevelVec v) { slots[expr::slot_id(name)] = std::move(v); }

    bool low_support() const {
        for (const auto& [n, v] : t)
            if (n <= 1 && !v.is_zero()) return true;
        return false;
    }
    void check_policy() const {
        for (const auto& [n, v] : t)
            if (n < 0 && !v.is_zero()) throw PolicyError("t has a negative level");
        if (low_support() && truncation < 0)
            throw PolicyError("t is supported on level 0 or 1 without a truncation order");
    }
};

namespace detail {

inline Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-9, 9), den(1, 9);
    long n = num(rng);
    return Rational(n, den(rng));
}

}  // namespace detail

/// t on levels 2..5 and each slot on levels 0..6, with entries p/q for
/// p in [-9, 9] and q in [1, 9].
inline PointState random_state(std::uint64_t seed, const std::vector<expr::SlotId>& slots, int t_lo = 2,
                               int t_hi = 5, int slot_hi = 6) {
    std::mt19937_64 rng(seed);
    PointState s;
    s.seed = seed;
    for (int n = t_lo; n <= t_hi; ++n) {
        Rational v = detail::random_rational(rng);
        if (!v.is_zero()) s.t[n] = v;
    }
    for (auto id : slots) {
        LevelVec v;
        for (int n = 0; n <= slot_hi; ++n) {
            Rational x = detail::random_rational(rng);
            if (!x.is_zero()) v[n] = x;
        }
        s.slots[id] = std::move(v);
    }
    if (t_lo <= 1) s.truncation = 6;
    return s;
}

/// <<tau_{l1} .. tau_{lk}>>_g at the point t: the sum over m of 1/m! times the
/// sum over extra insertions from the support of t.
inline Rational correlator_value(int g, std::vector<int> levels, const PointState& state) {
    state.check_policy();
    for (int l : levels)
        if (l < 0) return Rational(0);
    std::vector<std::pair<int, Rational>> supp;
    for (const auto& [n, v] : state.t)
        if (!v.is_zero()) supp.emplace_back(n, v);
    long base = 3L * g - 3 + static_cast<long>(levels.size());
    for (int l : levels) base -= l;
    // need sum over extras of (n - 1) == base
    const int cap = state.truncation;
    Rational total;
    std::vector<int> extra;
    std::function<void(std::size_t, long, int, Rational)> run = [&](std::size_t i, long need, int used,
                                                                    Rational w) {
        if (i == supp.size()) {
            if (need != 0) return;
            auto all = levels;
            all.insert(all.end(), extra.begin(), extra.end());
            Rational x = intersection(g, all);
            if (!x.is_zero()) total += w * x;
            return;
        }
        const auto& [n, v] = supp[i];
        Rational pw = w;
        std::size_t mark = extra.size();
        for (int c = 0;; ++c) {
            if (c > 0) {
                if (cap >= 0 && used + c > cap) break;
                if (n >= 2 && need - static_cast<long>(c) * (n - 1) < 0) break;
                pw = pw * v / Rational(c);
                extra.push_back(n);
            }
            run(i + 1, need - static_cast<long>(c) * (n - 1), used + c, pw);
            if (cap < 0 && n <= 1) break;
        }
        extra.resize(mark);
    };
    run(0, base, 0, Rational(1));
    return total;
}

}  // namespace gwv::oracle
