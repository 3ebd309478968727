#pragma once

// Numeric checks of identities and of the string and dilaton equations in the
// point model. Every comparison is against the exact zero.

#include "gwv/oracle/eval.hpp"
#include "gwv/report.hpp"

#include <chrono>
#include <functional>
#include <future>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace gwv::oracle {

struct NumericPolicy {
    int t_lo = 2;
    int t_hi = 5;
    int slot_hi = 6;
    int truncation = -1;  // required when t_lo <= 1
    unsigned jobs = 1;
};

/// Seed of trial i, decorrelated from neighbouring base seeds.
inline std::uint64_t trial_seed(std::uint64_t seed, unsigned i) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), i};
    std::uint32_t out[2];
    ss.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline PointState make_state(std::uint64_t seed, const std::vector<expr::SlotId>& slots, const NumericPolicy& p) {
    if (p.t_lo <= 1 && p.truncation < 0)
        throw PolicyError("t supported on level " + std::to_string(p.t_lo) + " requires a truncation order");
    PointState s = random_state(seed, slots, p.t_lo, p.t_hi, p.slot_hi);
    s.truncation = p.truncation;
    return s;
}

inline std::vector<expr::SlotId> statement_slots(const IdentityStatement& st) {
    std::set<expr::SlotId> s;
    if (st.vector) {
        expr::collect_slots(st.vlhs, s);
        expr::collect_slots(st.vrhs, s);
    } else {
        expr::collect_slots(st.lhs, s);
        expr::collect_slots(st.rhs, s);
    }
    return {s.begin(), s.end()};
}

namespace detail {

inline std::string describe_vec(const LevelVec& v) {
    if (v.empty()) return "0";
    std::string s;
    for (const auto& [n, x] : v) s += (s.empty() ? "" : " + ") + x.str() + "*tau_" + std::to_string(n);
    return s;
}

}  // namespace detail

/// lhs - rhs at `trials` random states. A vector identity is compared
/// componentwise; its trial value is the first nonzero component (or 0).
inline Report check_identity_numeric(const IdentityStatement& st, unsigned trials = 20, std::uint64_t seed = 1,
                                     const NumericPolicy& policy = {}) {
    auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.identity = st.name;
    rep.mode = "numeric";
    rep.path = "numeric";
    rep.seed = seed;
    rep.engine_config["trials"] = std::to_string(trials);
    rep.engine_config["t_levels"] = std::to_string(policy.t_lo) + "-" + std::to_string(policy.t_hi);
    rep.engine_config["slot_levels"] = "0-" + std::to_string(policy.slot_hi);
    if (policy.t_lo <= 1) {
        rep.engine_config["truncation"] = std::to_string(policy.truncation);
        rep.notes.push_back("t supported on levels below 2; series truncated at " +
                            std::to_string(policy.truncation) + " extra insertions");
    }
    auto finish = [&]() {
        rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    };
    try {
        auto slots = statement_slots(st);
        struct Trial {
            Rational value;
            std::string detail;
        };
        auto run = [&](unsigned i) {
            PointState s = make_state(trial_seed(seed, i), slots, policy);
            Evaluator ev(s);
            Trial out;
            if (st.vector) {
                LevelVec a = ev.vector(st.vlhs), b = ev.vector(st.vrhs);
                for (const auto& [n, x] : b) a[n] -= x;
                LevelVec d;
                for (const auto& [n, x] : a)
                    if (!x.is_zero()) d[n] = x;
                if (!d.empty()) out.value = d.begin()->second;
                out.detail = detail::describe_vec(d);
            } else {
                out.value = ev.scalar(st.lhs) - ev.scalar(st.rhs);
                out.detail = out.value.str();
            }
            return out;
        };
        std::vector<Trial> results(trials);
        const unsigned jobs = std::max(1u, std::min(policy.jobs, trials));
        if (jobs == 1) {
            for (unsigned i = 0; i < trials; ++i) results[i] = run(i);
        } else {
            std::vector<std::future<void>> fs;
            for (unsigned w = 0; w < jobs; ++w)
                fs.push_back(std::async(std::launch::async, [&, w] {
                    for (unsigned i = w; i < trials; i += jobs) results[i] = run(i);
                }));
            for (auto& f : fs) f.get();
        }
        rep.outcome = Outcome::Pass;
        for (unsigned i = 0; i < trials; ++i) {
            rep.trials.push_back(results[i].value);
            if (results[i].detail != "0" && rep.outcome == Outcome::Pass) {
                rep.outcome = Outcome::Fail;
                rep.residual = "trial " + std::to_string(i) + ": " + results[i].detail;
            }
        }
        return finish();
    } catch (const std::exception& e) {
        rep.outcome = Outcome::Error;
        rep.error = e.what();
        return finish();
    }
}

/// Value of the identity's difference at one explicit state.
inline Rational difference_at(const IdentityStatement& st, const PointState& s) {
    Evaluator ev(s);
    if (!st.vector) return ev.scalar(st.lhs) - ev.scalar(st.rhs);
    LevelVec a = ev.vector(st.vlhs), b = ev.vector(st.vrhs);
    for (const auto& [n, x] : b) a[n] -= x;
    for (const auto& [n, x] : a)
        if (!x.is_zero()) return x;
    return Rational(0);
}

/// String and dilaton k-point equations for g <= 2, k <= k_max, insertions
/// tau_l with 0 <= l <= 3, at the given state. chi = 1.
inline Report check_axioms(const PointState& base, int k_max) {
    auto t0 = std::chrono::steady_clock::now();
    namespace b = expr::build;
    Report rep;
    rep.identity = "string-dilaton";
    rep.mode = "numeric";
    rep.path = "numeric";
    rep.seed = base.seed;
    std::size_t checks = 0;
    try {
        if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
        rep.outcome = Outcome::Pass;
        auto fail = [&](const std::string& what, const Rational& lhs, const Rational& rhs) {
            if (rep.outcome == Outcome::Pass) {
                rep.outcome = Outcome::Fail;
                rep.residual = what + ": " + lhs.str() + " != " + rhs.str();
            }
        };
        Rational t0v = [&] {
            auto it = base.t.find(0);
            return it == base.t.end() ? Rational(0) : it->second;
        }();
        for (int k = 0; k <= k_max; ++k) {
            std::vector<int> lv(k, 0);
            std::function<void(int, int)> rec = [&](int i, int lo) {
                if (i < k) {
                    for (int l = lo; l <= 3; ++l) {
                        lv[i] = l;
                        rec(i + 1, l);
                    }
                    return;
                }
                PointState s = base;
                std::vector<expr::VExpr> ws;
                for (int j = 0; j < k; ++j) {
                    std::string name = "W" + std::to_string(j + 1);
                    s.set_slot(name, LevelVec{{lv[j], Rational(1)}});
                    ws.push_back(b::slot(name));
                }
                Evaluator ev(s);
                std::string tag = "[";
                for (int j = 0; j < k; ++j) tag += (j ? "," : "") + std::to_string(lv[j]);
                tag += "]";
                for (int g = 0; g <= 2; ++g) {
                    // string
                    std::vector<expr::VExpr> a{b::string_field()};
                    a.insert(a.end(), ws.begin(), ws.end());
                    Rational lhs = ev.scalar(b::corr(g, a));
                    Rational rhs;
                    for (int j = 0; j < k; ++j) {
                        auto c = ws;
                        c[j] = b::tau_minus(ws[j]);
                        rhs += ev.scalar(b::corr(g, c));
                    }
                    if (g == 0) {
                        if (k == 0) rhs += t0v * t0v / Rational(2);
                        if (k == 1 && lv[0] == 0) rhs += t0v;
                        if (k == 2 && lv[0] == 0 && lv[1] == 0) rhs += Rational(1);
                    }
                    ++checks;
                    if (lhs != rhs) fail("string g=" + std::to_string(g) + " " + tag, lhs, rhs);
                    // dilaton
                    std::vector<expr::VExpr> d{b::T(b::string_field())};
                    d.insert(d.end(), ws.begin(), ws.end());
                    lhs = ev.scalar(b::corr(g, d));
                    rhs = Rational(k + 2 * g - 2) * ev.scalar(b::corr(g, ws));
                    if (g == 1 && k == 0) rhs += Rational(1, 24);
                    ++checks;
                    if (lhs != rhs) fail("dilaton g=" + std::to_string(g) + " " + tag, lhs, rhs);
                }
            };
            rec(0, 0);
        }
    } catch (const std::exception& e) {
        rep.outcome = Outcome::Error;
        rep.error = e.what();
    }
    rep.engine_config["checks"] = std::to_string(checks);
    rep.engine_config["k_max"] = std::to_string(k_max);
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace gwv::oracle
