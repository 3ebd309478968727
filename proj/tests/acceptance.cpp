// Acceptance gate: one PASS/FAIL line per criterion. All comparisons are exact
// (zero tolerance); only wall-clock limits are pinned below.

#include "gwv/catalog.hpp"
#include "gwv/fidelity.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/oracle/intersection.hpp"
#include "gwv/properties.hpp"
#include "gwv/rewrite/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace gwv;

namespace {

// Wall-clock limits in seconds.
constexpr double kLimitFidelity = 10;
constexpr double kLimitMtoG = 30;
constexpr double kLimitMGtoBP = 120;
constexpr double kLimitA1A2G = 15 * 60;
constexpr double kLimitA1A2BG = 2 * 3600;
constexpr double kLimitTypex = 60;
constexpr double kLimitNumeric = 5 * 60;
constexpr double kLimitOracle = 60;
constexpr double kLimitProperties = 60;

constexpr unsigned kTrials = 20;
constexpr std::uint64_t kSeed = 1;
constexpr unsigned kRandomMonomials = 1000;
constexpr unsigned kRuleStates = 20;

struct Verdict {
    bool ok = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        failures += (failures.empty() ? "" : "; ") + what;
    }
    std::string text() const { return ok ? detail.str() : failures; }
};

// Coefficients of all terms after distributing products over sums.
std::vector<Rational> coefficients(const expr::SExpr& e) {
    using expr::SKind;
    switch (e->kind) {
        case SKind::Const: return {e->value};
        case SKind::Scale: {
            auto v = coefficients(e->kids[0]);
            for (auto& x : v) x *= e->value;
            return v;
        }
        case SKind::Sum: {
            std::vector<Rational> v;
            for (const auto& k : e->kids) {
                auto w = coefficients(k);
                v.insert(v.end(), w.begin(), w.end());
            }
            return v;
        }
        case SKind::Prod: {
            std::vector<Rational> v{Rational(1)};
            for (const auto& k : e->kids) {
                std::vector<Rational> next;
                for (const auto& x : v)
                    for (const auto& y : coefficients(k)) next.push_back(x * y);
                v = std::move(next);
            }
            return v;
        }
        default: return {Rational(1)};
    }
}

bool same_multiset(std::vector<Rational> a, std::vector<Rational> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

std::vector<Rational> integers(std::initializer_list<long> xs) {
    std::vector<Rational> v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

bool same_modulus(const std::vector<ModulusEntry>& a, const std::vector<ModulusEntry>& b) {
    return rewrite::modulus_string(a) == rewrite::modulus_string(b);
}

std::string summary(const Report& r) {
    std::ostringstream s;
    s << r.identity << " " << to_string(r.outcome) << " via " << r.path;
    if (r.path == "certificate") s << " (" << r.certificate_entries << " entries)";
    if (!r.passed()) s << " residual " << r.residual.substr(0, 300) << r.error;
    return s.str();
}

void symbolic(Verdict& o, const char* name, const char* expected_path) {
    auto rep = rewrite::verify_identity(catalog::identity(name));
    o.detail << summary(rep);
    o.require(rep.passed(), summary(rep));
    o.require(rep.path == expected_path, std::string("expected path ") + expected_path + ", got " + rep.path);
}

// ---------------------------------------------------------------------------

void c1(Verdict& o) {
    auto checks = check_rule_fidelity();
    o.detail << checks.size() << " printed forms matched exactly";
    o.require(checks.size() == 8, "expected 8 fidelity checks");
    for (const auto& c : checks) o.require(c.ok, c.name + " differs: " + c.residual.substr(0, 300));
}

void c2(Verdict& o) {
    o.require(catalog::identity("MtoG").modulus.empty(), "MtoG modulus is not empty");
    symbolic(o, "MtoG", "syntactic-zero");
}

void c3(Verdict& o) {
    const auto& st = catalog::identity("MGtoBP");
    o.require(same_modulus(st.modulus, {{"rho0", 0, 1}}), "MGtoBP modulus is not {rho0, nabla rho0}");
    symbolic(o, "MGtoBP", "certificate");
}

void c4(Verdict& o) {
    const auto& st = catalog::identity("A1A2G");
    o.require(same_modulus(st.modulus, catalog::detail::kModA1A2G), "A1A2G modulus differs");
    std::vector<Rational> want{Rational(-1, 24), Rational(1, 6), Rational(19, 2), Rational(-21, 2)};
    o.require(same_multiset(coefficients(expr::parse(catalog::detail::kA1A2GRhs)), want),
              "A1A2G right side coefficients differ");
    symbolic(o, "A1A2G", "certificate");
}

void c5(Verdict& o) {
    const auto& st = catalog::identity("A1A2BG");
    o.require(same_modulus(st.modulus, catalog::detail::kModA1A2BG), "A1A2BG modulus differs");
    o.require(st.max_order("rho1") == 3, "A1A2BG modulus lacks the third derivative of rho1");
    auto want = integers({24, 27, -34, -7, 27, -34, -7, -16, 8, 8, -360, 120, 120, -3, 3, 3, -19, -19, -19, 12, 3, 3,
                          28, 28, -1, 1});
    for (auto q : {Rational(1, 4), Rational(-1, 4), Rational(-1, 4)}) want.push_back(q);
    o.require(same_multiset(coefficients(expr::parse(catalog::detail::kA1A2BGRhs)), want),
              "A1A2BG coefficient table differs");
    rewrite::VerifyConfig defaults;
    o.detail << "bounds max_rounds=" << defaults.bounds.max_rounds << " max_columns=" << defaults.bounds.max_columns
             << "; ";
    symbolic(o, "A1A2BG", "certificate");
}

void c6(Verdict& o) { symbolic(o, "typex_equivalence", "certificate"); }

void c7(Verdict& o) {
    const char* names[] = {"rho0_vanishes",  "rho1_vanishes", "C0_vanishes", "G_vanishes",
                           "rho21_vanishes", "rho22_vanishes", "rho23_vanishes", "A1A2",
                           "A1A2B",          "rho22_string",  "decomposition"};
    unsigned zeros = 0;
    for (const char* n : names) {
        auto rep = oracle::check_identity_numeric(catalog::identity(n), kTrials, kSeed);
        bool all_zero = rep.trials.size() == kTrials;
        for (const auto& v : rep.trials) all_zero &= v.is_zero();
        zeros += all_zero ? rep.trials.size() : 0;
        o.require(rep.passed() && all_zero, std::string(n) + ": " + rep.residual + rep.error);
    }
    o.detail << std::size(names) << " statements, " << zeros << " trial values all exactly 0, seed " << kSeed;
}

void c8(Verdict& o) {
    using oracle::intersection;
    o.require(intersection(0, {0, 0, 0}) == Rational(1), "<tau0^3>_0 != 1");
    o.require(intersection(1, {1}) == Rational(1, 24), "<tau1>_1 != 1/24");
    o.require(intersection(2, {4}) == Rational(1, 1152), "<tau4>_2 != 1/1152");
    // an independent cache recomputes the same values
    oracle::IntersectionCache fresh;
    o.require(fresh.get(2, {4}) == Rational(1, 1152), "fresh cache disagrees on <tau4>_2");

    unsigned compared = 0;
    std::function<void(std::vector<int>&, int, int, int)> rec = [&](std::vector<int>& d, int left, int max, int k) {
        if (static_cast<int>(d.size()) == k) {
            if (left != 0) return;
            ++compared;
            o.require(intersection(0, d) == oracle::genus0_closed_form(d), "closed form differs at genus 0");
            return;
        }
        for (int x = std::min(left, max); x >= 0; --x) {
            d.push_back(x);
            rec(d, left - x, x, k);
            d.pop_back();
        }
    };
    for (int k = 3; k <= 8; ++k) {
        std::vector<int> d;
        rec(d, k - 3, k - 3, k);
    }

    std::size_t checks = 0;
    for (std::uint64_t seed : {1u, 2u}) {
        auto rep = oracle::check_axioms(oracle::random_state(seed, {}), 4);
        o.require(rep.passed(), "string/dilaton: " + rep.residual + rep.error);
        checks += std::stoul(rep.engine_config.at("checks"));
    }
    o.detail << "base values exact, " << compared << " genus-0 tuples match the closed form, " << checks
             << " string/dilaton checks";
}

void c9(Verdict& o) {
    for (const auto& r : check_canonical_properties(kRandomMonomials)) {
        o.require(r.cases == kRandomMonomials, r.name + " ran " + std::to_string(r.cases) + " cases");
        o.require(r.ok(), r.name + " failed on " + r.first_failure);
    }
    auto sound = check_rule_soundness(rewrite::build_ruleset(), kRuleStates);
    for (const auto& c : sound)
        o.require(c.ok && c.states == kRuleStates, "rule g=" + std::to_string(c.genus) + " k=" +
                                                       std::to_string(c.arity) + " gives " + c.first_nonzero.str());
    o.detail << kRandomMonomials << " monomials x 3 properties, " << sound.size() << " rules sound at " << kRuleStates
             << " states";
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double limit;
        void (*body)(Verdict&);
    };
    const Criterion criteria[] = {
        {1, "rule fidelity", kLimitFidelity, c1},
        {2, "MtoG definitional", kLimitMtoG, c2},
        {3, "MGtoBP certificate", kLimitMGtoBP, c3},
        {4, "A1A2G certificate", kLimitA1A2G, c4},
        {5, "A1A2BG certificate", kLimitA1A2BG, c5},
        {6, "typex equivalence", kLimitTypex, c6},
        {7, "numeric suite", kLimitNumeric, c7},
        {8, "oracle self-validation", kLimitOracle, c8},
        {9, "property suite", kLimitProperties, c9},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Verdict o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.limit, "over time limit");
        failed += !o.ok;
        std::printf("criterion %d %-24s %s  [%.2f s / limit %.0f s]  %s\n", c.id, c.title, o.ok ? "PASS" : "FAIL", secs,
                    c.limit, o.text().c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
