#include "gwv/catalog.hpp"
#include "gwv/expr/parse.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/rewrite/expand.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <thread>

#include <unistd.h>

using namespace gwv;
using namespace gwv::oracle;
using expr::parse;

namespace {

std::string tmp_path(const std::string& tag) {
    return ::testing::TempDir() + "gwv_" + tag + "_" + std::to_string(::getpid()) + ".txt";
}

// all non-increasing degree tuples of length k with the given sum
void tuples(int k, int sum, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> d(k);
    std::function<void(int, int, int)> rec = [&](int i, int hi, int left) {
        if (i == k) {
            if (left == 0) f(d);
            return;
        }
        for (int x = std::min(hi, left); x >= 0; --x) {
            d[i] = x;
            rec(i + 1, x, left - x);
        }
    };
    rec(0, sum, sum);
}

}  // namespace

TEST(Intersection, BaseValues) {
    EXPECT_EQ(intersection(0, {0, 0, 0}), Rational(1));
    EXPECT_EQ(intersection(1, {1}), Rational(1, 24));
    EXPECT_EQ(intersection(2, {4}), Rational(1, 1152));
    EXPECT_EQ(intersection(3, {7}), Rational(1, 82944));
}

TEST(Intersection, SelectionRule) {
    EXPECT_EQ(intersection(0, {1, 1, 1}), Rational(0));
    EXPECT_EQ(intersection(1, {2}), Rational(0));
    EXPECT_EQ(intersection(0, {0, 0}), Rational(0));
}

TEST(Intersection, KnownGenusOneAndTwoValues) {
    EXPECT_EQ(intersection(1, {1, 1}), Rational(1, 24));
    EXPECT_EQ(intersection(1, {2, 0}), Rational(1, 24));
    EXPECT_EQ(intersection(2, {2, 3}), Rational(29, 5760));
    EXPECT_EQ(intersection(2, {2, 2, 2}), Rational(7, 240));
}

TEST(Intersection, SymmetricInDegrees) {
    EXPECT_EQ(intersection(2, {3, 2}), intersection(2, {2, 3}));
    EXPECT_EQ(intersection(1, {0, 3, 1}), intersection(1, {3, 1, 0}));
}

TEST(Intersection, ClosedFormAgreesAtGenusZero) {
    EXPECT_EQ(genus0_closed_form({0, 0, 0}), Rational(1));
    EXPECT_EQ(genus0_closed_form({0, 0, 0, 0, 2}), Rational(1));
    EXPECT_EQ(genus0_closed_form({0, 0, 1}), Rational(0));
    for (int k = 3; k <= 8; ++k)
        tuples(k, k - 3, [&](const std::vector<int>& d) { EXPECT_EQ(intersection(0, d), genus0_closed_form(d)); });
}

TEST(Intersection, StringAndDilatonRecursions) {
    for (int g = 0; g <= 3; ++g)
        for (int k = 1; k <= 4; ++k) {
            int dim = 3 * g - 3 + k + 1;  // with one extra insertion
            if (dim < 0) continue;
            tuples(k, dim, [&](const std::vector<int>& d) {
                auto with0 = d;
                with0.push_back(0);
                Rational s;
                for (std::size_t j = 0; j < d.size(); ++j) {
                    auto e = d;
                    --e[j];
                    s += intersection(g, e);
                }
                if (2 * g - 2 + k + 1 > 0 && !(g == 0 && k + 1 == 3)) EXPECT_EQ(intersection(g, with0), s);
            });
            tuples(k, dim - 1, [&](const std::vector<int>& d) {
                auto with1 = d;
                with1.push_back(1);
                if (2 * g - 2 + k > 0) EXPECT_EQ(intersection(g, with1), Rational(2 * g - 2 + k) * intersection(g, d));
            });
        }
}

TEST(Cache, SaveLoadRoundTrip) {
    IntersectionCache c;
    c.get(2, {4});
    c.get(3, {2, 3, 4});
    auto path = tmp_path("roundtrip");
    c.save(path);
    IntersectionCache d;
    d.load(path);
    EXPECT_EQ(c.snapshot(), d.snapshot());
    std::remove(path.c_str());
}

TEST(Cache, LoadsHandWrittenEntry) {
    auto path = tmp_path("hand");
    {
        std::ofstream f(path);
        f << "# comment\n\n2 | 4 | 1/1152\n";
    }
    IntersectionCache c;
    c.load(path);
    auto snap = c.snapshot();
    ASSERT_EQ(snap.size(), 1u);
    EXPECT_EQ(snap.begin()->first, IntersectionKey(2, {4}));
    EXPECT_EQ(snap.begin()->second, Rational(1, 1152));
    std::remove(path.c_str());
}

TEST(Cache, CorruptLineNamesTheLine) {
    auto path = tmp_path("corrupt");
    {
        std::ofstream f(path);
        f << "0 | 0 0 0 | 1\n1 | x | 1/24\n";
    }
    IntersectionCache c;
    try {
        c.load(path);
        FAIL() << "expected a format error";
    } catch (const CacheFormatError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::remove(path.c_str());
}

TEST(Cache, MergeKeepsExistingEntries) {
    IntersectionCache c;
    c.get(2, {4});
    const auto before = c.size();
    auto path = tmp_path("merge");
    {
        std::ofstream f(path);
        f << "3 | 7 | 1/82944\n2 | 4 | 1/1152\n";
    }
    c.load(path);
    EXPECT_EQ(c.size(), before + 1);
    {
        std::ofstream f(path);
        f << "2 | 4 | 1/1151\n";
    }
    EXPECT_THROW(c.load(path), std::runtime_error);
    EXPECT_EQ(c.get(2, {4}), Rational(1, 1152));
    std::remove(path.c_str());
}

TEST(Cache, ConcurrentReadersAgree) {
    IntersectionCache c;
    std::vector<std::thread> ts;
    std::vector<Rational> out(4);
    for (int i = 0; i < 4; ++i) ts.emplace_back([&, i] { out[i] = c.get(3, {3, 3, 3, 1}); });
    for (auto& t : ts) t.join();
    for (const auto& v : out) EXPECT_EQ(v, intersection(3, {3, 3, 3, 1}));
}

TEST(Correlator, KnownSmallValues) {
    PointState s;
    s.t[2] = Rational(1, 7);
    EXPECT_EQ(correlator_value(0, {0, 0, 0}, s), Rational(1));
    EXPECT_EQ(correlator_value(0, {0, 0, 0, 0}, s), Rational(1, 7));
    PointState zero;
    EXPECT_EQ(correlator_value(1, {1}, zero), Rational(1, 24));
}

TEST(Correlator, RejectsLowLevelsWithoutTruncation) {
    PointState s;
    s.t[1] = Rational(1, 3);
    EXPECT_THROW(correlator_value(0, {0, 0, 0}, s), PolicyError);
    s.truncation = 4;
    EXPECT_NO_THROW(correlator_value(0, {0, 0, 0}, s));
}

TEST(Correlator, TruncatedLevelZeroMatchesSeries) {
    // <<tau_0^3>>_0 at t_0 = x: only m = 0 contributes; <<tau_0^2>>_0 = x
    PointState s;
    s.t[0] = Rational(2, 3);
    s.truncation = 5;
    EXPECT_EQ(correlator_value(0, {0, 0, 0}, s), Rational(1));
    EXPECT_EQ(correlator_value(0, {0, 0}, s), Rational(2, 3));
}

TEST(Eval, Rho1AtOrigin) {
    PointState s;
    s.set_slot("W", {{0, Rational(1)}});
    EXPECT_EQ(eval_expr(parse("<< T(W) >>_1"), s), Rational(1, 24));
    EXPECT_EQ(eval_expr(parse("rho1(W)"), s), Rational(0));
}

TEST(Eval, C0WithRepeatedArgument) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto s = random_state(seed, {expr::slot_id("W")});
        EXPECT_EQ(eval_expr(parse("C0(W, W, W, W)"), s), Rational(0));
    }
}

TEST(Eval, TMatchesStringFieldForm) {
    for (unsigned i = 0; i < 10; ++i) {
        auto s = random_state(trial_seed(99, i), {expr::slot_id("W")});
        auto a = eval_vector(expr::parse_vector("T(W)"), s);
        auto b = eval_vector(expr::build::lin({expr::build::constant(Rational(1)), expr::build::constant(Rational(-1))},
                                              {expr::parse_vector("tau+(W)"), expr::parse_vector("bullet(S, tau+(W))")}),
                             s);
        EXPECT_EQ(a, b) << i;
    }
}

TEST(Eval, NablaAlongNonConstantDirection) {
    // nabla_{T(W)} of a scalar is function-linear in the direction
    auto s = random_state(4, {expr::slot_id("W"), expr::slot_id("V")});
    auto lhs = eval_expr(parse("nabla[T(W)](<< V V >>_1)"), s);
    auto t = eval_vector(expr::parse_vector("T(W)"), s);
    Rational rhs;
    Evaluator ev(s);
    for (const auto& [n, x] : t) {
        PointState u = s;
        u.set_slot("W1", {{n, Rational(1)}});
        rhs += x * eval_expr(parse("nabla[W1](<< V V >>_1)"), u);
    }
    EXPECT_EQ(lhs, rhs);
}

TEST(Eval, UnboundSlotIsAnError) {
    PointState s;
    EXPECT_THROW(eval_expr(parse("<< W >>_1"), s), EvalError);
}

TEST(Eval, TreeAgreesWithDefinitionalExpansion) {
    const char* cases[] = {
        "<< T(W1) W2 >>_1 * << bullet(W1, W2) g^a g_a >>_0",
        "nabla[W3](<< T(T(W1)) W2 >>_2)",
        "nabla[T(W2)](<< T(W1) W3 >>_0)",
        "rho22(W1, W2) + 5 * A1(W3)",
        "nabla[bullet(W1, W2)](rho21(W3))",
        "C2(W1, W2, W3, W1, W2, W3)",
    };
    auto s = random_state(21, {expr::slot_id("W1"), expr::slot_id("W2"), expr::slot_id("W3")});
    for (const char* c : cases) EXPECT_EQ(eval_expr(parse(c), s), eval_poly(rewrite::expand_definitional(parse(c)), s)) << c;
}

TEST(Numeric, Rho0PassesTwentyTrials) {
    auto rep = check_identity_numeric(catalog::identity("rho0_vanishes"), 20, 1);
    EXPECT_TRUE(rep.passed()) << rep.residual;
    EXPECT_EQ(rep.trials.size(), 20u);
    for (const auto& v : rep.trials) EXPECT_TRUE(v.is_zero());
}

TEST(Numeric, StringReductionOfRho22) {
    auto rep = check_identity_numeric(catalog::identity("rho22_string"), 20, 1);
    EXPECT_TRUE(rep.passed()) << rep.residual << rep.error;
}

TEST(Numeric, DecompositionComponentwise) {
    auto rep = check_identity_numeric(catalog::identity("decomposition"), 20, 1);
    EXPECT_TRUE(rep.passed()) << rep.residual << rep.error;
}

TEST(Numeric, FailureCarriesValueVerbatim) {
    IdentityStatement st;
    st.name = "bogus";
    st.lhs = parse("<< W1 W1 >>_1");
    st.rhs = parse("0");
    auto rep = check_identity_numeric(st, 3, 1);
    EXPECT_EQ(rep.outcome, Outcome::Fail);
    EXPECT_NE(rep.residual.find("trial 0: "), std::string::npos);
    EXPECT_NE(rep.residual.find(rep.trials[0].str()), std::string::npos);
}

TEST(Numeric, ParallelTrialsMatchSerial) {
    NumericPolicy par;
    par.jobs = 4;
    auto a = check_identity_numeric(catalog::identity("G_vanishes"), 8, 5);
    auto b = check_identity_numeric(catalog::identity("G_vanishes"), 8, 5, par);
    EXPECT_EQ(a.trials, b.trials);
    EXPECT_EQ(a.outcome, b.outcome);
}

TEST(Numeric, LowSupportPolicyIsFlagged) {
    NumericPolicy p;
    p.t_lo = 0;
    auto bad = check_identity_numeric(catalog::identity("rho0_vanishes"), 2, 1, p);
    EXPECT_EQ(bad.outcome, Outcome::Error);
    p.truncation = 4;
    auto ok = check_identity_numeric(catalog::identity("rho0_vanishes"), 2, 1, p);
    EXPECT_EQ(ok.engine_config.at("truncation"), "4");
    EXPECT_FALSE(ok.notes.empty());
}

TEST(Axioms, SmallValuesAtOrigin) {
    PointState zero;
    Evaluator ev(zero);
    namespace b = expr::build;
    EXPECT_EQ(ev.scalar(b::corr(1, {b::T(b::string_field())})), Rational(1, 24));
    PointState s = zero;
    s.set_slot("W1", {{0, Rational(1)}});
    s.set_slot("W2", {{0, Rational(1)}});
    s.set_slot("W3", {{0, Rational(1)}});
    EXPECT_EQ(eval_expr(parse("<< S W1 W2 >>_0"), s), Rational(1));
    EXPECT_EQ(eval_expr(parse("<< T(S) W1 W2 W3 >>_0"), s), Rational(1));
    PointState u = s;
    u.set_slot("W4", {{1, Rational(1)}});
    EXPECT_EQ(eval_expr(parse("<< W1 W2 W3 W4 >>_0"), u), Rational(1));
}

TEST(Axioms, StringAndDilatonHoldExactly) {
    for (std::uint64_t seed : {1u, 2u}) {
        auto rep = check_axioms(random_state(seed, {}), 4);
        EXPECT_TRUE(rep.passed()) << rep.residual << rep.error;
    }
}
