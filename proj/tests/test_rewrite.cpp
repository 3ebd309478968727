#include "gwv/catalog.hpp"
#include "gwv/expr/parse.hpp"
#include "gwv/fidelity.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/rewrite/verify.hpp"

#include <gtest/gtest.h>

#include <future>

using namespace gwv;
using expr::parse;
using rewrite::TensorPoly;

namespace {

TensorPoly ex(const std::string& s) { return rewrite::expand_definitional(parse(s)); }

std::string canon(const TensorPoly& p) { return expr::print_canonical(p); }

}  // namespace

TEST(Rules, TermCounts) {
    const int g0[] = {1, 2, 4, 8, 16};
    for (int k = 3; k <= 7; ++k) EXPECT_EQ(rewrite::make_rule(0, k).rhs.size(), std::size_t(g0[k - 3])) << k;
    const int g1[] = {2, 3, 5, 9, 17};
    for (int k = 1; k <= 5; ++k) EXPECT_EQ(rewrite::make_rule(1, k).rhs.size(), std::size_t(g1[k - 1])) << k;
}

TEST(Rules, Genus0Arity3) {
    auto r = rewrite::make_rule(0, 3);
    EXPECT_EQ(r.base, "rho0");
    EXPECT_EQ(r.order, 0);
    EXPECT_EQ(canon(r.rhs), canon(ex("<< W1 g^a >>_0 * << g_a W2 W3 >>_0")));
}

TEST(Rules, Genus1Arity1) {
    auto r = rewrite::make_rule(1, 1);
    EXPECT_EQ(canon(r.rhs), canon(ex("<< W1 g^a >>_0 * << g_a >>_1 + 1/24 * << W1 g^a g_a >>_0")));
}

TEST(Rules, FidelityWithPrintedEquations) {
    auto checks = check_rule_fidelity();
    ASSERT_EQ(checks.size(), 8u);
    for (const auto& c : checks) EXPECT_TRUE(c.ok) << c.name << "\n" << c.residual;
}

TEST(Rules, DerivativeOfC0IsC1) {
    auto c1 = rewrite::expand_definitional(parse("C1(W1, W2, W3, W4, W5)"));
    auto d = rewrite::derive_covariant(rewrite::expand_definitional(parse("C0(W1, W2, W3, W4)")), expr::slot_id("W5"));
    EXPECT_EQ(c1, d);
    EXPECT_TRUE(rewrite::difference(catalog::identity("C1_explicit")).is_zero());
}

TEST(Rules, UnknownGenusOrSmallArity) {
    EXPECT_THROW(rewrite::make_rule(2, 1), expr::ExprError);
    EXPECT_THROW(rewrite::make_rule(0, 2), expr::ExprError);
    EXPECT_THROW(rewrite::build_ruleset(2, 1), expr::ExprError);
}

TEST(Reduce, SingleRuleApplication) {
    auto rs = rewrite::build_ruleset();
    auto p = ex("<< tau+(W) V1 V2 >>_0");
    EXPECT_EQ(canon(rewrite::trr_reduce(p, rs)), canon(ex("<< W g^a >>_0 * << g_a V1 V2 >>_0")));
}

TEST(Reduce, FixpointOnReducedInput) {
    auto rs = rewrite::build_ruleset();
    auto p = ex("<< W g^a >>_0 * << g_a V1 V2 >>_0 + 3 * << tau+(W) >>_2");
    EXPECT_EQ(rewrite::trr_reduce(p, rs), p);
}

TEST(Reduce, ArityOverflowNamesTheFactor) {
    auto rs = rewrite::build_ruleset(3, 1);
    auto p = ex("<< tau+(W1) W2 W3 W4 >>_0");
    try {
        rewrite::trr_reduce(p, rs);
        FAIL() << "expected overflow";
    } catch (const rewrite::ArityOverflow& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("arity overflow"), std::string::npos);
        EXPECT_NE(msg.find("tau+(W1)"), std::string::npos);
        EXPECT_NE(msg.find("arity 4"), std::string::npos);
    }
}

TEST(Reduce, TerminatesWithoutShiftsInReducibleFactors) {
    auto rs = rewrite::build_ruleset();
    auto p = rewrite::expand_definitional(parse("<< T(T(W1)) W2 W3 W4 >>_0 * << T(W2) V >>_1"));
    auto q = rewrite::trr_reduce(p, rs);
    for (const auto& [k, m] : q)
        for (const auto& f : m.factors) EXPECT_FALSE(rewrite::reducible(f));
}

TEST(Reduce, TypexFirstFormFromArity6Rule) {
    // the fixed strategy and both printed forms agree modulo the ideal
    auto rs = std::make_shared<const rewrite::RuleSet>(rewrite::build_ruleset());
    rewrite::Reducer r(rs);
    auto nf = r.reduce(ex("<< T(W) V g_a g^a g_b g^b >>_0"));
    for (const char* side : {"typex_equivalence"}) {
        const auto& st = catalog::identity(side);
        for (const auto& e : {st.lhs, st.rhs}) {
            auto d = nf - r.reduce(rewrite::expand_definitional(e));
            auto res = rewrite::ideal_membership(d, st.modulus);
            EXPECT_TRUE(res.member) << canon(res.residual);
        }
    }
}

TEST(Reduce, ReductionPreservesPointValues) {
    auto rs = rewrite::build_ruleset();
    auto p = rewrite::expand_definitional(parse("<< T(W1) T(W2) W3 >>_0 + << T(T(W1)) W2 >>_1"));
    auto q = rewrite::trr_reduce(p, rs);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto s = oracle::random_state(seed, {expr::slot_id("W1"), expr::slot_id("W2"), expr::slot_id("W3")});
        EXPECT_EQ(oracle::eval_poly(p, s), oracle::eval_poly(q, s));
    }
}

TEST(Membership, ZeroTargetHasEmptyCertificate) {
    auto r = rewrite::ideal_membership(TensorPoly{}, {{"rho0", 0, 0}});
    EXPECT_TRUE(r.member);
    EXPECT_TRUE(r.certificate.entries.empty());
}

TEST(Membership, GeneratorInstanceItself) {
    auto target = ex("<< tau+(W) V1 V2 >>_0 - << W g^a >>_0 * << g_a V1 V2 >>_0");
    auto r = rewrite::ideal_membership(target, {{"rho0", 0, 0}});
    ASSERT_TRUE(r.member);
    EXPECT_FALSE(r.modulo_rules);
    ASSERT_EQ(r.certificate.entries.size(), 1u);
    EXPECT_EQ(r.certificate.entries[0].generator, "rho0");
    EXPECT_EQ(r.certificate.entries[0].coeff, Rational(1));
    auto back = rewrite::expand_certificate(r.certificate, std::make_shared<const rewrite::RuleSet>());
    EXPECT_EQ(back, target);
}

TEST(Membership, TypexDifferenceIsMember) {
    const auto& st = catalog::identity("typex_equivalence");
    auto r = rewrite::ideal_membership(rewrite::difference(st), st.modulus);
    EXPECT_TRUE(r.member) << canon(r.residual);
}

TEST(Membership, NonMemberReportsResidual) {
    // a lone genus-2 correlator is not in the ideal of rho0
    auto r = rewrite::ideal_membership(ex("<< W1 W2 >>_2"), {{"rho0", 0, 1}});
    EXPECT_FALSE(r.member);
    EXPECT_EQ(canon(r.residual), "<< W1 W2 >>_2");
}

TEST(Verify, DefinitionalIdentityTakesFastPath) {
    auto rep = rewrite::verify_identity(catalog::identity("MtoG"));
    EXPECT_TRUE(rep.passed()) << rep.residual << rep.error;
    EXPECT_EQ(rep.path, "syntactic-zero");
}

TEST(Verify, CertificateIdentities) {
    for (const char* name : {"MGtoBP", "A1A2G", "typex_equivalence"}) {
        auto rep = rewrite::verify_identity(catalog::identity(name));
        EXPECT_TRUE(rep.passed()) << name << "\n" << rep.residual << rep.error;
        EXPECT_EQ(rep.path, "certificate") << name;
        EXPECT_GT(rep.certificate_entries, 0u) << name;
    }
}

TEST(Verify, VectorIdentities) {
    for (const char* name : {"special_trr", "special_trr_deriv"}) {
        auto rep = rewrite::verify_identity(catalog::identity(name));
        EXPECT_TRUE(rep.passed()) << name << "\n" << rep.residual << rep.error;
    }
}

TEST(Verify, PerturbedCoefficientFails) {
    IdentityStatement st = catalog::identity("A1A2G");
    // nonzero in the point model, hence outside the ideal
    st.rhs = expr::build::sum({st.rhs, parse("1/1000 * << W1 g^a >>_1 * << g_a W2 >>_1")});
    EXPECT_EQ(oracle::check_identity_numeric(st, 3).outcome, Outcome::Fail);
    auto rep = rewrite::verify_identity(st);
    EXPECT_EQ(rep.outcome, Outcome::Fail);
    EXPECT_GT(rep.residual_terms, 0u);
    EXPECT_FALSE(rep.residual.empty());
}

TEST(Verify, MissingModulusFails) {
    IdentityStatement st = catalog::identity("MGtoBP");
    st.modulus.clear();
    auto rep = rewrite::verify_identity(st);
    EXPECT_EQ(rep.outcome, Outcome::Fail);
    EXPECT_FALSE(rep.residual.empty());
}

TEST(Verify, ReportsCarryTranscriptionNotes) {
    auto rep = rewrite::verify_identity(catalog::identity("A1A2G"));
    bool g_note = false;
    for (const auto& n : rep.notes) g_note |= n.find("v_{g(4)}") != std::string::npos;
    EXPECT_TRUE(g_note);
    EXPECT_EQ(rep.engine_config.at("modulus"), "{rho0: 0-3, rho1: 0-2, C0: 0}");
}

TEST(Verify, ConcurrentVerificationsAgree) {
    std::vector<std::future<Report>> fs;
    for (const char* name : {"MGtoBP", "typex_equivalence", "MtoG", "eq7"})
        fs.push_back(std::async(std::launch::async, [name] { return rewrite::verify_identity(catalog::identity(name)); }));
    for (auto& f : fs) EXPECT_TRUE(f.get().passed());
}

TEST(DeriveCovariant, CommutesWithNumericDerivative) {
    // the derivative of a pure polynomial along a parallel slot equals the
    // directional derivative computed by the oracle
    auto p = ex("<< T(W1) W2 >>_1 * << W1 W2 g^a >>_0 * << g_a >>_1");
    auto d = rewrite::derive_covariant(p, expr::slot_id("V"));
    auto s = oracle::random_state(5, {expr::slot_id("W1"), expr::slot_id("W2"), expr::slot_id("V")});
    auto direct = oracle::eval_expr(parse("nabla[V](<< T(W1) W2 >>_1 * << W1 W2 g^a >>_0 * << g_a >>_1)"), s);
    EXPECT_EQ(oracle::eval_poly(d, s), direct);
}
