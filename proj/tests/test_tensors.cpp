#include "gwv/catalog.hpp"
#include "gwv/expr/parse.hpp"
#include "gwv/oracle/check.hpp"
#include "gwv/rewrite/verify.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace gwv;
using expr::parse;

namespace {

// Coefficient of every term after distributing products over sums; named
// tensors, correlators and derivatives count as atoms.
std::vector<Rational> terms(const expr::SExpr& e) {
    using expr::SKind;
    switch (e->kind) {
        case SKind::Const: return {e->value};
        case SKind::Scale: {
            auto v = terms(e->kids[0]);
            for (auto& x : v) x *= e->value;
            return v;
        }
        case SKind::Sum: {
            std::vector<Rational> v;
            for (const auto& k : e->kids) {
                auto w = terms(k);
                v.insert(v.end(), w.begin(), w.end());
            }
            return v;
        }
        case SKind::Prod: {
            std::vector<Rational> v{Rational(1)};
            for (const auto& k : e->kids) {
                std::vector<Rational> next;
                for (const auto& x : v)
                    for (const auto& y : terms(k)) next.push_back(x * y);
                v = std::move(next);
            }
            return v;
        }
        default: return {Rational(1)};
    }
}

std::vector<Rational> checksum(const char* text) {
    auto v = terms(parse(text));
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<Rational> qs(std::initializer_list<std::pair<long, long>> xs) {
    std::vector<Rational> v;
    for (auto [p, q] : xs) v.emplace_back(p, q);
    std::sort(v.begin(), v.end());
    return v;
}

rewrite::TensorPoly ex(const std::string& s) { return rewrite::expand_definitional(parse(s)); }

}  // namespace

TEST(Transcription, A1Checksum) {
    EXPECT_EQ(checksum(tensors::detail::kA1), qs({{7, 10}, {1, 10}, {-1, 240}, {13, 240}, {1, 960}}));
}

TEST(Transcription, A2Checksum) {
    EXPECT_EQ(checksum(tensors::detail::kA2), qs({{13, 10}, {4, 5}, {4, 5}, {-4, 5}, {23, 240}, {1, 48}, {1, 48},
                                                  {-1, 80}, {7, 30}, {1, 30}, {1, 30}, {-1, 30}, {1, 576}}));
}

TEST(Transcription, BChecksum) {
    EXPECT_EQ(checksum(tensors::detail::kBPlain), qs({{1, 5}, {-6, 5}, {1, 120}, {-1, 120}, {1, 10}, {-1, 20}}));
    EXPECT_EQ(checksum(tensors::detail::kBSym), qs({{-1, 5}, {2, 5}, {-3, 5}, {3, 10}, {-1, 5}, {-1, 80}, {1, 80},
                                                    {-1, 20}, {1, 60}, {-1, 120}}));
}

TEST(Transcription, GChecksum) {
    EXPECT_EQ(checksum(tensors::detail::kGSym), qs({{3, 1}, {-4, 1}, {-1, 1}, {2, 1}, {1, 6}, {1, 24}, {-1, 4}}));
}

TEST(Transcription, Rho23Checksum) {
    EXPECT_EQ(checksum(tensors::detail::kRho23Plain), qs({{2, 1}, {-2, 1}, {-1, 1}}));
    EXPECT_EQ(checksum(tensors::detail::kRho23Sym), qs({{1, 1}, {-1, 1}}));
}

TEST(Transcription, A1A2GRightSide) {
    EXPECT_EQ(checksum(catalog::detail::kA1A2GRhs), qs({{-1, 24}, {1, 6}, {19, 2}, {-21, 2}}));
}

TEST(Transcription, A1A2BGRightSide) {
    std::vector<std::pair<long, long>> want{{24, 1}, {1, 1}, {1, 4}, {-1, 4}, {-1, 4}, {-3, 1}, {3, 1}, {3, 1}};
    for (int line = 0; line < 2; ++line)
        for (long c : {27, -34, -7}) want.push_back({c, 1});
    for (long c : {-16, 8, 8, -360, 120, 120}) want.push_back({c, 1});
    for (long c : {-19, -19, -19, 12, 3, 3, 28, 28, -1}) want.push_back({c, 1});
    auto got = checksum(catalog::detail::kA1A2BGRhs);
    EXPECT_EQ(got.size(), 29u);
    std::vector<Rational> w;
    for (auto [p, q] : want) w.emplace_back(p, q);
    std::sort(w.begin(), w.end());
    EXPECT_EQ(got, w);
}

TEST(Tensor, Rho0AndRho1Bodies) {
    EXPECT_EQ(expr::to_string(tensors::definition("rho0").body), "<< T(W1) W2 W3 >>_0");
    EXPECT_EQ(ex("rho1(W)"), ex("<< T(W) >>_1 - 1/24 * << W g^a g_a >>_0"));
}

TEST(Tensor, Arities) {
    const std::pair<const char*, int> want[] = {{"rho0", 3}, {"C0", 4}, {"rho1", 1}, {"G", 4},  {"rho21", 1},
                                                {"rho22", 2}, {"rho23", 3}, {"A1", 1}, {"A2", 2}, {"B", 3},
                                                {"C1", 5},   {"C2", 6},   {"C3", 7}};
    for (auto [n, a] : want) EXPECT_EQ(tensors::definition(n).arity, a) << n;
}

TEST(Tensor, ErrorsOnUnknownNameOrArity) {
    namespace b = expr::build;
    EXPECT_THROW(tensors::tensor("rho9", {b::slot("W")}), expr::ExprError);
    EXPECT_THROW(tensors::tensor("rho0", {b::slot("W")}), expr::ExprError);
    EXPECT_THROW(tensors::definition("nope"), expr::ExprError);
    EXPECT_NO_THROW(tensors::tensor("A2", {b::slot("W1"), b::slot("W2")}));
}

TEST(Tensor, HigherCAreDerivativesNotHandCoded) {
    EXPECT_EQ(expr::to_string(tensors::definition("C2").body), "nabla[W6](C1(W1, W2, W3, W4, W5))");
    EXPECT_EQ(ex("C2(W1, W2, W3, W4, W5, W6)"),
              rewrite::derive_covariant(ex("C1(W1, W2, W3, W4, W5)"), expr::slot_id("W6")));
}

TEST(Tensor, ExpansionLeavesNoNamedReferences) {
    for (const auto& n : tensors::base_names()) {
        int a = tensors::definition(n).arity;
        std::vector<expr::VExpr> args;
        for (int i = 1; i <= a; ++i) args.push_back(expr::build::slot("W" + std::to_string(i)));
        auto p = rewrite::expand_definitional(tensors::tensor(n, args));
        EXPECT_FALSE(p.is_zero()) << n;
    }
}

TEST(Symmetry, A2BGInvariantUnderSlotPermutation) {
    EXPECT_EQ(ex("A2(W1, W2)"), ex("A2(W2, W1)"));
    auto b = ex("B(W1, W2, W3)");
    EXPECT_EQ(b, ex("B(W2, W1, W3)"));
    EXPECT_EQ(b, ex("B(W3, W2, W1)"));
    EXPECT_EQ(b, ex("B(W1, W3, W2)"));
    auto g = ex("G(W1, W2, W3, W4)");
    EXPECT_EQ(g, ex("G(W2, W1, W3, W4)"));
    EXPECT_EQ(g, ex("G(W4, W2, W3, W1)"));
    EXPECT_EQ(g, ex("G(W1, W3, W2, W4)"));
}

TEST(Catalog, EntriesAndModes) {
    for (const char* n : {"MtoG", "MGtoBP", "A1A2", "A1A2B", "A1A2G", "A1A2BG", "typex_equivalence", "eq5", "eq10",
                          "C1_explicit", "C2_explicit", "special_trr", "special_trr_deriv", "decomposition",
                          "rho22_string"})
        EXPECT_NO_THROW(catalog::identity(n)) << n;
    EXPECT_THROW(catalog::identity("nope"), std::out_of_range);
    EXPECT_EQ(catalog::identity("decomposition").mode, Mode::Numeric);
    EXPECT_EQ(catalog::identity("rho22_string").mode, Mode::Numeric);
    EXPECT_EQ(catalog::identity("A1A2G").max_order("rho0"), 3);
    EXPECT_EQ(catalog::identity("A1A2G").max_order("rho1"), 2);
    EXPECT_EQ(catalog::identity("A1A2BG").max_order("rho1"), 3);
    EXPECT_TRUE(catalog::identity("MtoG").modulus.empty());
    EXPECT_EQ(catalog::identity("MGtoBP").max_order("rho0"), 1);
    EXPECT_TRUE(catalog::identity("special_trr").vector);
}

TEST(Catalog, A1A2StatementShape) {
    const auto& st = catalog::identity("A1A2");
    EXPECT_EQ(expr::to_string(st.lhs), "A2(W1, T(W2)) - nabla[T(W1)](A1(W2))");
    EXPECT_EQ(expr::to_string(st.rhs), "0");
}

TEST(Catalog, SpecialTrrDerivativeShape) {
    const auto& st = catalog::identity("special_trr_deriv");
    EXPECT_EQ(expr::to_string(st.vrhs), "bullet(bullet(W1, W2), W3)");
}

TEST(Vanishing, UniversalTensorsAtRandomPoints) {
    for (const char* n : {"rho0_vanishes", "rho1_vanishes", "C0_vanishes", "G_vanishes", "rho21_vanishes",
                          "rho22_vanishes", "rho23_vanishes"}) {
        auto rep = oracle::check_identity_numeric(catalog::identity(n), 5, 3);
        EXPECT_TRUE(rep.passed()) << n << ": " << rep.residual << rep.error;
    }
}

TEST(Vanishing, Rho23SummedOncePerChoiceOfFirstSlot) {
    // the S3 sum read with each unordered choice counted twice does not vanish
    using namespace tensors::detail;
    IdentityStatement st;
    st.name = "rho23_double";
    st.lhs = expr::build::sum({parse(kRho23Plain), sym(kRho23Sym, 3)});
    st.rhs = parse("0");
    EXPECT_EQ(oracle::check_identity_numeric(st, 2, 3).outcome, Outcome::Fail);
}
