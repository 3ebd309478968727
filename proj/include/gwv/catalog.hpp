#pragma once

// Named identities with their moduli and verification modes.

#include "gwv/identity.hpp"
#include "gwv/tensors.hpp"

#include <map>
#include <string>
#include <vector>

namespace gwv::catalog {

namespace detail {

using expr::parse;
using expr::parse_vector;
namespace b = expr::build;

inline IdentityStatement scalar(std::string name, const std::string& lhs, const std::string& rhs,
                                std::vector<ModulusEntry> mod, Mode mode) {
    IdentityStatement s;
    s.name = std::move(name);
    s.lhs = parse(lhs);
    s.rhs = parse(rhs);
    s.modulus = std::move(mod);
    s.mode = mode;
    return s;
}

inline IdentityStatement vec(std::string name, expr::VExpr lhs, expr::VExpr rhs, std::vector<ModulusEntry> mod,
                             Mode mode) {
    IdentityStatement s;
    s.name = std::move(name);
    s.vector = true;
    s.vlhs = std::move(lhs);
    s.vrhs = std::move(rhs);
    s.modulus = std::move(mod);
    s.mode = mode;
    return s;
}

inline const std::vector<ModulusEntry> kModA1A2G = {{"rho0", 0, 3}, {"rho1", 0, 2}, {"C0", 0, 0}};
inline const std::vector<ModulusEntry> kModA1A2BG = {{"rho0", 0, 3}, {"rho1", 0, 3}, {"C0", 0, 0}};

inline const char* kA1A2 = "A2(W1, T(W2)) - nabla[T(W1)](A1(W2))";
inline const char* kA1A2B = "B(W1, W2, T(V)) - A2(bullet(W1, W2), V) + nabla[bullet(W1, W2)](A1(V))";

inline const char* kA1A2GRhs =
    "-1/24 * G(W1, W2, g^a, g_a)"
    " + (1/6 * C1(W2, g_a, W1, g^a, g_b) + 19/2 * C1(W1, g_b, g_a, g^a, W2)"
    " - 21/2 * C1(W2, g_b, g^a, g_a, W1)) * << g^b >>_1";

inline const char* kA1A2BGRhs =
    "24 * G(V, W1, W2, g^a) * << g_a >>_1"
    " + nabla[g_a](G(W1, W2, V, g^a))"
    " + 1/4 * (nabla[V](G(W1, W2, g_a, g^a)) - nabla[W1](G(V, W2, g_a, g^a)) - nabla[W2](G(V, W1, g_a, g^a)))"
    " - 3 * << V g_b >>_1 * (C1(W1, W2, g_a, g^a, g^b) - C1(W1, g_a, W2, g^b, g^a) - C1(W2, g_a, W1, g^b, g^a))"
    " + << W1 g_b >>_1 * (27 * C1(W2, g_a, V, g^b, g^a) - 34 * C1(V, g_a, W2, g^b, g^a)"
    " - 7 * C1(W2, g^b, g_a, g^a, V))"
    " + << W2 g_b >>_1 * (27 * C1(W1, g_a, V, g^b, g^a) - 34 * C1(V, g_a, W1, g^b, g^a)"
    " - 7 * C1(W1, g^b, g_a, g^a, V))"
    " - 8 * << g_a g_b >>_1 * (2 * C1(W1, W2, g^a, g^b, V) - C1(W1, V, W2, g^a, g^b) - C1(W2, V, W1, g^a, g^b))"
    " - 120 * << g_a >>_1 * << g_b >>_1 * (3 * C1(W1, W2, g^a, g^b, V) - C1(W1, V, W2, g^a, g^b)"
    " - C1(W2, V, W1, g^a, g^b))"
    " - << g_b >>_1 * (19 * C2(W2, g^b, W1, g_a, V, g^a) + 19 * C2(W1, g^b, W2, g_a, V, g^a)"
    " + 19 * C2(W1, W2, g_a, g^a, V, g^b) - 12 * C2(V, g_a, g^b, g^a, W1, W2)"
    " - 3 * C2(W1, V, W2, g^b, g_a, g^a) - 3 * C2(W2, V, W1, g^b, g_a, g^a)"
    " - 28 * C2(W1, g_a, W2, g^b, V, g^a) - 28 * C2(W2, g_a, W1, g^b, V, g^a))"
    " - C3(W1, W2, g_a, g^a, V, g_b, g^b)";

inline const char* kTypex1 =
    "3 * << bullet(W, g_a) g^a g_b g^b V >>_0 + << W g_a g^a g_b bullet(g^b, V) >>_0"
    " + << W g_a g^a g^m >>_0 * << g_m g_b g^b V >>_0 + 2 * << W g_a g_b g^m >>_0 * << g_m g^a g^b V >>_0";

inline const char* kTypex2 =
    "<< bullet(W, V) g_a g^a g_b g^b >>_0 + 2 * << bullet(W, g_a) g^a g_b g^b V >>_0"
    " + << W V g_a g^a bullet(g_b, g^b) >>_0 + 2 * << W V g^a g^m >>_0 * << g_m g_a g_b g^b >>_0"
    " + << W g_a g^a g^m >>_0 * << g_m V g_b g^b >>_0";

inline std::map<std::string, IdentityStatement> build() {
    std::map<std::string, IdentityStatement> m;
    auto put = [&](IdentityStatement s) { m.emplace(s.name, std::move(s)); };
    const std::vector<ModulusEntry> none;

    put(scalar("MtoG", "nabla[T(W1)](rho21(W2)) - rho22(W1, T(W2))",
               "(3 * rho0(W2, W1, g^a) - rho0(W1, W2, g^a)) * << T(g_a) >>_2 - rho0(W2, T(W1), g^a) * << g_a >>_2"
               " + A2(W1, T(W2)) - nabla[T(W1)](A1(W2))",
               none, Mode::Both));
    put(scalar("MGtoBP", "rho23(W1, W2, T(W3)) + nabla[bullet(W1, W2)](rho21(W3)) - rho22(bullet(W1, W2), W3)",
               "-B(W1, W2, T(W3)) - nabla[bullet(W1, W2)](A1(W3)) + A2(bullet(W1, W2), W3)", {{"rho0", 0, 1}},
               Mode::Both));
    put(scalar("A1A2", kA1A2, "0", kModA1A2G, Mode::Numeric));
    put(scalar("A1A2B", kA1A2B, "0", kModA1A2BG, Mode::Numeric));
    put(scalar("A1A2G", std::string("120 * (") + kA1A2 + ")", kA1A2GRhs, kModA1A2G, Mode::Both));
    put(scalar("A1A2BG", std::string("720 * (") + kA1A2B + ")", kA1A2BGRhs, kModA1A2BG, Mode::Both));
    put(scalar("typex_equivalence", kTypex1, kTypex2, {{"rho0", 0, 3}, {"C0", 0, 0}}, Mode::Both));

    // rule fidelity: the T-elimination equations as printed
    put(scalar("eq5", "<< T(W1) W2 W3 W4 >>_0", "<< bullet(W1, W2) W3 W4 >>_0", {{"rho0", 0, 1}}, Mode::Both));
    put(scalar("eq6", "<< T(W1) W2 W3 W4 W5 >>_0",
               "<< bullet(W1, W2) W3 W4 W5 >>_0 + << bullet(W1, W3) W2 W4 W5 >>_0 + << W1 W2 W3 bullet(W4, W5) >>_0",
               {{"rho0", 0, 2}}, Mode::Both));
    put(scalar("eq7", "<< T(W1) W2 W3 W4 W5 W6 >>_0",
               "<< bullet(W1, W2) W3 W4 W5 W6 >>_0 + << bullet(W1, W3) W2 W4 W5 W6 >>_0"
               " + << bullet(W1, W4) W2 W3 W5 W6 >>_0 + << W1 W2 W3 W4 bullet(W5, W6) >>_0"
               " + << W1 W2 W3 g^b >>_0 * << g_b W4 W5 W6 >>_0 + << W1 W2 W4 g^b >>_0 * << g_b W3 W5 W6 >>_0"
               " + << W1 W3 W4 g^b >>_0 * << g_b W2 W5 W6 >>_0",
               {{"rho0", 0, 3}}, Mode::Both));
    put(scalar("eq8", "<< T(W1) W2 >>_1", "<< bullet(W1, W2) >>_1 + 1/24 * << W1 W2 g^m g_m >>_0",
               {{"rho0", 0, 0}, {"rho1", 0, 1}}, Mode::Both));
    put(scalar("eq9", "<< T(W1) W2 W3 >>_1",
               "<< bullet(W1, W2) W3 >>_1 + << bullet(W1, W3) W2 >>_1 + << W1 W2 W3 g^a >>_0 * << g_a >>_1"
               " + 1/24 * << W1 W2 W3 g^m g_m >>_0",
               {{"rho0", 0, 0}, {"rho1", 0, 2}}, Mode::Both));
    put(scalar("eq10", "<< T(W1) W2 W3 W4 >>_1",
               "<< bullet(W1, W2) W3 W4 >>_1 + << bullet(W1, W3) W2 W4 >>_1 + << bullet(W1, W4) W2 W3 >>_1"
               " + << W1 W3 W4 g^a >>_0 * << g_a W2 >>_1 + << W1 W2 W4 g^a >>_0 * << g_a W3 >>_1"
               " + << W1 W2 W3 g^a >>_0 * << g_a W4 >>_1 + << W1 W2 W3 W4 g^a >>_0 * << g_a >>_1"
               " + 1/24 * << W1 W2 W3 W4 g^a g_a >>_0",
               {{"rho0", 0, 0}, {"rho1", 0, 3}}, Mode::Both));
    put(scalar("C1_explicit", "C1(W1, W2, W3, W4, W5)",
               "<< bullet(W1, W2) W3 W4 W5 >>_0 + << W1 W2 bullet(W3, W4) W5 >>_0"
               " - << bullet(W1, W3) W2 W4 W5 >>_0 - << W1 W3 bullet(W2, W4) W5 >>_0",
               none, Mode::Both));
    put(scalar("C2_explicit", "C2(W1, W2, W3, W4, W5, W6)",
               "<< bullet(W1, W2) W3 W4 W5 W6 >>_0 + << W1 W2 bullet(W3, W4) W5 W6 >>_0"
               " - << bullet(W1, W3) W2 W4 W5 W6 >>_0 - << W1 W3 bullet(W2, W4) W5 W6 >>_0"
               " + << W1 W2 W5 g^a >>_0 * << g_a W3 W4 W6 >>_0 + << W1 W2 W6 g^a >>_0 * << g_a W3 W4 W5 >>_0"
               " - << W1 W3 W5 g^a >>_0 * << g_a W2 W4 W6 >>_0 - << W1 W3 W6 g^a >>_0 * << g_a W2 W4 W5 >>_0",
               none, Mode::Both));

    // vector identities
    put(vec("special_trr", b::bullet(b::T(b::slot("W1")), b::slot("W2")), b::lin({}, {}), {{"rho0", 0, 0}},
            Mode::Both));
    put(vec("special_trr_deriv",
            b::lin({b::corr(0, {parse_vector("T(W1)"), b::slot("W2"), b::slot("W3"), b::gamma('a', true)})},
                   {b::gamma('a', false)}),
            parse_vector("bullet(bullet(W1, W2), W3)"), {{"rho0", 0, 1}}, Mode::Both));
    put(vec("decomposition", b::slot("W1"),
            b::lin({b::constant(Rational(1)), b::constant(Rational(1))},
                   {parse_vector("bullet(S, W1)"), parse_vector("T(tau-(W1))")}),
            none, Mode::Numeric));
    put(scalar("rho22_string", "rho22(S, W1)", "rho21(tau-(W1))", none, Mode::Numeric));

    // each universal tensor vanishes
    put(scalar("rho0_vanishes", "rho0(W1, W2, W3)", "0", {{"rho0", 0, 0}}, Mode::Numeric));
    put(scalar("rho1_vanishes", "rho1(W1)", "0", {{"rho1", 0, 0}}, Mode::Numeric));
    put(scalar("C0_vanishes", "C0(W1, W2, W3, W4)", "0", {{"C0", 0, 0}}, Mode::Numeric));
    put(scalar("G_vanishes", "G(W1, W2, W3, W4)", "0", {{"G", 0, 0}}, Mode::Numeric));
    put(scalar("rho21_vanishes", "rho21(W1)", "0", {{"rho21", 0, 0}}, Mode::Numeric));
    put(scalar("rho22_vanishes", "rho22(W1, W2)", "0", {{"rho22", 0, 0}}, Mode::Numeric));
    put(scalar("rho23_vanishes", "rho23(W1, W2, W3)", "0", {{"rho23", 0, 0}}, Mode::Numeric));
    return m;
}

}  // namespace detail

inline const std::map<std::string, IdentityStatement>& all() {
    static const std::map<std::string, IdentityStatement> m = detail::build();
    return m;
}

inline std::vector<std::string> names() {
    std::vector<std::string> v;
    for (const auto& [k, s] : all()) v.push_back(k);
    return v;
}

/// Throws std::out_of_range for unknown names.
inline const IdentityStatement& identity(const std::string& name) {
    const auto& m = all();
    auto it = m.find(name);
    if (it == m.end()) throw std::out_of_range("unknown identity: " + name);
    return it->second;
}

}  // namespace gwv::catalog
