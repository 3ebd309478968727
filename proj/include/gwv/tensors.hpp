#pragma once

// Named tensors and their definitions in the expression grammar. Every
// definition is written over the formal slots W1..Wn.

#include "gwv/expr/parse.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace gwv::tensors {

struct TensorDef {
    std::string name;
    int arity = 0;
    expr::SExpr body;
};

namespace detail {

inline std::vector<expr::SlotId> formal_slots(int n) {
    std::vector<expr::SlotId> s;
    for (int i = 1; i <= n; ++i) s.push_back(expr::slot_id("W" + std::to_string(i)));
    return s;
}

inline expr::SExpr sym(const std::string& text, int n) { return expr::symmetrize(expr::parse(text), formal_slots(n)); }

inline const char* kA1 =
    "7/10 * << g_a >>_1 * << bullet(g^a, W1) >>_1"
    " + 1/10 * << g_a bullet(g^a, W1) >>_1"
    " - 1/240 * << W1 bullet(g_a, g^a) >>_1"
    " + 13/240 * << W1 g_a g^a g^b >>_0 * << g_b >>_1"
    " + 1/960 * << W1 g^a g_a g^b g_b >>_0";

inline const char* kA2 =
    "13/10 * << W1 W2 g^a g^b >>_0 * << g_a >>_1 * << g_b >>_1"
    " + 4/5 * << W1 g^a >>_1 * << bullet(g_a, W2) >>_1"
    " + 4/5 * << W2 g^a >>_1 * << bullet(g_a, W1) >>_1"
    " - 4/5 * << bullet(W1, W2) g^a >>_1 * << g_a >>_1"
    " + 23/240 * << W1 W2 g^a g_a g^b >>_0 * << g_b >>_1"
    " + 1/48 * << W1 g^a g_a g^b >>_0 * << g_b W2 >>_1"
    " + 1/48 * << W2 g^a g_a g^b >>_0 * << g_b W1 >>_1"
    " - 1/80 * << W1 W2 bullet(g^a, g_a) >>_1"
    " + 7/30 * << W1 W2 g^a g^b >>_0 * << g_a g_b >>_1"
    " + 1/30 * << g_a bullet(g^a, W1) W2 >>_1"
    " + 1/30 * << g_a bullet(g^a, W2) W1 >>_1"
    " - 1/30 * << bullet(W1, W2) g_a g^a >>_1"
    " + 1/576 * << W1 W2 g^a g_a g^b g_b >>_0";

inline const char* kBPlain =
    "1/5 * << W1 W2 W3 g^a g^b >>_0 * << g_a >>_1 * << g_b >>_1"
    " - 6/5 * << W1 W2 W3 g^a >>_0 * << g_a g^b >>_1 * << g_b >>_1"
    " + 1/120 * << W1 W2 W3 g^a g_a g^b >>_0 * << g_b >>_1"
    " - 1/120 * << W1 W2 W3 bullet(g^a, g_a) >>_1"
    " + 1/10 * << W1 W2 W3 g^a g^b >>_0 * << g_a g_b >>_1"
    " - 1/20 * << W1 W2 W3 g^a >>_0 * << g_a g^b g_b >>_1";

inline const char* kBSym =
    "-1/5 * << W1 W2 g^a g^b >>_0 * << g_a >>_1 * << g_b W3 >>_1"
    " + 2/5 * << bullet(W1, g_a) >>_1 * << g^a W2 W3 >>_1"
    " - 3/5 * << W1 bullet(W2, g^a) >>_1 * << g_a W3 >>_1"
    " + 3/10 * << W1 g_a >>_1 * << g^a bullet(W2, W3) >>_1"
    " - 1/5 * << g_a >>_1 * << g^a W1 bullet(W2, W3) >>_1"
    " - 1/80 * << W1 W2 g^a g_a g^b >>_0 * << g_b W3 >>_1"
    " + 1/80 * << W1 g^a g_a g^b >>_0 * << g_b W2 W3 >>_1"
    " - 1/20 * << W1 g_a g_b >>_1 * << g^a g^b W2 W3 >>_0"
    " + 1/60 * << W1 W2 g_a bullet(g^a, W3) >>_1"
    " - 1/120 * << W1 g^a g_a bullet(W2, W3) >>_1";

inline const char* kGSym =
    "3 * << bullet(W1, W2) bullet(W3, W4) >>_1"
    " - 4 * << bullet(bullet(W1, W2), W3) W4 >>_1"
    " - << bullet(W1, W2) W3 W4 g^a >>_0 * << g_a >>_1"
    " + 2 * << W1 W2 W3 g^a >>_0 * << bullet(g_a, W4) >>_1"
    " + 1/6 * << W1 W2 W3 g^a >>_0 * << g_a W4 g_b g^b >>_0"
    " + 1/24 * << W1 W2 W3 W4 g^a >>_0 * << g_a g_b g^b >>_0"
    " - 1/4 * << W1 W2 g^a g^b >>_0 * << g_a g_b W3 W4 >>_0";

inline const char* kRho23Plain =
    "2 * << bullet(bullet(W1, W2), W3) >>_2"
    " - 2 * << W1 W2 W3 g^a >>_0 * << T(g_a) >>_2"
    " - B(W1, W2, W3)";

// summand is symmetric in its last two slots; summed once per choice of the first
inline const char* kRho23Sym = "<< W1 T(bullet(W2, W3)) >>_2 - << T(W1) bullet(W2, W3) >>_2";

inline std::map<std::string, TensorDef> make_fixed() {
    std::map<std::string, TensorDef> m;
    auto put = [&](const std::string& n, expr::SExpr body) { m[n] = TensorDef{n, expr::tensor_arity(n), std::move(body)}; };
    put("rho0", expr::parse("<< T(W1) W2 W3 >>_0"));
    put("C0", expr::parse("nabla[W3](rho0(W1, W2, W4)) - nabla[W2](rho0(W1, W3, W4))"));
    put("rho1", expr::parse("<< T(W1) >>_1 - 1/24 * << W1 g^a g_a >>_0"));
    put("G", sym(kGSym, 4));
    put("A1", expr::parse(kA1));
    put("A2", expr::parse(kA2));
    put("B", expr::build::sum({expr::parse(kBPlain), sym(kBSym, 3)}));
    put("rho21", expr::parse("<< T(T(W1)) >>_2 - A1(W1)"));
    put("rho22", expr::parse("<< T(W1) T(W2) >>_2 - 3 * << T(bullet(W1, W2)) >>_2 - A2(W1, W2)"));
    put("rho23", expr::build::sum({expr::parse(kRho23Plain), expr::build::scale(Rational(1, 2), sym(kRho23Sym, 3))}));
    return m;
}

}  // namespace detail

/// Definition of a named tensor. C<i> for i >= 1 is the covariant derivative
/// of C<i-1> in its last slot. Throws ExprError for unknown names.
inline const TensorDef& definition(const std::string& name) {
    static std::mutex mu;
    static std::map<std::string, TensorDef> defs = detail::make_fixed();
    std::lock_guard lock(mu);
    if (auto it = defs.find(name); it != defs.end()) return it->second;
    int n = expr::tensor_arity(name);
    if (n < 0) throw expr::ExprError("unknown tensor: " + name);
    // C<i>, i >= 1
    int i = n - 4;
    std::string prev = "C" + std::to_string(i - 1);
    std::string text = "nabla[W" + std::to_string(n) + "](" + prev + "(";
    for (int j = 1; j < n; ++j) text += (j > 1 ? ", W" : "W") + std::to_string(j);
    text += "))";
    return defs[name] = TensorDef{name, n, expr::parse(text)};
}

/// Named-tensor node with an arity check.
inline expr::SExpr tensor(const std::string& name, std::vector<expr::VExpr> args) {
    int n = expr::tensor_arity(name);
    if (n < 0) throw expr::ExprError("unknown tensor: " + name);
    if (static_cast<int>(args.size()) != n)
        throw expr::ExprError("tensor '" + name + "' expects " + std::to_string(n) + " arguments");
    return expr::build::named(name, std::move(args));
}

inline std::vector<std::string> base_names() {
    return {"rho0", "C0", "rho1", "G", "rho21", "rho22", "rho23", "A1", "A2", "B"};
}

}  // namespace gwv::tensors
