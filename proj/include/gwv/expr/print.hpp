#pragma once

#include "gwv/expr/poly.hpp"

#include <string>

namespace gwv::expr {

inline std::string arg_to_string(const Arg& a) {
    std::string base;
    if (a.is_dummy()) {
        if (a.id < 0 || a.id >= 26) throw ExprError("print: dummy label out of printable range");
        base = std::string(a.raised ? "g^" : "g_") + static_cast<char>('a' + a.id);
    } else {
        base = slot_name(a.id);
    }
    for (int i = 0; i < a.shift; ++i) base = "tau+(" + base + ")";
    return base;
}

inline std::string correlator_to_string(const Correlator& c) {
    std::string s = "<<";
    for (const auto& a : c.args) s += " " + arg_to_string(a);
    return s + " >>_" + std::to_string(c.genus);
}

/// Factors of a canonical monomial joined by " * " (no coefficient).
inline std::string factors_to_string(const std::vector<Correlator>& fs) {
    std::string s;
    for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? " * " : "") + correlator_to_string(fs[i]);
    return s;
}

/// One monomial with its sign; `first` selects leading vs. infix sign.
inline std::string monomial_to_string(const Monomial& m, bool first = true) {
    bool neg = m.coeff.sign() < 0;
    Rational a = neg ? -m.coeff : m.coeff;
    std::string body;
    if (m.factors.empty())
        body = a.str();
    else if (a.is_one())
        body = factors_to_string(m.factors);
    else
        body = a.str() + " * " + factors_to_string(m.factors);
    if (first) return (neg ? "-" : "") + body;
    return (neg ? "- " : "+ ") + body;
}

/// Deterministic text for a canonical polynomial: one monomial per line,
/// ordered by canonical encoding. The zero polynomial prints as "0".
inline std::string print_canonical(const TensorPoly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [k, m] : p) {
        if (!first) s += "\n";
        s += monomial_to_string(m, first);
        first = false;
    }
    return s;
}

}  // namespace gwv::expr
